#pragma once

// Independent checks used to validate the certifier: sampled injectivity,
// exact planar acuteness, finite-difference Jacobians and convex-hull
// membership.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcert/bernstein.hpp"
#include "vcert/error.hpp"
#include "vcert/linalg.hpp"
#include "vcert/lp.hpp"
#include "vcert/rng.hpp"

namespace vcert {

struct CollisionWitness {
    Vector u;
    Vector v;
    Vector fu;
    Vector fv;
};

struct CollisionReport {
    bool collided = false;
    std::optional<CollisionWitness> witness;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

struct CollisionOptions {
    double collision_tol = 1e-9;
    double separation_floor = 1e-3;
    std::size_t refine_iterations = 40;
};

namespace detail {

    // Solves (A + lambda I) s = b for symmetric positive semidefinite A by
    // Cholesky. Returns false if the shifted matrix is not positive definite.
    inline bool solve_shifted_spd(const Matrix& A, double lambda, std::span<const double> b, std::span<double> s)
    {
        const std::size_t n = A.rows();
        Matrix L(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double sum = A(i, j) + (i == j ? lambda : 0.0);
                for (std::size_t k = 0; k < j; ++k) sum -= L(i, k) * L(j, k);
                if (i == j) {
                    if (!(sum > 0.0)) return false;
                    L(i, i) = std::sqrt(sum);
                } else {
                    L(i, j) = sum / L(j, j);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            double sum = b[i];
            for (std::size_t k = 0; k < i; ++k) sum -= L(i, k) * s[k];
            s[i] = sum / L(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double sum = s[i];
            for (std::size_t k = i + 1; k < n; ++k) sum -= L(k, i) * s[k];
            s[i] = sum / L(i, i);
        }
        return true;
    }

    inline double distance(std::span<const double> a, std::span<const double> b)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    }

} // namespace detail

/// Searches for u != v with F(u) = F(v). Each trial draws a pair uniformly
/// from [0,1]^n at least `separation_floor` apart, then moves v by damped
/// Gauss-Newton steps (kept inside the cube) towards a preimage of F(u).
/// A collision is reported only for a final pair that is still separated and
/// whose images agree to `collision_tol`. Trial t uses stream t of `seed`.
inline CollisionReport sampled_injectivity(MapEvaluator& map, std::size_t trials, std::uint64_t seed,
                                           const CollisionOptions& opt = {})
{
    if (trials < 1) {
        throw InvalidArgument("sampled_injectivity: trials must be at least 1");
    }
    const std::size_t n = map.dimension();
    const CounterRng root(seed);
    CollisionReport rep;
    rep.seed = seed;

    Vector u(n), v(n), fu(n), fv(n), cand(n), fc(n), r(n), g(n), step(n);
    Matrix J(n, n), JtJ(n, n);

    for (std::size_t t = 0; t < trials; ++t) {
        rep.trials = t + 1;
        CounterRng rng = root.split(t);
        do {
            for (std::size_t k = 0; k < n; ++k) {
                u[k] = rng.uniform();
                v[k] = rng.uniform();
            }
        } while (detail::distance(u, v) < opt.separation_floor);

        map.value(u, fu);
        map.value(v, fv);
        double res = detail::distance(fu, fv);
        double lambda = 1e-6;
        for (std::size_t it = 0; it < opt.refine_iterations && res > opt.collision_tol * 1e-3; ++it) {
            for (std::size_t k = 0; k < n; ++k) r[k] = fv[k] - fu[k];
            map.jacobian(v, J);
            for (std::size_t i = 0; i < n; ++i) {
                double gi = 0.0;
                for (std::size_t k = 0; k < n; ++k) gi -= J(k, i) * r[k];
                g[i] = gi;
                for (std::size_t j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < n; ++k) s += J(k, i) * J(k, j);
                    JtJ(i, j) = s;
                }
            }
            if (!detail::solve_shifted_spd(JtJ, lambda, g, step)) {
                lambda = lambda * 10.0 + 1e-12;
                continue;
            }
            for (std::size_t k = 0; k < n; ++k) cand[k] = std::clamp(v[k] + step[k], 0.0, 1.0);
            map.value(cand, fc);
            const double res_c = detail::distance(fu, fc);
            if (res_c < res) {
                v.swap(cand);
                fv.swap(fc);
                res = res_c;
                lambda = std::max(lambda / 3.0, 1e-12);
            } else {
                lambda *= 4.0;
                if (lambda > 1e8) break;
            }
        }

        if (res <= opt.collision_tol && detail::distance(u, v) >= opt.separation_floor) {
            rep.collided = true;
            rep.witness = CollisionWitness{u, v, fu, fv};
            return rep;
        }
    }
    return rep;
}

inline CollisionReport sampled_injectivity(const PatchGrid& grid, std::size_t trials, std::uint64_t seed,
                                           const CollisionOptions& opt = {})
{
    MapEvaluator map(grid);
    return sampled_injectivity(map, trials, seed, opt);
}

inline CollisionReport sampled_injectivity(const ControlNet& net, std::size_t trials, std::uint64_t seed,
                                           const CollisionOptions& opt = {})
{
    MapEvaluator map(net);
    return sampled_injectivity(map, trials, seed, opt);
}

/// Exact acuteness test for a finitely generated planar cone: true iff the
/// largest angular gap between consecutive generator directions exceeds pi.
inline bool acute_2d(std::span<const Vector> generators)
{
    if (generators.empty()) {
        throw InvalidArgument("acute_2d: empty generator list");
    }
    std::vector<double> angles;
    angles.reserve(generators.size());
    for (const auto& g : generators) {
        if (g.size() != 2) {
            throw DimensionMismatch("acute_2d: generators must be planar");
        }
        if (g[0] == 0.0 && g[1] == 0.0) {
            throw InvalidArgument("acute_2d: zero generator");
        }
        angles.push_back(std::atan2(g[1], g[0]));
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
    for (std::size_t i = 0; i + 1 < angles.size(); ++i) {
        gap = std::max(gap, angles[i + 1] - angles[i]);
    }
    return gap > std::numbers::pi;
}

/// Central-difference Jacobian; column j is (F(x + h e_j) - F(x - h e_j)) / 2h.
template <typename Map>
Matrix fd_jacobian(const Map& map, std::span<const double> x, double h)
{
    const std::size_t n = dimension_of(map);
    if (x.size() != n) {
        throw DimensionMismatch("fd_jacobian: point has wrong dimension");
    }
    if (!(h > 0.0)) {
        throw InvalidArgument("fd_jacobian: step must be positive");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!(x[k] - h >= 0.0 && x[k] + h <= 1.0)) {
            throw DomainError("fd_jacobian: point closer than h to the boundary along axis " + std::to_string(k + 1));
        }
    }
    Matrix J(n, n);
    Vector xp(x.begin(), x.end());
    Vector xm(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        const Vector fp = evaluate(map, xp);
        const Vector fm = evaluate(map, xm);
        for (std::size_t r = 0; r < n; ++r) {
            J(r, j) = (fp[r] - fm[r]) / (2.0 * h);
        }
        xp[j] = x[j];
        xm[j] = x[j];
    }
    return J;
}

/// True iff `point` is a convex combination of `vertices` to within `tol`,
/// decided by LP feasibility of {lambda >= 0, sum lambda = 1, V lambda = point}.
inline bool hull_membership(std::span<const double> point, std::span<const Vector> vertices, double tol = 1e-9)
{
    if (vertices.empty()) {
        throw InvalidArgument("hull_membership: empty vertex list");
    }
    const std::size_t d = point.size();
    const std::size_t k = vertices.size();
    for (const auto& v : vertices) {
        if (v.size() != d) {
            throw DimensionMismatch("hull_membership: vertex dimension differs from point");
        }
    }
    LinearProgram lp;
    lp.objective.assign(k, 0.0);
    auto add_equality = [&](auto coef_of, double rhs) {
        Constraint le, ge;
        le.coefficients.resize(k);
        ge.coefficients.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            le.coefficients[j] = coef_of(j);
            ge.coefficients[j] = -le.coefficients[j];
        }
        le.bound = rhs + tol;
        ge.bound = -rhs + tol;
        lp.constraints.push_back(std::move(le));
        lp.constraints.push_back(std::move(ge));
    };
    for (std::size_t r = 0; r < d; ++r) {
        add_equality([&](std::size_t j) { return vertices[j][r]; }, point[r]);
    }
    add_equality([](std::size_t) { return 1.0; }, 1.0);
    return solve(lp).status == LpStatus::Optimal;
}

} // namespace vcert

#pragma once

// Dense two-phase primal simplex on a condensed (dictionary) tableau.
// Largest-coefficient pricing, with Bland's smallest-index rule as the
// anti-cycling fallback on degenerate stalls. Sized for problems with a
// handful of variables and a few hundred inequality rows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "vcert/error.hpp"
#include "vcert/linalg.hpp"

namespace vcert {

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

/// One row: coefficients . x <= bound.
struct Constraint {
    Vector coefficients;
    double bound = 0.0;
};

struct VariableBounds {
    double lower = 0.0;
    double upper = unbounded;
};

/// maximize objective . x  subject to the constraint rows and variable bounds.
/// An empty `bounds` list means every variable is nonnegative.
struct LinearProgram {
    Vector objective;
    std::vector<Constraint> constraints;
    std::vector<VariableBounds> bounds;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    double objective_value = 0.0;
    /// Nonnegative multiplier per constraint row (Optimal only).
    Vector duals;
    std::size_t iterations = 0;
};

struct LpOptions {
    double feasibility_tol = 1e-9;
    double pivot_tol = 1e-10;
    double optimality_tol = 1e-10;
    std::size_t max_iterations = 200000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    std::size_t bland_after = 50;
};

namespace detail {

    // x_j = offset + sum over terms of sign * y_k, every y_k >= 0.
    struct VariableMap {
        double offset = 0.0;
        std::size_t first = 0;
        int first_sign = 1;
        bool split = false; // second term is -(y_{first+1})
    };

    class Dictionary {
    public:
        Dictionary(std::size_t rows, std::size_t cols)
            : m_(rows), cols_(cols), a_(rows * cols, 0.0), rhs_(rows, 0.0), obj_(cols, 0.0), basic_(rows),
              nonbasic_(cols)
        {
        }

        double& a(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
        double a(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

        // Replaces basic_[r] by nonbasic_[e].
        void pivot(std::size_t r, std::size_t e)
        {
            const double piv = a(r, e);
            double* row_r = &a_[r * cols_];
            const double inv = 1.0 / piv;
            for (std::size_t j = 0; j < cols_; ++j) {
                row_r[j] *= inv;
            }
            row_r[e] = inv;
            rhs_[r] *= inv;

            for (std::size_t i = 0; i < m_; ++i) {
                if (i == r) continue;
                double* row_i = &a_[i * cols_];
                const double f = row_i[e];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < cols_; ++j) {
                    row_i[j] -= f * row_r[j];
                }
                row_i[e] = -f * inv;
                rhs_[i] -= f * rhs_[r];
            }
            const double f = obj_[e];
            if (f != 0.0) {
                for (std::size_t j = 0; j < cols_; ++j) {
                    obj_[j] -= f * row_r[j];
                }
                obj_[e] = -f * inv;
                z_ += f * rhs_[r];
            }
            std::swap(basic_[r], nonbasic_[e]);
        }

        std::size_t m_;
        std::size_t cols_;
        std::vector<double> a_;
        std::vector<double> rhs_;
        std::vector<double> obj_;
        double z_ = 0.0;
        std::vector<std::size_t> basic_;
        std::vector<std::size_t> nonbasic_;
    };

    enum class RunResult { Optimal, Unbounded };

    // Largest-coefficient pricing; after `bland_after` consecutive degenerate
    // pivots it falls back to Bland's smallest-index rule until the objective
    // moves again, which rules out cycling. `blocked` labels may never enter;
    // `preferred_leaving` wins ratio ties (the phase-one auxiliary variable).
    inline RunResult run_simplex(Dictionary& d, const LpOptions& opt, std::size_t blocked,
                                 std::size_t preferred_leaving, std::size_t& iterations)
    {
        constexpr double tie_tol = 1e-12;
        std::size_t degenerate_run = 0;
        while (true) {
            const bool bland = degenerate_run >= opt.bland_after;
            std::size_t enter = d.cols_;
            for (std::size_t j = 0; j < d.cols_; ++j) {
                if (d.nonbasic_[j] == blocked || !(d.obj_[j] > opt.optimality_tol)) continue;
                if (enter == d.cols_) {
                    enter = j;
                } else if (bland ? d.nonbasic_[j] < d.nonbasic_[enter] : d.obj_[j] > d.obj_[enter]) {
                    enter = j;
                }
            }
            if (enter == d.cols_) {
                return RunResult::Optimal;
            }

            std::size_t leave = d.m_;
            double best = 0.0;
            for (std::size_t i = 0; i < d.m_; ++i) {
                const double coef = d.a(i, enter);
                if (coef <= opt.pivot_tol) continue;
                const double ratio = std::max(d.rhs_[i], 0.0) / coef;
                if (leave == d.m_ || ratio < best - tie_tol) {
                    leave = i;
                    best = ratio;
                } else if (ratio <= best + tie_tol) {
                    bool take;
                    if (d.basic_[i] == preferred_leaving || d.basic_[leave] == preferred_leaving) {
                        take = d.basic_[i] == preferred_leaving;
                    } else if (bland) {
                        take = d.basic_[i] < d.basic_[leave];
                    } else {
                        take = coef > d.a(leave, enter);
                    }
                    if (take) {
                        leave = i;
                        best = std::min(best, ratio);
                    }
                }
            }
            if (leave == d.m_) {
                return RunResult::Unbounded;
            }
            if (++iterations > opt.max_iterations) {
                throw LpError("simplex: iteration limit exceeded");
            }
            degenerate_run = best <= tie_tol ? degenerate_run + 1 : 0;
            d.pivot(leave, enter);
        }
    }

} // namespace detail

/// Solves `lp`. Deterministic: identical input gives bit-identical output.
inline LpSolution solve(const LinearProgram& lp, const LpOptions& opt = {})
{
    const std::size_t nvars = lp.objective.size();
    if (!lp.bounds.empty() && lp.bounds.size() != nvars) {
        throw DimensionMismatch("solve: " + std::to_string(lp.bounds.size()) + " bounds for "
                                + std::to_string(nvars) + " variables");
    }
    if (!all_finite(lp.objective)) {
        throw InvalidArgument("solve: non-finite objective coefficient");
    }
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& c = lp.constraints[i];
        if (c.coefficients.size() != nvars) {
            throw DimensionMismatch("solve: constraint " + std::to_string(i) + " has "
                                    + std::to_string(c.coefficients.size()) + " coefficients, expected "
                                    + std::to_string(nvars));
        }
        if (!all_finite(c.coefficients) || std::isnan(c.bound) || c.bound == -unbounded) {
            throw InvalidArgument("solve: constraint " + std::to_string(i) + " is not finite");
        }
    }

    LpSolution sol;
    sol.duals.assign(lp.constraints.size(), 0.0);

    // Map each variable onto nonnegative columns. Ranges that contain zero
    // keep the origin at y = 0; others are shifted to their finite end.
    std::vector<detail::VariableMap> maps(nvars);
    struct BoundRow {
        std::size_t var;
        int sign; // sign * x_j <= limit
        double limit;
    };
    std::vector<BoundRow> bound_rows;
    std::size_t ncols = 0;
    for (std::size_t j = 0; j < nvars; ++j) {
        const VariableBounds b = lp.bounds.empty() ? VariableBounds{} : lp.bounds[j];
        if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower == unbounded || b.upper == -unbounded) {
            throw InvalidArgument("solve: invalid bounds for variable " + std::to_string(j));
        }
        if (b.lower > b.upper) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        auto& mp = maps[j];
        mp.first = ncols;
        if (b.lower <= 0.0 && b.upper >= 0.0) {
            if (b.lower == 0.0) {
                ++ncols;
                if (b.upper != unbounded) bound_rows.push_back({j, 1, b.upper});
            } else if (b.upper == 0.0) {
                mp.first_sign = -1;
                ++ncols;
                if (b.lower != -unbounded) bound_rows.push_back({j, -1, -b.lower});
            } else {
                mp.split = true;
                ncols += 2;
                if (b.upper != unbounded) bound_rows.push_back({j, 1, b.upper});
                if (b.lower != -unbounded) bound_rows.push_back({j, -1, -b.lower});
            }
        } else if (b.lower > 0.0) {
            mp.offset = b.lower;
            ++ncols;
            if (b.upper != unbounded) bound_rows.push_back({j, 1, b.upper});
        } else {
            mp.offset = b.upper;
            mp.first_sign = -1;
            ++ncols;
            if (b.lower != -unbounded) bound_rows.push_back({j, -1, -b.lower});
        }
    }

    const std::size_t m = lp.constraints.size() + bound_rows.size();
    const std::size_t aux_label = ncols + m;
    detail::Dictionary d(m, ncols + 1); // last column: phase-one auxiliary
    for (std::size_t j = 0; j < ncols; ++j) d.nonbasic_[j] = j;
    d.nonbasic_[ncols] = aux_label;
    for (std::size_t i = 0; i < m; ++i) d.basic_[i] = ncols + i;

    auto put = [&](std::size_t row, std::size_t var, double coef) {
        const auto& mp = maps[var];
        d.a(row, mp.first) += mp.first_sign * coef;
        if (mp.split) d.a(row, mp.first + 1) -= coef;
        return coef * mp.offset;
    };
    for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
        const auto& c = lp.constraints[i];
        double shift = 0.0;
        for (std::size_t j = 0; j < nvars; ++j) {
            if (c.coefficients[j] != 0.0) shift += put(i, j, c.coefficients[j]);
        }
        d.rhs_[i] = c.bound - shift;
    }
    for (std::size_t k = 0; k < bound_rows.size(); ++k) {
        const std::size_t row = lp.constraints.size() + k;
        const double shift = put(row, bound_rows[k].var, static_cast<double>(bound_rows[k].sign));
        d.rhs_[row] = bound_rows[k].limit - shift;
    }

    // Phase one: maximize -x0 over  x_B = rhs - A y + x0.
    std::size_t worst = m;
    for (std::size_t i = 0; i < m; ++i) {
        if (d.rhs_[i] < 0.0 && (worst == m || d.rhs_[i] < d.rhs_[worst])) worst = i;
    }
    if (worst != m) {
        for (std::size_t i = 0; i < m; ++i) d.a(i, ncols) = -1.0;
        d.obj_[ncols] = -1.0;
        d.pivot(worst, ncols);
        detail::run_simplex(d, opt, m + ncols + 1, aux_label, sol.iterations);
        if (d.z_ < -opt.feasibility_tol) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (d.basic_[i] != aux_label) continue;
            std::size_t best = d.cols_;
            for (std::size_t j = 0; j < d.cols_; ++j) {
                if (std::abs(d.a(i, j)) > opt.pivot_tol && (best == d.cols_ || std::abs(d.a(i, j)) > std::abs(d.a(i, best)))) {
                    best = j;
                }
            }
            if (best != d.cols_) d.pivot(i, best);
            break;
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (d.basic_[i] == aux_label) {
                d.rhs_[i] = 0.0;
            }
        }
    }

    // Phase two objective in terms of the current nonbasic columns.
    Vector cost(ncols, 0.0);
    double cost_offset = 0.0;
    for (std::size_t j = 0; j < nvars; ++j) {
        const auto& mp = maps[j];
        cost[mp.first] += mp.first_sign * lp.objective[j];
        if (mp.split) cost[mp.first + 1] -= lp.objective[j];
        cost_offset += lp.objective[j] * mp.offset;
    }
    std::fill(d.obj_.begin(), d.obj_.end(), 0.0);
    d.z_ = cost_offset;
    for (std::size_t j = 0; j < d.cols_; ++j) {
        if (d.nonbasic_[j] < ncols) d.obj_[j] = cost[d.nonbasic_[j]];
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t label = d.basic_[i];
        if (label >= ncols || cost[label] == 0.0) continue;
        d.z_ += cost[label] * d.rhs_[i];
        for (std::size_t j = 0; j < d.cols_; ++j) {
            d.obj_[j] -= cost[label] * d.a(i, j);
        }
    }
    if (detail::run_simplex(d, opt, aux_label, m + ncols + 1, sol.iterations) == detail::RunResult::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    Vector y(ncols, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (d.basic_[i] < ncols) y[d.basic_[i]] = std::max(d.rhs_[i], 0.0);
    }
    for (std::size_t j = 0; j < d.cols_; ++j) {
        const std::size_t label = d.nonbasic_[j];
        if (label >= ncols && label < ncols + lp.constraints.size()) {
            sol.duals[label - ncols] = std::max(-d.obj_[j], 0.0);
        }
    }
    sol.x.assign(nvars, 0.0);
    for (std::size_t j = 0; j < nvars; ++j) {
        const auto& mp = maps[j];
        double v = mp.offset + mp.first_sign * y[mp.first];
        if (mp.split) v -= y[mp.first + 1];
        sol.x[j] = v;
    }
    sol.objective_value = dot(lp.objective, sol.x);
    sol.status = LpStatus::Optimal;
    return sol;
}

} // namespace vcert

#pragma once

// Strict V-family test: one max-margin LP per sign pattern over the signed,
// normalised column generators. A pattern is certified when the LP finds a
// direction a with a.w >= t > 0 for every signed generator w.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcert/bernstein.hpp"
#include "vcert/cones.hpp"
#include "vcert/error.hpp"
#include "vcert/generator_set.hpp"
#include "vcert/linalg.hpp"
#include "vcert/lp.hpp"

namespace vcert {

inline constexpr double default_threshold = 1e-7;

/// Slack allowed when re-checking an LP certificate against the generators.
inline constexpr double certificate_recheck_slack = 1e-9;

struct CertifyOptions {
    double delta = default_delta;
    double threshold = default_threshold;
};

enum class PatternStatus { Strict, NotStrict };
enum class Verdict { StrictVFamily, NotCertified, Degenerate };
enum class Provenance { SinglePatch, MultiPatch, MatrixFamily };

inline const char* to_string(PatternStatus s)
{
    return s == PatternStatus::Strict ? "strict" : "not-strict";
}

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::StrictVFamily: return "strict-v-family";
    case Verdict::NotCertified: return "not-certified";
    case Verdict::Degenerate: return "degenerate";
    }
    return "?";
}

inline const char* to_string(Provenance p)
{
    switch (p) {
    case Provenance::SinglePatch: return "single-patch";
    case Provenance::MultiPatch: return "multi-patch";
    case Provenance::MatrixFamily: return "matrix-family";
    }
    return "?";
}

/// Result of the max-margin LP over one list of unit generators.
struct CertificateLp {
    Vector a_star;
    double t_star = 0.0;
    /// LP dual weights, one per generator; nonnegative and summing to one.
    Vector weights;
};

/// maximize t  s.t.  a.w_k >= t for all k,  -1 <= a_j <= 1.
inline CertificateLp certificate_lp(std::span<const Vector> unit_generators, std::size_t n)
{
    if (unit_generators.empty()) {
        throw InvalidArgument("certificate_lp: empty generator list");
    }
    LinearProgram lp;
    lp.objective.assign(n + 1, 0.0);
    lp.objective[n] = 1.0;
    lp.bounds.assign(n + 1, VariableBounds{-1.0, 1.0});
    lp.bounds[n] = VariableBounds{-unbounded, unbounded};
    lp.constraints.reserve(unit_generators.size());
    for (const auto& w : unit_generators) {
        if (w.size() != n) {
            throw DimensionMismatch("certificate_lp: generator has " + std::to_string(w.size())
                                    + " coordinates, expected " + std::to_string(n));
        }
        Constraint row;
        row.coefficients.resize(n + 1);
        for (std::size_t j = 0; j < n; ++j) {
            row.coefficients[j] = -w[j];
        }
        row.coefficients[n] = 1.0;
        row.bound = 0.0;
        lp.constraints.push_back(std::move(row));
    }
    const LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) {
        throw LpError(std::string("certificate_lp: solver returned ") + to_string(sol.status));
    }
    CertificateLp out;
    out.a_star.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    out.t_star = sol.x[n];
    out.weights = sol.duals;
    return out;
}

/// Signed generator participating in a near-zero combination.
struct WitnessTerm {
    std::size_t column = 0;    // zero-based
    std::size_t generator = 0; // zero-based, within the column
    double weight = 0.0;
};

struct PatternResult {
    SignPattern pattern{std::vector<int>{1}};
    PatternStatus status = PatternStatus::NotStrict;
    std::optional<Certificate> certificate;
    double lp_margin = 0.0;
    Vector lp_direction;
    /// 0 < lp_margin <= threshold.
    bool marginal = false;
    /// Filled for NotStrict patterns: sum of weight * sign * unit generator.
    std::vector<WitnessTerm> witness;
    Vector witness_sum;
};

struct DegenerateInfo {
    std::size_t column = 0; // zero-based
    double norm = 0.0;
};

struct CertificateReport {
    std::size_t dimension = 0;
    Verdict verdict = Verdict::NotCertified;
    Provenance provenance = Provenance::MatrixFamily;
    std::vector<PatternResult> patterns;
    std::vector<std::size_t> generator_counts;
    /// Smallest generator norm per column, before normalisation.
    std::vector<double> min_generator_norms;
    std::optional<DegenerateInfo> degenerate;
    double delta = default_delta;
    double threshold = default_threshold;

    bool certified() const noexcept { return verdict == Verdict::StrictVFamily; }
};

namespace detail {

    inline PatternResult solve_pattern(std::span<const NormalizedColumn> columns, const SignPattern& s,
                                       std::size_t n, double threshold)
    {
        const std::vector<Vector> signed_units = apply_sign_pattern(columns, s);
        const CertificateLp lp = certificate_lp(signed_units, n);

        PatternResult r{s, PatternStatus::NotStrict, std::nullopt, 0.0, {}, false, {}, {}};
        r.lp_margin = lp.t_star;
        r.lp_direction = lp.a_star;
        r.marginal = lp.t_star > 0.0 && lp.t_star <= threshold;

        if (lp.t_star > threshold) {
            const double len = norm2(lp.a_star);
            Certificate cert{scaled(lp.a_star, 1.0 / len), lp.t_star / len};
            if (verify_certificate(cert.a, cert.epsilon - certificate_recheck_slack, signed_units)) {
                r.status = PatternStatus::Strict;
                r.certificate = std::move(cert);
                return r;
            }
        }

        r.status = PatternStatus::NotStrict;
        r.witness_sum.assign(n, 0.0);
        std::size_t k = 0;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            for (std::size_t g = 0; g < columns[c].units.size(); ++g, ++k) {
                const double w = lp.weights[k];
                if (w <= 0.0) continue;
                r.witness.push_back({c, g, w});
                for (std::size_t j = 0; j < n; ++j) {
                    r.witness_sum[j] += w * signed_units[k][j];
                }
            }
        }
        return r;
    }

    inline CertificateReport degenerate_report(std::size_t n, std::size_t column, double norm,
                                               const CertifyOptions& opt, Provenance prov)
    {
        CertificateReport rep;
        rep.dimension = n;
        rep.verdict = Verdict::Degenerate;
        rep.provenance = prov;
        rep.degenerate = DegenerateInfo{column, norm};
        rep.delta = opt.delta;
        rep.threshold = opt.threshold;
        return rep;
    }

} // namespace detail

/// Runs the full 2^(n-1)-pattern test over `columns` (one generator set per
/// Jacobian column, in column order).
inline CertificateReport test_strict_vfamily(std::span<const GeneratorSet> columns, const CertifyOptions& opt = {},
                                             Provenance provenance = Provenance::MatrixFamily)
{
    if (columns.empty()) {
        throw InvalidArgument("test_strict_vfamily: no columns");
    }
    if (!(opt.threshold >= 0.0) || !std::isfinite(opt.threshold)) {
        throw InvalidArgument("test_strict_vfamily: threshold must be a nonnegative finite number");
    }
    const std::size_t n = columns.size();
    for (std::size_t i = 0; i < n; ++i) {
        GeneratorSet checked{i, columns[i].vectors};
        checked.validate(n);
    }

    CertificateReport rep;
    rep.dimension = n;
    rep.provenance = provenance;
    rep.delta = opt.delta;
    rep.threshold = opt.threshold;

    std::vector<NormalizedColumn> normalized;
    normalized.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            normalized.push_back(normalize_generators(GeneratorSet{i, columns[i].vectors}, opt.delta));
        } catch (const DegenerateColumn& e) {
            return detail::degenerate_report(n, e.column(), e.norm(), opt, provenance);
        }
        rep.generator_counts.push_back(columns[i].size());
        rep.min_generator_norms.push_back(normalized.back().min_norm);
    }

    bool all_strict = true;
    for (const auto& s : enumerate_sign_patterns(n)) {
        rep.patterns.push_back(detail::solve_pattern(normalized, s, n, opt.threshold));
        all_strict = all_strict && rep.patterns.back().status == PatternStatus::Strict;
    }
    rep.verdict = all_strict ? Verdict::StrictVFamily : Verdict::NotCertified;
    return rep;
}

/// Raw matrix family given column by column. The caller owns the hypothesis
/// that the family comes from a map on a convex domain.
inline CertificateReport certify_matrix_family(std::span<const GeneratorSet> columns, const CertifyOptions& opt = {})
{
    return test_strict_vfamily(columns, opt, Provenance::MatrixFamily);
}

/// Generators of every Jacobian column of a single grid cell, chain-rule
/// scaled to global coordinates.
inline std::vector<GeneratorSet> cell_columns(const PatchGrid& grid, std::size_t flat_cell)
{
    const auto cell = grid.cell_index(flat_cell);
    std::vector<GeneratorSet> out;
    for (std::size_t k = 0; k < grid.dimension(); ++k) {
        GeneratorSet local = column_generators(grid.patches()[flat_cell], k);
        const double scale = 1.0 / grid.cell_width(cell, k);
        for (auto& v : local.vectors) {
            v = scaled(v, scale);
        }
        out.push_back(std::move(local));
    }
    return out;
}

/// Aggregates column generators over all patches and tests the union. A
/// StrictVFamily verdict certifies global invertibility of the piecewise map
/// on [0,1]^n, assuming the patches join continuously.
inline CertificateReport certify_map(const PatchGrid& grid, const CertifyOptions& opt = {})
{
    if (grid.cell_count() == 0 || grid.patches().empty()) {
        throw InvalidArgument("certify_map: empty grid");
    }
    const Provenance prov = grid.cell_count() == 1 ? Provenance::SinglePatch : Provenance::MultiPatch;
    std::vector<GeneratorSet> columns;
    for (std::size_t k = 0; k < grid.dimension(); ++k) {
        try {
            columns.push_back(grid_column_generators(grid, k));
        } catch (const ConstantAxis& e) {
            return detail::degenerate_report(grid.dimension(), e.axis(), 0.0, opt, prov);
        }
    }
    return test_strict_vfamily(columns, opt, prov);
}

inline CertificateReport certify_map(const ControlNet& net, const CertifyOptions& opt = {})
{
    return certify_map(PatchGrid::single(net), opt);
}

/// Each cell certified on its own, in row-major cell order.
inline std::vector<CertificateReport> certify_patches(const PatchGrid& grid, const CertifyOptions& opt = {})
{
    std::vector<CertificateReport> out;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        try {
            const auto cols = cell_columns(grid, c);
            out.push_back(test_strict_vfamily(cols, opt, Provenance::SinglePatch));
        } catch (const ConstantAxis& e) {
            out.push_back(detail::degenerate_report(grid.dimension(), e.axis(), 0.0, opt, Provenance::SinglePatch));
        }
    }
    return out;
}

} // namespace vcert

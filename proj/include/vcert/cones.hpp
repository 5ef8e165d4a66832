#pragma once

// Generator-level views of the signed cone sums K_1 +- K_2 +- ... +- K_n and
// the certificate-cone membership test a.x >= eps * |x|.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vcert/error.hpp"
#include "vcert/generator_set.hpp"
#include "vcert/linalg.hpp"

namespace vcert {

inline constexpr double default_delta = 1e-12;

/// Sign choice for each column cone. The first sign is always +1.
class SignPattern {
public:
    explicit SignPattern(std::vector<int> signs) : signs_(std::move(signs))
    {
        if (signs_.empty()) {
            throw InvalidArgument("sign pattern: empty");
        }
        for (int s : signs_) {
            if (s != 1 && s != -1) {
                throw InvalidArgument("sign pattern: entries must be +1 or -1");
            }
        }
        if (signs_.front() != 1) {
            throw InvalidArgument("sign pattern: first sign must be +1");
        }
    }

    std::size_t size() const noexcept { return signs_.size(); }
    int operator[](std::size_t i) const { return signs_[i]; }
    const std::vector<int>& signs() const noexcept { return signs_; }

    /// "(+,-,+)"
    std::string str() const
    {
        std::string out = "(";
        for (std::size_t i = 0; i < signs_.size(); ++i) {
            if (i) out += ',';
            out += signs_[i] > 0 ? '+' : '-';
        }
        return out + ")";
    }

    friend bool operator==(const SignPattern&, const SignPattern&) = default;

private:
    std::vector<int> signs_;
};

/// Unit vector `a` and margin `epsilon` with a.x >= epsilon * |x| on a cone.
struct Certificate {
    Vector a;
    double epsilon = 0.0;
};

/// Unit-normalised generators of one column plus the smallest original norm.
struct NormalizedColumn {
    std::size_t column = 0;
    std::vector<Vector> units;
    double min_norm = 0.0;
};

/// Scales every generator to unit length. Throws DegenerateColumn when any
/// generator is closer than `delta` to the origin.
inline NormalizedColumn normalize_generators(const GeneratorSet& gens, double delta = default_delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("normalize_generators: delta must be a positive finite number");
    }
    NormalizedColumn out;
    out.column = gens.column;
    out.min_norm = std::numeric_limits<double>::infinity();
    out.units.reserve(gens.size());
    for (const auto& v : gens.vectors) {
        const double len = norm2(v);
        if (!(len >= delta)) {
            throw DegenerateColumn(gens.column, len,
                                   "column " + std::to_string(gens.column + 1) + " has a generator of norm "
                                       + std::to_string(len) + " below delta");
        }
        out.min_norm = std::min(out.min_norm, len);
        out.units.push_back(scaled(v, 1.0 / len));
    }
    return out;
}

/// All 2^(n-1) patterns with first sign +1, in binary-counting order: bit
/// (n-1-i) of the counter set means column i is negated.
inline std::vector<SignPattern> enumerate_sign_patterns(std::size_t n)
{
    if (n < 1) {
        throw InvalidArgument("enumerate_sign_patterns: n must be at least 1");
    }
    if (n > 30) {
        throw InvalidArgument("enumerate_sign_patterns: n = " + std::to_string(n) + " is too large");
    }
    const std::uint64_t count = std::uint64_t{1} << (n - 1);
    std::vector<SignPattern> out;
    out.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) {
        std::vector<int> signs(n, 1);
        for (std::size_t i = 1; i < n; ++i) {
            if ((k >> (n - 1 - i)) & 1U) {
                signs[i] = -1;
            }
        }
        out.emplace_back(std::move(signs));
    }
    return out;
}

/// Concatenation over columns of s_i * (normalised generators of column i).
/// Their positive hull is the signed cone sum for pattern `s`.
inline std::vector<Vector> apply_sign_pattern(std::span<const NormalizedColumn> columns, const SignPattern& s)
{
    if (columns.size() != s.size()) {
        throw DimensionMismatch("apply_sign_pattern: " + std::to_string(columns.size()) + " columns but "
                                + std::to_string(s.size()) + " signs");
    }
    std::vector<Vector> out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (const auto& u : columns[i].units) {
            out.push_back(scaled(u, static_cast<double>(s[i])));
        }
    }
    return out;
}

inline std::vector<Vector> apply_sign_pattern(std::span<const GeneratorSet> columns, const SignPattern& s,
                                              double delta = default_delta)
{
    std::vector<NormalizedColumn> normalized;
    normalized.reserve(columns.size());
    for (const auto& c : columns) {
        normalized.push_back(normalize_generators(c, delta));
    }
    return apply_sign_pattern(std::span<const NormalizedColumn>(normalized), s);
}

/// True iff a.v >= epsilon * |v| for every generator v. Passing extends to the
/// whole cone hull of the generators.
inline bool verify_certificate(std::span<const double> a, double epsilon, std::span<const Vector> generators)
{
    for (const auto& v : generators) {
        if (!(dot(a, v) >= epsilon * norm2(v))) {
            return false;
        }
    }
    return true;
}

} // namespace vcert

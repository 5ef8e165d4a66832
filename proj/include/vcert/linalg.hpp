#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "vcert/error.hpp"

namespace vcert {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DimensionMismatch("dot: operand lengths differ");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double norm2(std::span<const double> a)
{
    double s = 0.0;
    for (double v : a) {
        s += v * v;
    }
    return std::sqrt(s);
}

inline bool all_finite(std::span<const double> a)
{
    for (double v : a) {
        if (!std::isfinite(v)) {
            return false;
        }
    }
    return true;
}

inline Vector scaled(std::span<const double> a, double s)
{
    Vector out(a.begin(), a.end());
    for (double& v : out) {
        v *= s;
    }
    return out;
}

inline Vector difference(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DimensionMismatch("difference: operand lengths differ");
    }
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

/// Dense row-major matrix, just enough for Jacobians.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Vector column(std::size_t c) const
    {
        Vector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            out[r] = (*this)(r, c);
        }
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace vcert

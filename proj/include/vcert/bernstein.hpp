#pragma once

// Tensor-product Bernstein-Bezier patches on [0,1]^n and piecewise maps built
// from them on axis-aligned grids.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vcert/error.hpp"
#include "vcert/generator_set.hpp"
#include "vcert/linalg.hpp"

namespace vcert {

/// Control net of one tensor-product BB patch F: [0,1]^n -> R^n.
///
/// Points are stored row-major over the multi-index (i_1, ..., i_n): the last
/// axis varies fastest. Each point carries n coordinates.
class ControlNet {
public:
    ControlNet() = default;

    /// `points` must hold prod(degrees[k] + 1) vectors of length degrees.size().
    ControlNet(std::vector<std::size_t> degrees, const std::vector<Vector>& points)
        : degrees_(std::move(degrees))
    {
        if (degrees_.empty()) {
            throw InvalidArgument("control net: dimension must be positive");
        }
        const std::size_t n = degrees_.size();
        const std::size_t count = point_count();
        if (points.size() != count) {
            throw DimensionMismatch("control net: expected " + std::to_string(count) + " control points, got "
                                    + std::to_string(points.size()));
        }
        coords_.reserve(count * n);
        for (std::size_t k = 0; k < count; ++k) {
            if (points[k].size() != n) {
                throw DimensionMismatch("control net: point " + std::to_string(k) + " has "
                                        + std::to_string(points[k].size()) + " coordinates, expected "
                                        + std::to_string(n));
            }
            if (!all_finite(points[k])) {
                throw InvalidArgument("control net: point " + std::to_string(k) + " is not finite");
            }
            coords_.insert(coords_.end(), points[k].begin(), points[k].end());
        }
    }

    std::size_t dimension() const noexcept { return degrees_.size(); }
    const std::vector<std::size_t>& degrees() const noexcept { return degrees_; }

    std::size_t point_count() const noexcept
    {
        std::size_t count = 1;
        for (std::size_t p : degrees_) {
            count *= p + 1;
        }
        return count;
    }

    /// Row-major stride of `axis` in units of points.
    std::size_t stride(std::size_t axis) const noexcept
    {
        std::size_t s = 1;
        for (std::size_t k = axis + 1; k < degrees_.size(); ++k) {
            s *= degrees_[k] + 1;
        }
        return s;
    }

    std::size_t flat_index(std::span<const std::size_t> multi) const
    {
        if (multi.size() != dimension()) {
            throw DimensionMismatch("control net: multi-index has wrong length");
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < multi.size(); ++k) {
            if (multi[k] > degrees_[k]) {
                throw DimensionMismatch("control net: multi-index out of range");
            }
            idx = idx * (degrees_[k] + 1) + multi[k];
        }
        return idx;
    }

    std::vector<std::size_t> multi_index(std::size_t flat) const
    {
        std::vector<std::size_t> multi(dimension());
        for (std::size_t k = dimension(); k-- > 0;) {
            multi[k] = flat % (degrees_[k] + 1);
            flat /= degrees_[k] + 1;
        }
        return multi;
    }

    std::span<const double> point(std::size_t flat) const
    {
        return {coords_.data() + flat * dimension(), dimension()};
    }

    std::span<const double> point(std::span<const std::size_t> multi) const { return point(flat_index(multi)); }

    std::vector<Vector> points() const
    {
        std::vector<Vector> out;
        out.reserve(point_count());
        for (std::size_t k = 0; k < point_count(); ++k) {
            auto p = point(k);
            out.emplace_back(p.begin(), p.end());
        }
        return out;
    }

    /// All coordinates, point after point.
    std::span<const double> coordinates() const noexcept { return coords_; }

    friend bool operator==(const ControlNet&, const ControlNet&) = default;

private:
    std::vector<std::size_t> degrees_;
    std::vector<double> coords_;
};

namespace detail {

    inline void check_unit_point(std::span<const double> xi, std::size_t n, const char* what)
    {
        if (xi.size() != n) {
            throw DimensionMismatch(std::string(what) + ": point has " + std::to_string(xi.size())
                                    + " coordinates, expected " + std::to_string(n));
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!(xi[k] >= 0.0 && xi[k] <= 1.0)) {
                throw DomainError(std::string(what) + ": coordinate " + std::to_string(k + 1) + " = "
                                  + std::to_string(xi[k]) + " outside [0,1]");
            }
        }
    }

    /// Axis-wise de Casteljau reduction. `work` is overwritten; on return its
    /// first n entries hold the value. No domain checks.
    inline void de_casteljau(const ControlNet& net, std::span<const double> xi, std::vector<double>& work)
    {
        const std::size_t n = net.dimension();
        const auto coords = net.coordinates();
        work.assign(coords.begin(), coords.end());
        const auto& deg = net.degrees();

        std::size_t blocks = net.point_count();
        for (std::size_t axis = n; axis-- > 0;) {
            const std::size_t len = deg[axis] + 1;
            blocks /= len;
            const double t = xi[axis];
            const double s = 1.0 - t;
            for (std::size_t b = 0; b < blocks; ++b) {
                double* base = work.data() + b * len * n;
                for (std::size_t r = 1; r < len; ++r) {
                    for (std::size_t i = 0; i + r < len; ++i) {
                        double* lo = base + i * n;
                        const double* hi = lo + n;
                        for (std::size_t c = 0; c < n; ++c) {
                            lo[c] = s * lo[c] + t * hi[c];
                        }
                    }
                }
                double* dst = work.data() + b * n;
                if (dst != base) {
                    for (std::size_t c = 0; c < n; ++c) {
                        dst[c] = base[c];
                    }
                }
            }
        }
    }

} // namespace detail

/// Evaluates the tensor-product Bernstein sum at `xi` in [0,1]^n.
inline Vector eval_bb(const ControlNet& net, std::span<const double> xi)
{
    detail::check_unit_point(xi, net.dimension(), "eval_bb");
    std::vector<double> work;
    detail::de_casteljau(net, xi, work);
    return Vector(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(net.dimension()));
}

/// Control net of the partial derivative along `axis` (zero-based): degree
/// drops by one and points become p * (f[.., i+1, ..] - f[.., i, ..]).
inline ControlNet derivative_net(const ControlNet& net, std::size_t axis)
{
    const std::size_t n = net.dimension();
    if (axis >= n) {
        throw DimensionMismatch("derivative_net: axis " + std::to_string(axis) + " out of range");
    }
    const std::size_t p = net.degrees()[axis];
    if (p == 0) {
        throw ConstantAxis(axis, "derivative_net: degree 0 along axis " + std::to_string(axis + 1));
    }
    std::vector<std::size_t> degrees = net.degrees();
    degrees[axis] = p - 1;
    const std::size_t step = net.stride(axis);
    std::size_t count = 1;
    for (std::size_t d : degrees) {
        count *= d + 1;
    }
    std::vector<Vector> points;
    points.reserve(count);
    std::vector<std::size_t> multi(n);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t rest = k;
        for (std::size_t a = n; a-- > 0;) {
            multi[a] = rest % (degrees[a] + 1);
            rest /= degrees[a] + 1;
        }
        const std::size_t lo = net.flat_index(multi);
        const auto a = net.point(lo);
        const auto b = net.point(lo + step);
        Vector d(n);
        for (std::size_t c = 0; c < n; ++c) {
            d[c] = static_cast<double>(p) * (b[c] - a[c]);
        }
        points.push_back(std::move(d));
    }
    return ControlNet(std::move(degrees), points);
}

/// Control points of the `axis` derivative net, exact duplicates removed.
/// Every realised Jacobian column along `axis` lies in their convex hull.
inline GeneratorSet column_generators(const ControlNet& net, std::size_t axis)
{
    const ControlNet d = derivative_net(net, axis);
    GeneratorSet gens;
    gens.column = axis;
    for (std::size_t k = 0; k < d.point_count(); ++k) {
        auto p = d.point(k);
        gens.add_unique(Vector(p.begin(), p.end()));
    }
    return gens;
}

/// Piecewise BB map on a grid of axis-aligned cells covering [0,1]^n.
/// Cells are stored row-major over the cell multi-index.
class PatchGrid {
public:
    PatchGrid() = default;

    PatchGrid(std::vector<Vector> breakpoints, std::vector<ControlNet> patches)
        : breakpoints_(std::move(breakpoints)), patches_(std::move(patches))
    {
        const std::size_t n = breakpoints_.size();
        if (n == 0) {
            throw InvalidArgument("patch grid: dimension must be positive");
        }
        for (std::size_t k = 0; k < n; ++k) {
            const auto& bp = breakpoints_[k];
            const std::string where = "patch grid: breakpoints of axis " + std::to_string(k + 1);
            if (bp.size() < 2) {
                throw InvalidArgument(where + " need at least two entries");
            }
            if (bp.front() != 0.0 || bp.back() != 1.0) {
                throw InvalidArgument(where + " must start at 0 and end at 1");
            }
            for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
                if (!(bp[i] < bp[i + 1])) {
                    throw InvalidArgument(where + " are not strictly increasing");
                }
            }
        }
        if (patches_.size() != cell_count()) {
            throw DimensionMismatch("patch grid: expected " + std::to_string(cell_count()) + " patches, got "
                                    + std::to_string(patches_.size()));
        }
        for (std::size_t c = 0; c < patches_.size(); ++c) {
            if (patches_[c].dimension() != n) {
                throw DimensionMismatch("patch grid: patch " + std::to_string(c) + " has dimension "
                                        + std::to_string(patches_[c].dimension()) + ", expected "
                                        + std::to_string(n));
            }
        }
    }

    /// One cell covering the whole cube.
    static PatchGrid single(ControlNet net)
    {
        std::vector<Vector> bps(net.dimension(), Vector{0.0, 1.0});
        std::vector<ControlNet> patches;
        patches.push_back(std::move(net));
        return PatchGrid(std::move(bps), std::move(patches));
    }

    std::size_t dimension() const noexcept { return breakpoints_.size(); }
    const std::vector<Vector>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<ControlNet>& patches() const noexcept { return patches_; }

    std::size_t cells_along(std::size_t axis) const { return breakpoints_[axis].size() - 1; }

    std::size_t cell_count() const
    {
        std::size_t count = 1;
        for (std::size_t k = 0; k < dimension(); ++k) {
            count *= cells_along(k);
        }
        return count;
    }

    std::size_t flat_cell(std::span<const std::size_t> cell) const
    {
        if (cell.size() != dimension()) {
            throw DimensionMismatch("patch grid: cell index has wrong length");
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < cell.size(); ++k) {
            if (cell[k] >= cells_along(k)) {
                throw DimensionMismatch("patch grid: cell index out of range");
            }
            idx = idx * cells_along(k) + cell[k];
        }
        return idx;
    }

    std::vector<std::size_t> cell_index(std::size_t flat) const
    {
        std::vector<std::size_t> cell(dimension());
        for (std::size_t k = dimension(); k-- > 0;) {
            cell[k] = flat % cells_along(k);
            flat /= cells_along(k);
        }
        return cell;
    }

    const ControlNet& patch(std::span<const std::size_t> cell) const { return patches_[flat_cell(cell)]; }

    double cell_width(std::span<const std::size_t> cell, std::size_t axis) const
    {
        return breakpoints_[axis][cell[axis] + 1] - breakpoints_[axis][cell[axis]];
    }

private:
    std::vector<Vector> breakpoints_;
    std::vector<ControlNet> patches_;
};

struct PatchLocation {
    std::vector<std::size_t> cell;
    Vector local;
};

/// Cell containing `x` and the affine local coordinates inside it. Points on
/// shared faces go to the lexicographically smallest containing cell.
inline PatchLocation locate_patch(const PatchGrid& grid, std::span<const double> x)
{
    const std::size_t n = grid.dimension();
    detail::check_unit_point(x, n, "locate_patch");
    PatchLocation loc{std::vector<std::size_t>(n), Vector(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const auto& bp = grid.breakpoints()[k];
        std::size_t c = 0;
        while (c + 2 < bp.size() && x[k] > bp[c + 1]) {
            ++c;
        }
        const double t = (x[k] - bp[c]) / (bp[c + 1] - bp[c]);
        loc.cell[k] = c;
        loc.local[k] = std::min(1.0, std::max(0.0, t));
    }
    return loc;
}

/// Value of the piecewise map at a global point.
inline Vector evaluate(const PatchGrid& grid, std::span<const double> x)
{
    const auto loc = locate_patch(grid, x);
    return eval_bb(grid.patch(loc.cell), loc.local);
}

inline Vector evaluate(const ControlNet& net, std::span<const double> x) { return eval_bb(net, x); }

inline std::size_t dimension_of(const ControlNet& net) { return net.dimension(); }
inline std::size_t dimension_of(const PatchGrid& grid) { return grid.dimension(); }

/// Generators of Jacobian column `axis` over the whole grid: the union over
/// cells of the derivative control points, each scaled by 1 / (cell width)
/// for the chain rule. Exact duplicates are dropped.
inline GeneratorSet grid_column_generators(const PatchGrid& grid, std::size_t axis)
{
    GeneratorSet out;
    out.column = axis;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const auto cell = grid.cell_index(c);
        const double scale = 1.0 / grid.cell_width(cell, axis);
        const GeneratorSet local = column_generators(grid.patches()[c], axis);
        for (const auto& v : local.vectors) {
            out.add_unique(scaled(v, scale));
        }
    }
    return out;
}

/// Fast repeated evaluation of a piecewise map and its Jacobian. Holds scratch
/// buffers, so one instance must not be shared between threads.
class MapEvaluator {
public:
    explicit MapEvaluator(const ControlNet& net) : MapEvaluator(PatchGrid::single(net)) {}

    explicit MapEvaluator(PatchGrid grid) : grid_(std::move(grid))
    {
        const std::size_t n = grid_.dimension();
        derivatives_.resize(grid_.cell_count() * n);
        for (std::size_t c = 0; c < grid_.cell_count(); ++c) {
            const auto& net = grid_.patches()[c];
            for (std::size_t k = 0; k < n; ++k) {
                if (net.degrees()[k] > 0) {
                    derivatives_[c * n + k] = derivative_net(net, k);
                }
            }
        }
    }

    std::size_t dimension() const noexcept { return grid_.dimension(); }
    const PatchGrid& grid() const noexcept { return grid_; }

    /// Writes F(x) into `out`. `x` must lie in [0,1]^n.
    void value(std::span<const double> x, std::span<double> out)
    {
        locate(x);
        detail::de_casteljau(grid_.patches()[cell_], local_, work_);
        std::copy_n(work_.begin(), dimension(), out.begin());
    }

    /// Writes the Jacobian dF/dx at `x` (derivative of the located cell).
    void jacobian(std::span<const double> x, Matrix& J)
    {
        const std::size_t n = dimension();
        locate(x);
        if (J.rows() != n || J.cols() != n) {
            J = Matrix(n, n);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const ControlNet& d = derivatives_[cell_ * n + k];
            if (d.dimension() == 0) {
                for (std::size_t r = 0; r < n; ++r) {
                    J(r, k) = 0.0;
                }
                continue;
            }
            detail::de_casteljau(d, local_, work_);
            const double scale = 1.0 / (grid_.breakpoints()[k][cells_[k] + 1] - grid_.breakpoints()[k][cells_[k]]);
            for (std::size_t r = 0; r < n; ++r) {
                J(r, k) = work_[r] * scale;
            }
        }
    }

private:
    void locate(std::span<const double> x)
    {
        const std::size_t n = dimension();
        cells_.resize(n);
        local_.resize(n);
        cell_ = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& bp = grid_.breakpoints()[k];
            std::size_t c = 0;
            while (c + 2 < bp.size() && x[k] > bp[c + 1]) {
                ++c;
            }
            cells_[k] = c;
            local_[k] = std::min(1.0, std::max(0.0, (x[k] - bp[c]) / (bp[c + 1] - bp[c])));
            cell_ = cell_ * (bp.size() - 1) + c;
        }
    }

    PatchGrid grid_;
    std::vector<ControlNet> derivatives_;
    std::vector<std::size_t> cells_;
    Vector local_;
    std::size_t cell_ = 0;
    std::vector<double> work_;
};

} // namespace vcert

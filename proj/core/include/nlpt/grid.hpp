#pragma once

#include "nlpt/domain.hpp"
#include "nlpt/symmat.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nlpt {

/// Uniform tensor grid over a box; nodes include both faces.
class Grid {
public:
    Grid() = default;
    Grid(BoxDomain domain, std::vector<std::size_t> resolution);

    const BoxDomain& domain() const noexcept { return domain_; }
    std::size_t dim() const noexcept { return res_.size(); }
    std::size_t size() const noexcept { return size_; }
    const std::vector<std::size_t>& resolution() const noexcept { return res_; }
    double step(std::size_t axis) const noexcept { return step_[axis]; }
    double max_step() const noexcept;
    std::size_t stride(std::size_t axis) const noexcept { return stride_[axis]; }

    std::vector<std::size_t> multi_index(std::size_t flat) const;
    std::size_t flat_index(std::span<const std::size_t> idx) const;
    std::vector<double> coords(std::size_t flat) const;
    double coord(std::size_t axis, std::size_t i) const noexcept { return domain_.lower[axis] + i * step_[axis]; }

    /// Neighbor offset by `delta` along the axes; returns false when it leaves the grid.
    bool neighbor(std::size_t flat, std::span<const int> delta, std::size_t& out) const;

    friend bool operator==(const Grid& a, const Grid& b)
    {
        return a.res_ == b.res_ && a.domain_.lower == b.domain_.lower && a.domain_.upper == b.domain_.upper;
    }

private:
    BoxDomain domain_;
    std::vector<std::size_t> res_;
    std::vector<double> step_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 0;
};

/// Node values on a Grid. Inactive nodes (mask = 0) are outside Ω; a node is interior when its full
/// second-difference stencil (axis and diagonal neighbors) is active.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(Grid grid, std::vector<double> values, std::vector<std::uint8_t> active = {});

    using PointFn = std::function<double(std::span<const double>)>;
    using MaskFn = std::function<bool(std::span<const double>)>;
    static GridFunction sample(const Grid& grid, const PointFn& fn, const MaskFn& mask = {});

    const Grid& grid() const noexcept { return grid_; }
    std::size_t dim() const noexcept { return grid_.dim(); }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    const std::vector<std::uint8_t>& mask() const noexcept { return active_; }
    bool has_mask() const noexcept { return !active_.empty(); }

    bool is_active(std::size_t flat) const noexcept { return active_.empty() || active_[flat] != 0; }
    bool is_interior(std::size_t flat) const;
    bool is_boundary(std::size_t flat) const { return is_active(flat) && !is_interior(flat); }
    std::vector<std::size_t> interior_nodes() const;
    std::vector<std::size_t> boundary_nodes() const;
    std::vector<std::size_t> active_nodes() const;

    /// sup over active nodes of |u|.
    double max_abs() const;
    /// Multilinear interpolation (cell located by clamping into the box).
    double interpolate(std::span<const double> x) const;

    GridFunction with_mask(std::vector<std::uint8_t> active) const;
    GridFunction transformed(const std::function<double(double)>& f) const;

    friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator-(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator-(const GridFunction& a);
    friend GridFunction operator+(const GridFunction& a, double c);
    friend GridFunction operator*(double s, const GridFunction& a);

    /// Throws InvalidParameter when a value at an active node is not finite.
    void require_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
    std::vector<std::uint8_t> active_;
};

GridFunction pointwise_max(const GridFunction& a, const GridFunction& b);

/// Vector-valued field on a grid with multilinear interpolation; a matrix field stores the packed
/// upper triangle (N(N+1)/2 components) per node.
class CoefficientField {
public:
    CoefficientField() = default;
    CoefficientField(Grid grid, std::size_t components, std::vector<double> values);

    static CoefficientField constant(const BoxDomain& domain, std::vector<double> value);
    static CoefficientField constant(const BoxDomain& domain, double value);
    static CoefficientField sample(const Grid& grid, std::size_t components,
                                   const std::function<void(std::span<const double>, std::span<double>)>& fn);
    static CoefficientField sample_scalar(const Grid& grid, const std::function<double(std::span<const double>)>& fn);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t components() const noexcept { return comps_; }
    const std::vector<double>& values() const noexcept { return values_; }

    void eval(std::span<const double> x, std::span<double> out) const;
    double scalar(std::span<const double> x) const;
    SymMat matrix(std::span<const double> x, std::size_t n) const;

    /// Upper bound on the Lipschitz constant of the interpolant (Euclidean in x). For several components
    /// the Frobenius combination is returned, counting off-diagonal packed entries twice when `packed_n` > 0.
    double lipschitz(std::size_t packed_n = 0) const;
    double min_value(std::size_t component = 0) const;
    double max_value(std::size_t component = 0) const;

private:
    Grid grid_;
    std::size_t comps_ = 1;
    std::vector<double> values_;
};

}  // namespace nlpt

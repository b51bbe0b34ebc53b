#include "nlpt/grid.hpp"

#include "nlpt/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace nlpt {

namespace {

constexpr std::size_t kMaxGridDim = 12;

// Locates x in the grid: base node multi-index and fractional offsets in [0, 1].
void locate(const Grid& g, std::span<const double> x, std::array<std::size_t, kMaxGridDim>& base,
            std::array<double, kMaxGridDim>& frac)
{
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const double u = (x[a] - g.domain().lower[a]) / g.step(a);
        const double cells = static_cast<double>(g.resolution()[a] - 1);
        const double c = std::clamp(u, 0.0, cells);
        std::size_t i = static_cast<std::size_t>(std::floor(c));
        if (i >= g.resolution()[a] - 1) i = g.resolution()[a] - 2;
        base[a] = i;
        frac[a] = std::clamp(c - static_cast<double>(i), 0.0, 1.0);
    }
}

template <class Visit>
void for_cell_corners(const Grid& g, std::span<const double> x, Visit&& visit)
{
    std::array<std::size_t, kMaxGridDim> base{};
    std::array<double, kMaxGridDim> frac{};
    locate(g, x, base, frac);
    const std::size_t d = g.dim();
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        double w = 1.0;
        std::size_t flat = 0;
        for (std::size_t a = 0; a < d; ++a) {
            const bool hi = (mask >> a) & 1U;
            w *= hi ? frac[a] : 1.0 - frac[a];
            flat += (base[a] + (hi ? 1 : 0)) * g.stride(a);
        }
        if (w != 0.0) visit(flat, w);
    }
}

}  // namespace

Grid::Grid(BoxDomain domain, std::vector<std::size_t> resolution) : domain_(std::move(domain)), res_(std::move(resolution))
{
    domain_.validate();
    if (res_.size() != domain_.dim()) throw InvalidParameter("Grid: resolution length must equal the domain dimension");
    if (res_.size() > kMaxGridDim) throw InvalidParameter("Grid: at most 12 dimensions");
    step_.resize(res_.size());
    stride_.resize(res_.size());
    size_ = 1;
    for (std::size_t a = res_.size(); a-- > 0;) {
        if (res_[a] < 2) throw InvalidParameter("Grid: need at least 2 nodes per axis");
        stride_[a] = size_;
        size_ *= res_[a];
        step_[a] = (domain_.upper[a] - domain_.lower[a]) / static_cast<double>(res_[a] - 1);
    }
}

double Grid::max_step() const noexcept { return step_.empty() ? 0.0 : *std::max_element(step_.begin(), step_.end()); }

std::vector<std::size_t> Grid::multi_index(std::size_t flat) const
{
    std::vector<std::size_t> idx(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        idx[a] = flat / stride_[a];
        flat %= stride_[a];
    }
    return idx;
}

std::size_t Grid::flat_index(std::span<const std::size_t> idx) const
{
    std::size_t f = 0;
    for (std::size_t a = 0; a < dim(); ++a) f += idx[a] * stride_[a];
    return f;
}

std::vector<double> Grid::coords(std::size_t flat) const
{
    std::vector<double> x(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        const std::size_t i = flat / stride_[a];
        flat %= stride_[a];
        x[a] = coord(a, i);
    }
    return x;
}

bool Grid::neighbor(std::size_t flat, std::span<const int> delta, std::size_t& out) const
{
    std::size_t rest = flat;
    std::size_t result = 0;
    for (std::size_t a = 0; a < dim(); ++a) {
        const std::size_t i = rest / stride_[a];
        rest %= stride_[a];
        const long long j = static_cast<long long>(i) + delta[a];
        if (j < 0 || j >= static_cast<long long>(res_[a])) return false;
        result += static_cast<std::size_t>(j) * stride_[a];
    }
    out = result;
    return true;
}

GridFunction::GridFunction(Grid grid, std::vector<double> values, std::vector<std::uint8_t> active)
    : grid_(std::move(grid)), values_(std::move(values)), active_(std::move(active))
{
    if (values_.size() != grid_.size())
        throw InvalidParameter("GridFunction: expected " + std::to_string(grid_.size()) + " values, got " +
                               std::to_string(values_.size()));
    if (!active_.empty() && active_.size() != grid_.size())
        throw InvalidParameter("GridFunction: mask size must equal the node count");
}

GridFunction GridFunction::sample(const Grid& grid, const PointFn& fn, const MaskFn& mask)
{
    std::vector<double> v(grid.size(), 0.0);
    std::vector<std::uint8_t> act;
    if (mask) act.assign(grid.size(), 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.coords(k);
        if (mask) {
            if (!mask(x)) continue;
            act[k] = 1;
        }
        v[k] = fn(x);
    }
    return {grid, std::move(v), std::move(act)};
}

bool GridFunction::is_interior(std::size_t flat) const
{
    if (!is_active(flat)) return false;
    const std::size_t d = dim();
    std::vector<int> delta(d, 0);
    std::size_t nb;
    auto ok = [&] { return grid_.neighbor(flat, delta, nb) && is_active(nb); };
    for (std::size_t a = 0; a < d; ++a) {
        for (int s : {-1, 1}) {
            delta[a] = s;
            if (!ok()) return false;
            delta[a] = 0;
        }
        for (std::size_t b = a + 1; b < d; ++b)
            for (int s : {-1, 1})
                for (int t : {-1, 1}) {
                    delta[a] = s;
                    delta[b] = t;
                    const bool good = ok();
                    delta[a] = 0;
                    delta[b] = 0;
                    if (!good) return false;
                }
    }
    return true;
}

std::vector<std::size_t> GridFunction::interior_nodes() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
        if (is_interior(k)) out.push_back(k);
    return out;
}

std::vector<std::size_t> GridFunction::boundary_nodes() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
        if (is_boundary(k)) out.push_back(k);
    return out;
}

std::vector<std::size_t> GridFunction::active_nodes() const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size(); ++k)
        if (is_active(k)) out.push_back(k);
    return out;
}

double GridFunction::max_abs() const
{
    double m = 0.0;
    for (std::size_t k = 0; k < size(); ++k)
        if (is_active(k)) m = std::max(m, std::abs(values_[k]));
    return m;
}

double GridFunction::interpolate(std::span<const double> x) const
{
    if (x.size() != dim()) throw InvalidParameter("interpolate: point dimension mismatch");
    double s = 0.0;
    for_cell_corners(grid_, x, [&](std::size_t flat, double w) { s += w * values_[flat]; });
    return s;
}

GridFunction GridFunction::with_mask(std::vector<std::uint8_t> active) const { return {grid_, values_, std::move(active)}; }

GridFunction GridFunction::transformed(const std::function<double(double)>& f) const
{
    GridFunction out = *this;
    for (std::size_t k = 0; k < size(); ++k)
        if (is_active(k)) out.values_[k] = f(values_[k]);
    return out;
}

namespace {

std::vector<std::uint8_t> mask_and(const GridFunction& a, const GridFunction& b)
{
    if (!a.has_mask()) return b.mask();
    if (!b.has_mask()) return a.mask();
    std::vector<std::uint8_t> m(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) m[k] = a.mask()[k] && b.mask()[k];
    return m;
}

template <class Op>
GridFunction combine(const GridFunction& a, const GridFunction& b, Op op)
{
    if (!(a.grid() == b.grid())) throw InvalidParameter("GridFunction: grids differ");
    std::vector<double> v(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) v[k] = op(a[k], b[k]);
    return {a.grid(), std::move(v), mask_and(a, b)};
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b)
{
    return combine(a, b, [](double x, double y) { return x + y; });
}

GridFunction operator-(const GridFunction& a, const GridFunction& b)
{
    return combine(a, b, [](double x, double y) { return x - y; });
}

GridFunction operator-(const GridFunction& a) { return a.transformed([](double v) { return -v; }); }

GridFunction operator+(const GridFunction& a, double c) { return a.transformed([c](double v) { return v + c; }); }

GridFunction operator*(double s, const GridFunction& a) { return a.transformed([s](double v) { return s * v; }); }

GridFunction pointwise_max(const GridFunction& a, const GridFunction& b)
{
    return combine(a, b, [](double x, double y) { return std::max(x, y); });
}

void GridFunction::require_finite() const
{
    for (std::size_t k = 0; k < size(); ++k)
        if (is_active(k) && !std::isfinite(values_[k]))
            throw InvalidParameter("GridFunction: non-finite value at node " + std::to_string(k));
}

CoefficientField::CoefficientField(Grid grid, std::size_t components, std::vector<double> values)
    : grid_(std::move(grid)), comps_(components), values_(std::move(values))
{
    if (comps_ == 0) throw InvalidParameter("CoefficientField: need at least one component");
    if (values_.size() != grid_.size() * comps_)
        throw InvalidParameter("CoefficientField: expected " + std::to_string(grid_.size() * comps_) + " values, got " +
                               std::to_string(values_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidParameter("CoefficientField: non-finite coefficient value");
}

CoefficientField CoefficientField::constant(const BoxDomain& domain, std::vector<double> value)
{
    Grid g(domain, std::vector<std::size_t>(domain.dim(), 2));
    std::vector<double> v;
    v.reserve(g.size() * value.size());
    for (std::size_t k = 0; k < g.size(); ++k) v.insert(v.end(), value.begin(), value.end());
    return {g, value.size(), std::move(v)};
}

CoefficientField CoefficientField::constant(const BoxDomain& domain, double value)
{
    return constant(domain, std::vector<double>{value});
}

CoefficientField CoefficientField::sample(const Grid& grid, std::size_t components,
                                          const std::function<void(std::span<const double>, std::span<double>)>& fn)
{
    std::vector<double> v(grid.size() * components);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.coords(k);
        fn(x, std::span<double>(v.data() + k * components, components));
    }
    return {grid, components, std::move(v)};
}

CoefficientField CoefficientField::sample_scalar(const Grid& grid, const std::function<double(std::span<const double>)>& fn)
{
    return sample(grid, 1, [&](std::span<const double> x, std::span<double> out) { out[0] = fn(x); });
}

void CoefficientField::eval(std::span<const double> x, std::span<double> out) const
{
    if (x.size() != grid_.dim()) throw InvalidParameter("CoefficientField: point dimension mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for_cell_corners(grid_, x, [&](std::size_t flat, double w) {
        for (std::size_t c = 0; c < comps_; ++c) out[c] += w * values_[flat * comps_ + c];
    });
}

double CoefficientField::scalar(std::span<const double> x) const
{
    if (x.size() != grid_.dim()) throw InvalidParameter("CoefficientField: point dimension mismatch");
    double s = 0.0;
    for_cell_corners(grid_, x, [&](std::size_t flat, double w) { s += w * values_[flat * comps_]; });
    return s;
}

SymMat CoefficientField::matrix(std::span<const double> x, std::size_t n) const
{
    if (comps_ != n * (n + 1) / 2) throw InvalidParameter("CoefficientField: not a packed symmetric matrix field");
    std::array<double, 64> buf{};
    std::vector<double> heap;
    std::span<double> out;
    if (comps_ <= buf.size())
        out = std::span<double>(buf.data(), comps_);
    else {
        heap.resize(comps_);
        out = heap;
    }
    eval(x, out);
    SymMat m(n);
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = out[c++];
    return m;
}

double CoefficientField::lipschitz(std::size_t packed_n) const
{
    const std::size_t d = grid_.dim();
    double total = 0.0;
    std::size_t c = 0;
    std::size_t row = 0, col = 0;
    for (; c < comps_; ++c) {
        double sum_sq = 0.0;
        for (std::size_t a = 0; a < d; ++a) {
            double slope = 0.0;
            for (std::size_t k = 0; k < grid_.size(); ++k) {
                const std::size_t i = (k / grid_.stride(a)) % grid_.resolution()[a];
                if (i + 1 >= grid_.resolution()[a]) continue;
                const double dv = values_[(k + grid_.stride(a)) * comps_ + c] - values_[k * comps_ + c];
                slope = std::max(slope, std::abs(dv) / grid_.step(a));
            }
            sum_sq += slope * slope;
        }
        double weight = 1.0;
        if (packed_n > 0) {
            weight = row == col ? 1.0 : 2.0;
            if (++col == packed_n) {
                ++row;
                col = row;
            }
        }
        total += weight * sum_sq;
    }
    return std::sqrt(total);
}

double CoefficientField::min_value(std::size_t component) const
{
    double m = INFINITY;
    for (std::size_t k = 0; k < grid_.size(); ++k) m = std::min(m, values_[k * comps_ + component]);
    return m;
}

double CoefficientField::max_value(std::size_t component) const
{
    double m = -INFINITY;
    for (std::size_t k = 0; k < grid_.size(); ++k) m = std::max(m, values_[k * comps_ + component]);
    return m;
}

}  // namespace nlpt

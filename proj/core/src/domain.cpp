#include "nlpt/domain.hpp"

#include "nlpt/error.hpp"
#include "nlpt/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace nlpt {

BoxDomain::BoxDomain(std::vector<double> lo, std::vector<double> hi, double margin_)
    : lower(std::move(lo)), upper(std::move(hi)), margin(margin_)
{
    validate();
}

BoxDomain BoxDomain::cube(std::size_t d, double lo, double hi, double margin)
{
    return {std::vector<double>(d, lo), std::vector<double>(d, hi), margin};
}

void BoxDomain::validate() const
{
    if (lower.empty() || lower.size() != upper.size())
        throw InvalidParameter("BoxDomain: lower and upper must be nonempty with equal length");
    double min_width = INFINITY;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || !(lower[i] < upper[i]))
            throw InvalidParameter("BoxDomain: need finite lower < upper on every axis");
        min_width = std::min(min_width, upper[i] - lower[i]);
    }
    if (!(margin >= 0.0) || !(2.0 * margin < min_width))
        throw InvalidParameter("BoxDomain: margin must be nonnegative and leave a nonempty interior");
}

double BoxDomain::diameter() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += (upper[i] - lower[i]) * (upper[i] - lower[i]);
    return std::sqrt(s);
}

std::vector<double> BoxDomain::center() const
{
    std::vector<double> c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
}

bool BoxDomain::contains(std::span<const double> x, double slack) const
{
    if (x.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
    return true;
}

bool BoxDomain::encloses(const BoxDomain& inner) const
{
    if (inner.dim() != dim()) return false;
    const double slack = 1e-12 * (1.0 + diameter());
    for (std::size_t i = 0; i < dim(); ++i)
        if (inner.lower[i] < lower[i] - slack || inner.upper[i] > upper[i] + slack) return false;
    return true;
}

BoxDomain BoxDomain::interior() const { return shrunk(margin); }

BoxDomain BoxDomain::shrunk(double by) const
{
    std::vector<double> lo = lower, hi = upper;
    for (std::size_t i = 0; i < dim(); ++i) {
        lo[i] += by;
        hi[i] -= by;
    }
    return {lo, hi, 0.0};
}

std::vector<std::vector<double>> BoxDomain::corners() const
{
    const std::size_t d = dim();
    std::vector<std::vector<double>> out;
    out.reserve(std::size_t{1} << d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        std::vector<double> c(d);
        for (std::size_t i = 0; i < d; ++i) c[i] = (mask >> i) & 1U ? upper[i] : lower[i];
        out.push_back(std::move(c));
    }
    return out;
}

void BoxDomain::clamp(std::span<double> x) const
{
    for (std::size_t i = 0; i < dim(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

std::vector<std::vector<double>> sample_points(const BoxDomain& box, std::size_t count)
{
    box.validate();
    std::vector<std::vector<double>> pts = box.corners();
    if (pts.size() > count) pts.resize(count);
    for (std::uint64_t k = 1; pts.size() < count; ++k) {
        std::vector<double> u = halton_point(k, box.dim());
        for (std::size_t i = 0; i < box.dim(); ++i) u[i] = box.lower[i] + u[i] * (box.upper[i] - box.lower[i]);
        pts.push_back(std::move(u));
    }
    return pts;
}

double distance(std::span<const double> x, std::span<const double> y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

}  // namespace nlpt

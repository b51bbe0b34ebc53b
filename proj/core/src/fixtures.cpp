#include "nlpt/fixtures.hpp"

#include "nlpt/error.hpp"

#include <cmath>
#include <numbers>

namespace nlpt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kNodes2d = 65;
constexpr std::size_t kNodes3d = 17;

struct Entry {
    const char* name;
    const char* kind;
};

constexpr Entry kEntries[] = {
    {"affine_sphere", "hyperbolic_affine_sphere"},
    {"affine_sphere_negative", "hyperbolic_affine_sphere"},
    {"perturbed_ma", "perturbed_monge_ampere"},
    {"slag_positive", "special_lagrangian"},
    {"slag_positive_3d", "special_lagrangian"},
    {"slag_crossing", "special_lagrangian"},
    {"linear", "linear"},
    {"degenerate_min_r", "degenerate_min_r"},
};

}  // namespace

CoefficientField sampled_field(const BoxDomain& domain, std::size_t nodes,
                               const std::function<double(std::span<const double>)>& fn)
{
    return CoefficientField::sample_scalar(Grid(domain, std::vector<std::size_t>(domain.dim(), nodes)), fn);
}

std::vector<std::string> fixture_names()
{
    std::vector<std::string> out;
    for (const auto& e : kEntries) out.emplace_back(e.name);
    return out;
}

std::string fixture_kind(const std::string& name)
{
    for (const auto& e : kEntries)
        if (name == e.name) return e.kind;
    throw InvalidParameter("unknown fixture '" + name + "'");
}

OperatorParams fixture_params(const std::string& name)
{
    fixture_kind(name);
    OperatorParams p;
    p.n = 2;
    p.domain = BoxDomain::cube(2, 0.0, 1.0);
    auto field = [&](const std::function<double(std::span<const double>)>& fn) {
        return sampled_field(p.domain, p.domain.dim() == 3 ? kNodes3d : kNodes2d, fn);
    };
    if (name == "affine_sphere") {
        p.fields["h"] = field([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; });
    } else if (name == "affine_sphere_negative") {
        p.fields["h"] = CoefficientField::constant(p.domain, -1.0);
    } else if (name == "perturbed_ma") {
        p.fields["m"] = field([](std::span<const double> x) { return std::sin(kPi * x[0]); });
        p.fields["h"] = field([](std::span<const double> x) { return x[0] * x[1]; });
        p.fields["M"] = CoefficientField::sample(Grid(p.domain, {kNodes2d, kNodes2d}), 3,
                                                 [](std::span<const double> x, std::span<double> out) {
                                                     const double s = 0.1 * std::sin(3.0 * kPi * x[1]);
                                                     out[0] = s;
                                                     out[1] = 0.0;
                                                     out[2] = s;
                                                 });
        p.profile = MonotoneTable({-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0});
        p.scalars["r0"] = 0.0;
    } else if (name == "slag_positive") {
        p.fields["h"] = field([](std::span<const double> x) { return kPi / 2.0 + 0.3 * std::sin(2.0 * kPi * x[0]); });
    } else if (name == "slag_positive_3d") {
        p.n = 3;
        p.domain = BoxDomain::cube(3, 0.0, 1.0);
        p.fields["h"] = field([](std::span<const double> x) { return 0.5 * std::sin(2.0 * kPi * x[0]) + 0.2 * x[1]; });
    } else if (name == "slag_crossing") {
        p.fields["h"] = field([](std::span<const double> x) { return 0.5 - x[0]; });
    } else if (name == "linear") {
        p.fields["c"] = field([](std::span<const double> x) { return 1.0 + x[0]; });
    }
    return p;
}

OperatorSpec fixture_operator(const std::string& name)
{
    OperatorSpec op = make_builtin(fixture_kind(name), fixture_params(name));
    op.label = name;
    return op;
}

ExplicitSolution affine_sphere_disc(std::size_t nodes, double c)
{
    if (nodes < 5) throw InvalidParameter("affine_sphere_disc: need at least 5 nodes per axis");
    if (!(c > 0.5)) throw InvalidParameter("affine_sphere_disc: c must exceed 1/2 so that u* < 0 on the disc");
    const BoxDomain box = BoxDomain::cube(2, -1.0, 1.0);
    const Grid grid(box, {nodes, nodes});
    auto half_sq = [](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); };
    OperatorParams p;
    p.n = 2;
    p.domain = box;
    p.fields["h"] = CoefficientField::sample_scalar(grid, [&](std::span<const double> x) { return std::pow(c - half_sq(x), 4); });
    ExplicitSolution out;
    out.op = make_builtin("hyperbolic_affine_sphere", p);
    out.op.label = "affine_sphere_disc";
    out.u = GridFunction::sample(
        grid, [&](std::span<const double> x) { return half_sq(x) - c; },
        [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] <= 1.0 + 1e-12; });
    return out;
}

}  // namespace nlpt

#include "nlpt/fieldlab.hpp"

#include "nlpt/error.hpp"
#include "nlpt/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>

namespace nlpt {

namespace {

constexpr std::size_t kNodesPerBlock = 256;
constexpr double kSemiconvexRelTol = 1e-10;
constexpr double kCompareRelTol = 1e-9;

double sq_norm(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double at(const GridFunction& u, std::size_t node, std::span<const int> delta)
{
    std::size_t nb;
    if (!u.grid().neighbor(node, delta, nb)) throw InternalDefect("stencil left the grid");
    return u[nb];
}

// Second difference of u along the lattice direction delta, divided by |delta·h|².
double second_difference(const GridFunction& u, std::size_t node, std::vector<int>& delta)
{
    const Grid& g = u.grid();
    double len2 = 0.0;
    for (std::size_t a = 0; a < g.dim(); ++a) len2 += delta[a] * delta[a] * g.step(a) * g.step(a);
    const double plus = at(u, node, delta);
    for (int& d : delta) d = -d;
    const double minus = at(u, node, delta);
    for (int& d : delta) d = -d;
    return (plus - 2.0 * u[node] + minus) / len2;
}

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* what)
{
    if (!(a.grid() == b.grid())) throw InvalidParameter(std::string(what) + ": grids differ");
}

GridFunction positive_part(const GridFunction& w)
{
    return w.transformed([](double v) { return std::max(v, 0.0); });
}

GridReport hessian_mode(const GridFunction& w, bool plus)
{
    GridReport rep;
    rep.tolerance = hessian_tolerance(w);
    for (std::size_t k : w.interior_nodes()) {
        ++rep.checked;
        if (plus && std::max(w[k], 0.0) <= rep.tolerance) continue;
        const double top = lambda_max(discrete_jet(w, k).hessian);
        if (top < -rep.tolerance) rep.fail(k, w.grid().coords(k), top, "lambda_max(D2 w) < -tol");
    }
    return rep;
}

GridReport affine_mode(const GridFunction& w)
{
    GridReport rep;
    rep.tolerance = hessian_tolerance(w);
    const Grid& g = w.grid();
    const std::size_t d = g.dim();
    std::set<std::size_t> counted;
    for (unsigned level = 0;; ++level) {
        const std::size_t parts = std::size_t{1} << level;
        std::vector<std::vector<std::size_t>> cuts(d);
        bool fine_enough = true;
        for (std::size_t a = 0; a < d; ++a) {
            const std::size_t n = g.resolution()[a] - 1;
            for (std::size_t k = 0; k <= parts; ++k) cuts[a].push_back((k * n + parts / 2) / parts);
            for (std::size_t k = 0; k < parts; ++k)
                if (cuts[a][k + 1] - cuts[a][k] < 3) fine_enough = false;
        }
        if (!fine_enough || level > 20) break;
        std::vector<std::size_t> box(d, 0);
        for (;;) {
            std::vector<std::size_t> lo(d), hi(d);
            for (std::size_t a = 0; a < d; ++a) {
                lo[a] = cuts[a][box[a]];
                hi[a] = cuts[a][box[a] + 1];
            }
            // Nodes of the box; skip boxes touching inactive nodes.
            std::vector<std::size_t> idx = lo, bnodes, inodes;
            bool usable = true;
            for (;;) {
                const std::size_t flat = g.flat_index(idx);
                if (!w.is_active(flat)) {
                    usable = false;
                    break;
                }
                bool face = false;
                for (std::size_t a = 0; a < d; ++a) face = face || idx[a] == lo[a] || idx[a] == hi[a];
                (face ? bnodes : inodes).push_back(flat);
                std::size_t a = d;
                while (a-- > 0) {
                    if (++idx[a] <= hi[a]) break;
                    idx[a] = lo[a];
                }
                if (a == static_cast<std::size_t>(-1)) break;
            }
            if (usable && !inodes.empty()) {
                std::vector<double> center(d);
                for (std::size_t a = 0; a < d; ++a) center[a] = 0.5 * (g.coord(a, lo[a]) + g.coord(a, hi[a]));
                Eigen::MatrixXd X(bnodes.size(), d + 1);
                Eigen::VectorXd y(bnodes.size());
                for (std::size_t r = 0; r < bnodes.size(); ++r) {
                    const auto x = g.coords(bnodes[r]);
                    X(r, 0) = 1.0;
                    for (std::size_t a = 0; a < d; ++a) X(r, a + 1) = x[a] - center[a];
                    y(r) = w[bnodes[r]];
                }
                const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
                auto plane = [&](std::size_t flat) {
                    const auto x = g.coords(flat);
                    double v = coef(0);
                    for (std::size_t a = 0; a < d; ++a) v += coef(a + 1) * (x[a] - center[a]);
                    return v;
                };
                double lift = -std::numeric_limits<double>::infinity();
                for (auto b : bnodes) lift = std::max(lift, w[b] - plane(b));
                for (auto k : inodes) {
                    ++rep.checked;
                    const double excess = w[k] - (plane(k) + lift);
                    if (excess > rep.tolerance && counted.insert(k).second)
                        rep.fail(k, g.coords(k), excess, "exceeds the affine majorant of a sub-box boundary");
                }
            }
            std::size_t a = d;
            while (a-- > 0) {
                if (++box[a] < parts) break;
                box[a] = 0;
            }
            if (a == static_cast<std::size_t>(-1)) break;
        }
    }
    std::sort(rep.failures.begin(), rep.failures.end(),
              [](const NodeIssue& x, const NodeIssue& y) { return x.node < y.node; });
    return rep;
}

}  // namespace

void GridReport::fail(std::size_t node, std::vector<double> x, double value, std::string detail)
{
    pass = false;
    ++failure_count;
    failed_nodes.push_back(node);
    if (failures.size() < kMaxListed) failures.push_back({node, std::move(x), value, std::move(detail)});
}

bool GridReport::failed_at(std::size_t node) const
{
    return std::find(failed_nodes.begin(), failed_nodes.end(), node) != failed_nodes.end();
}

DiscreteJet discrete_jet(const GridFunction& u, std::size_t node)
{
    if (node >= u.size() || !u.is_interior(node))
        throw InvalidParameter("discrete_jet: node " + std::to_string(node) + " lacks a full stencil");
    const Grid& g = u.grid();
    const std::size_t d = g.dim();
    DiscreteJet out;
    out.node = node;
    out.value = u[node];
    out.hessian = SymMat(d);
    std::vector<int> delta(d, 0);
    for (std::size_t a = 0; a < d; ++a) {
        delta[a] = 1;
        const double up = at(u, node, delta);
        delta[a] = -1;
        const double dn = at(u, node, delta);
        delta[a] = 0;
        out.hessian(a, a) = (up - 2.0 * u[node] + dn) / (g.step(a) * g.step(a));
        for (std::size_t b = a + 1; b < d; ++b) {
            double s = 0.0;
            for (int sa : {-1, 1})
                for (int sb : {-1, 1}) {
                    delta[a] = sa;
                    delta[b] = sb;
                    s += sa * sb * at(u, node, delta);
                }
            delta[a] = delta[b] = 0;
            out.hessian(a, b) = s / (4.0 * g.step(a) * g.step(b));
        }
    }
    return out;
}

double hessian_tolerance(const GridFunction& u)
{
    const double h = u.grid().max_step();
    return 10.0 * (1.0 + u.max_abs()) * h * h;
}

GridFunction sup_convolution(const GridFunction& u, double eps)
{
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidParameter("sup_convolution: eps must be positive");
    u.require_finite();
    const Grid& g = u.grid();
    const std::size_t d = g.dim();
    const double M = u.max_abs();
    const double radius = std::sqrt(2.0 * eps * M);

    // Lattice offsets with |z| ≤ radius.
    std::vector<std::vector<int>> offsets;
    std::vector<double> penalty;
    {
        std::vector<int> span(d);
        for (std::size_t a = 0; a < d; ++a)
            span[a] = static_cast<int>(std::min<double>(std::floor(radius / g.step(a) + 1e-12),
                                                        static_cast<double>(g.resolution()[a] - 1)));
        std::vector<int> k(d);
        for (std::size_t a = 0; a < d; ++a) k[a] = -span[a];
        for (;;) {
            double z2 = 0.0;
            for (std::size_t a = 0; a < d; ++a) z2 += (k[a] * g.step(a)) * (k[a] * g.step(a));
            if (z2 <= radius * radius * (1.0 + 1e-12)) {
                offsets.push_back(k);
                penalty.push_back(z2 / eps);
            }
            std::size_t a = d;
            while (a-- > 0) {
                if (++k[a] <= span[a]) break;
                k[a] = -span[a];
            }
            if (a == static_cast<std::size_t>(-1)) break;
        }
    }

    GridFunction out = u;
    const std::size_t blocks = (g.size() + kNodesPerBlock - 1) / kNodesPerBlock;
    parallel_blocks(blocks, [&](std::size_t b) {
        std::vector<int> neg(d);
        const std::size_t lo = b * kNodesPerBlock, hi = std::min(g.size(), lo + kNodesPerBlock);
        for (std::size_t x = lo; x < hi; ++x) {
            if (!u.is_active(x)) continue;
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t o = 0; o < offsets.size(); ++o) {
                for (std::size_t a = 0; a < d; ++a) neg[a] = -offsets[o][a];
                std::size_t y;
                if (!g.neighbor(x, neg, y) || !u.is_active(y)) continue;
                best = std::max(best, u[y] - penalty[o]);
            }
            out[x] = best;
        }
    });
    return out;
}

GridReport check_semiconvex(const GridFunction& u, double lambda)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidParameter("check_semiconvex: lambda must be >= 0");
    const Grid& g = u.grid();
    const std::size_t d = g.dim();
    GridFunction w = u;
    for (std::size_t k = 0; k < g.size(); ++k) w[k] += 0.5 * lambda * sq_norm(g.coords(k));
    double hmin = g.step(0);
    for (std::size_t a = 1; a < d; ++a) hmin = std::min(hmin, g.step(a));
    GridReport rep;
    rep.tolerance = kSemiconvexRelTol * (1.0 + w.max_abs()) / (hmin * hmin);
    std::vector<int> delta(d, 0);
    for (std::size_t k : u.interior_nodes()) {
        ++rep.checked;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < d; ++a) {
            std::fill(delta.begin(), delta.end(), 0);
            delta[a] = 1;
            worst = std::min(worst, second_difference(w, k, delta));
            for (std::size_t b = a + 1; b < d; ++b)
                for (int s : {-1, 1}) {
                    std::fill(delta.begin(), delta.end(), 0);
                    delta[a] = 1;
                    delta[b] = s;
                    worst = std::min(worst, second_difference(w, k, delta));
                }
        }
        if (worst < -rep.tolerance) rep.fail(k, g.coords(k), worst, "negative second difference of u + lambda|x|^2/2");
    }
    return rep;
}

GridReport check_subaffine(const GridFunction& w, SubaffineMode mode, SubaffineMode inner)
{
    w.require_finite();
    switch (mode) {
    case SubaffineMode::Hessian: return hessian_mode(w, false);
    case SubaffineMode::AffineComparison: return affine_mode(w);
    case SubaffineMode::Plus:
        if (inner == SubaffineMode::Plus) throw InvalidParameter("check_subaffine: plus mode needs a base test");
        // w⁺ = w near any node with w > 0, so the Hessian variant reads D²w there; clipping would only
        // perturb stencils that straddle the zero set.
        return inner == SubaffineMode::Hessian ? hessian_mode(w, true) : affine_mode(positive_part(w));
    }
    throw InvalidParameter("check_subaffine: unknown mode");
}

GridReport check_qdual_subharmonic(const GridFunction& w)
{
    w.require_finite();
    GridReport rep;
    rep.tolerance = hessian_tolerance(w);
    for (std::size_t k : w.interior_nodes()) {
        ++rep.checked;
        if (w[k] <= rep.tolerance) continue;
        const double top = lambda_max(discrete_jet(w, k).hessian);
        if (top < -rep.tolerance) rep.fail(k, w.grid().coords(k), top, "w > 0 and lambda_max(D2 w) < -tol");
    }
    return rep;
}

GridReport check_subharmonic(const GridFunction& u, const JetMap& m, Side side)
{
    if (u.dim() != m.jet_dim()) throw InvalidParameter("check_subharmonic: grid dimension must equal the jet dimension");
    if (u.dim() != m.domain().dim()) throw InvalidParameter("check_subharmonic: grid and map domains differ in dimension");
    u.require_finite();
    const JetMap target = side == Side::Sub ? m : dual_map(m);
    GridReport rep;
    rep.tolerance = hessian_tolerance(u);
    for (std::size_t k : u.interior_nodes()) {
        ++rep.checked;
        Jet j = discrete_jet(u, k).jet();
        if (side == Side::Super) j = -j;
        const auto x = u.grid().coords(k);
        const auto v = target.membership(x, j.along_ray(rep.tolerance));
        if (v.region == Region::Outside)
            rep.fail(k, x, v.margin, side == Side::Sub ? "jet outside Theta(x)" : "negated jet outside the dual fiber");
    }
    return rep;
}

ComparisonVerdict zmp_check(const GridFunction& w)
{
    ComparisonVerdict out;
    out.preconditions.push_back(check_qdual_subharmonic(w));
    out.tolerance = hessian_tolerance(w);
    if (!out.preconditions.back().pass) {
        out.pass = false;
        out.precondition_ok = false;
        out.precondition_failed = "w";
        return out;
    }
    for (std::size_t k : w.boundary_nodes())
        if (w[k] > out.tolerance) out.boundary_ok = false;
    if (!out.boundary_ok) return out;
    for (std::size_t k : w.active_nodes()) {
        if (w[k] > out.tolerance) {
            out.violations.push_back({k, w.grid().coords(k), w[k], "w > 0 inside"});
            out.max_violation = std::max(out.max_violation, w[k]);
        }
    }
    out.pass = out.violations.empty();
    out.theorem_contradiction = !out.pass;
    return out;
}

AdditionReport subharmonic_addition_test(const GridFunction& u, const GridFunction& utilde, const JetMap& m)
{
    require_same_grid(u, utilde, "subharmonic_addition_test");
    AdditionReport rep;
    rep.u_sub = check_subharmonic(u, m, Side::Sub);
    rep.utilde_sub = check_subharmonic(utilde, dual_map(m), Side::Sub);
    if (!rep.u_sub.pass) rep.failed_input = "u";
    else if (!rep.utilde_sub.pass) rep.failed_input = "utilde";
    if (!rep.failed_input.empty()) return rep;
    rep.sum = check_qdual_subharmonic(u + utilde);
    rep.pass = rep.sum.pass;
    return rep;
}

ComparisonVerdict compare(const GridFunction& u, const GridFunction& v, const JetMap& m)
{
    require_same_grid(u, v, "compare");
    ComparisonVerdict out;
    out.preconditions.push_back(check_subharmonic(u, m, Side::Sub));
    out.preconditions.push_back(check_subharmonic(v, m, Side::Super));
    if (!out.preconditions[0].pass) out.precondition_failed = "u";
    else if (!out.preconditions[1].pass) out.precondition_failed = "v";
    out.precondition_ok = out.precondition_failed.empty();
    out.tolerance = kCompareRelTol * (1.0 + u.max_abs() + v.max_abs());
    for (std::size_t k : u.boundary_nodes())
        if (u[k] - v[k] > out.tolerance) out.boundary_ok = false;
    if (out.boundary_ok) {
        for (std::size_t k : u.active_nodes()) {
            const double gap = u[k] - v[k];
            if (gap > out.tolerance) {
                out.violations.push_back({k, u.grid().coords(k), gap, "u > v"});
                out.max_violation = std::max(out.max_violation, gap);
            }
        }
    }
    out.pass = out.precondition_ok && out.violations.empty();
    out.theorem_contradiction = out.precondition_ok && out.boundary_ok && !out.violations.empty();
    return out;
}

GridFunction translate_perturb(const GridFunction& u, std::span<const double> y, double eta,
                               std::optional<double> margin)
{
    const Grid& g = u.grid();
    if (y.size() != g.dim()) throw InvalidParameter("translate_perturb: y has the wrong dimension");
    if (!(eta >= 0.0)) throw InvalidParameter("translate_perturb: eta must be >= 0");
    const double mg = margin.value_or(g.domain().margin);
    const double ny = std::sqrt(sq_norm(y));
    if (!(ny < mg) && ny != 0.0) throw InvalidParameter("translate_perturb: |y| must be below the margin");
    double sup2 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) sup2 = std::max(sup2, sq_norm(g.coords(k)));
    const double omega = 2.0 + sup2;

    // Nodes at distance > margin from inactive nodes and from the box faces.
    const std::size_t d = g.dim();
    std::vector<int> reach(d);
    for (std::size_t a = 0; a < d; ++a) reach[a] = static_cast<int>(std::ceil(mg / g.step(a)));
    std::vector<std::uint8_t> keep(g.size(), 0);
    std::vector<double> vals(g.size(), 0.0);
    std::vector<int> k(d);
    for (std::size_t node = 0; node < g.size(); ++node) {
        if (!u.is_active(node)) continue;
        const auto x = g.coords(node);
        bool ok = true;
        for (std::size_t a = 0; a < d && ok; ++a)
            ok = x[a] - g.domain().lower[a] > mg && g.domain().upper[a] - x[a] > mg;
        if (ok && mg > 0.0 && u.has_mask()) {
            for (std::size_t a = 0; a < d; ++a) k[a] = -reach[a];
            for (;;) {
                double z2 = 0.0;
                for (std::size_t a = 0; a < d; ++a) z2 += (k[a] * g.step(a)) * (k[a] * g.step(a));
                std::size_t nb;
                if (z2 <= mg * mg && (!g.neighbor(node, k, nb) || !u.is_active(nb))) {
                    ok = false;
                    break;
                }
                std::size_t a = d;
                while (a-- > 0) {
                    if (++k[a] <= reach[a]) break;
                    k[a] = -reach[a];
                }
                if (a == static_cast<std::size_t>(-1)) break;
            }
        }
        if (mg == 0.0) ok = true;
        if (!ok) continue;
        keep[node] = 1;
        std::vector<double> xy = x;
        for (std::size_t a = 0; a < d; ++a) xy[a] += y[a];
        vals[node] = u.interpolate(xy) + 0.5 * eta * (sq_norm(x) - omega);
    }
    return GridFunction(g, std::move(vals), std::move(keep));
}

}  // namespace nlpt

#include "nlpt/slag.hpp"

#include "nlpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlpt {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Proposal blocks use a = 2^m for m = 0..kProposalOctaves.
constexpr int kProposalOctaves = 24;
// Witness sequences stop once h − θ_k is this small.
constexpr double kMinSeparation = 1e-6;

double diag_phase(std::size_t n, std::size_t k, double a, double b, double shift)
{
    return static_cast<double>(k) * std::atan(-a + shift) + static_cast<double>(n - k) * std::atan(b + shift);
}

SymMat block_matrix(std::size_t n, std::size_t k, double a, double b)
{
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = i < k ? -a : b;
    return SymMat::diagonal(d);
}

}  // namespace

double G_eval(const SymMat& a)
{
    double s = 0.0;
    for (double l : eigenvalues(a)) s += std::atan(l);
    return s;
}

double special_value(std::size_t n, std::size_t k)
{
    if (k > n) throw InvalidParameter("special_value: k must be at most N");
    return (static_cast<double>(n) - 2.0 * static_cast<double>(k)) * kHalfPi;
}

std::optional<std::size_t> PhasePartition::interval_of(double lo, double hi) const
{
    for (std::size_t k = 1; k <= intervals.size(); ++k) {
        const Interval& I = intervals[k - 1];
        if (I.lo < lo && hi < I.hi) return k;
    }
    return std::nullopt;
}

PhasePartition phase_partition(std::size_t n)
{
    if (n == 0) throw InvalidParameter("phase_partition: N must be at least 1");
    PhasePartition p;
    p.n = n;
    for (std::size_t k = 1; k < n; ++k) p.special_values.push_back(special_value(n, k));
    for (std::size_t k = 1; k <= n; ++k) p.intervals.push_back({special_value(n, k), special_value(n, k - 1)});
    return p;
}

EigBound eig_bound(Interval sigma, std::size_t n)
{
    if (n == 0) throw InvalidParameter("eig_bound: N must be at least 1");
    const double edge = static_cast<double>(n) * kHalfPi;
    if (!std::isfinite(sigma.lo) || !std::isfinite(sigma.hi) || sigma.lo > sigma.hi)
        throw InvalidParameter("eig_bound: sigma must be a finite interval with lo <= hi");
    if (sigma.lo < -edge || sigma.hi > edge) throw InvalidParameter("eig_bound: sigma must lie in [-N pi/2, N pi/2]");
    const auto part = phase_partition(n);
    EigBound out;
    const auto k = part.interval_of(sigma.lo, sigma.hi);
    if (!k) return out;
    const Interval& I = part.intervals[*k - 1];
    out.bounded = true;
    out.interval = *k;
    out.dist = std::min(sigma.lo - I.lo, I.hi - sigma.hi);
    out.c = std::tan(kHalfPi - out.dist / static_cast<double>(n));
    return out;
}

std::optional<FailureWitness> level_witness(std::size_t n, std::size_t k, double level, double a)
{
    if (k < 1 || k >= n) throw InvalidParameter("failure_witness: k must satisfy 1 <= k <= N-1");
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("failure_witness: a must be positive");
    const double arg = (level + static_cast<double>(k) * std::atan(a)) / static_cast<double>(n - k);
    if (!(arg > 0.0) || arg >= kHalfPi) return std::nullopt;
    const double b = std::tan(arg);
    if (!(b > 0.0) || !std::isfinite(b)) return std::nullopt;
    FailureWitness w;
    w.n = n;
    w.k = k;
    w.level = level;
    w.a = a;
    w.b = b;
    w.matrix = block_matrix(n, k, a, b);
    w.phase_error = diag_phase(n, k, a, b, 0.0) - level;
    w.gap = diag_phase(n, k, a, b, 1.0) - level;
    return w;
}

std::optional<FailureWitness> block_witness(std::size_t n, std::size_t k, double a)
{
    if (k < 1 || k >= n) throw InvalidParameter("failure_witness: k must satisfy 1 <= k <= N-1");
    return level_witness(n, k, special_value(n, k), a);
}

FailureWitness failure_witness(std::size_t n, std::size_t k, double target_gap)
{
    if (k < 1 || k >= n) throw InvalidParameter("failure_witness: k must satisfy 1 <= k <= N-1");
    if (!(target_gap > 0.0)) throw InvalidParameter("failure_witness: target_gap must be positive");
    for (double a = 1.0; a < 0x1p60; a *= 2.0) {
        auto w = block_witness(n, k, a);
        if (w && w->gap > 0.0 && w->gap < target_gap) return *w;
    }
    throw InternalDefect("failure_witness: gap did not fall below the target before a = 2^60");
}

JetMap slag_map(const CoefficientField& h, std::size_t n, std::string label)
{
    if (h.components() != 1) throw InvalidParameter("slag_map: h must be a scalar field");
    const BoxDomain dom = h.grid().domain();
    JetMap m(dom, n, [h](std::span<const double> x, const Jet& j) { return G_eval(j.a) - h.scalar(x); },
             std::move(label));
    if (n < 2) return m;
    return m.with_proposals([h, n](std::span<const double> x, JetSampler&) {
        std::vector<Jet> out;
        const double level = h.scalar(x);
        for (int m = 0; m <= kProposalOctaves; ++m)
            for (std::size_t k = 1; k < n; ++k)
                if (auto w = level_witness(n, k, level, std::ldexp(1.0, m))) out.push_back({0.0, w->matrix});
        // Largest a first: those are the jets whose translates gain the least.
        std::reverse(out.begin(), out.end());
        return out;
    });
}

// ---------------------------------------------------------------- certificate

namespace {

struct Crossing {
    std::size_t k = 0;
    std::size_t from = 0;  // h(from) on the opposite side of θ_k from `to`, or equal to it
    std::size_t to = 0;    // h(to) ≠ θ_k
    bool above = true;
};

std::optional<Crossing> find_crossing(const GridFunction& h, std::size_t n, std::size_t k)
{
    const Grid& g = h.grid();
    const double theta = special_value(n, k);
    std::optional<Crossing> below;
    std::vector<int> delta(g.dim(), 0);
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!h.is_active(p)) continue;
        for (std::size_t ax = 0; ax < g.dim(); ++ax) {
            std::fill(delta.begin(), delta.end(), 0);
            delta[ax] = 1;
            std::size_t q;
            if (!g.neighbor(p, delta, q) || !h.is_active(q)) continue;
            const double sp = h[p] - theta, sq = h[q] - theta;
            if (sp > 0.0 && sq <= 0.0) return Crossing{k, q, p, true};
            if (sq > 0.0 && sp <= 0.0) return Crossing{k, p, q, true};
            if (!below) {
                if (sp < 0.0 && sq >= 0.0) below = Crossing{k, q, p, false};
                else if (sq < 0.0 && sp >= 0.0) below = Crossing{k, p, q, false};
            }
        }
    }
    return below;
}

}  // namespace

SlagCertificate certify_slag_continuity(const GridFunction& h, std::size_t n, const std::vector<double>& etas,
                                        const SampleBox& box, const SampleBudget& validation)
{
    if (n == 0) throw InvalidParameter("certify_slag_continuity: N must be at least 1");
    if (etas.empty()) throw InvalidParameter("certify_slag_continuity: eta grid is empty");
    for (double e : etas)
        if (!(e > 0.0) || !std::isfinite(e)) throw InvalidParameter("certify_slag_continuity: eta values must be positive");
    h.require_finite();

    SlagCertificate cert;
    cert.n = n;
    cert.partition = phase_partition(n);
    const auto nodes = h.active_nodes();
    if (nodes.empty()) throw InvalidParameter("certify_slag_continuity: h has no active nodes");
    cert.h_min = cert.h_max = h[nodes.front()];
    for (auto i : nodes) {
        cert.h_min = std::min(cert.h_min, h[i]);
        cert.h_max = std::max(cert.h_max, h[i]);
    }
    const double edge = static_cast<double>(n) * kHalfPi;
    if (!(cert.h_min > -edge && cert.h_max < edge))
        throw InvalidParameter("certify_slag_continuity: h must take values in (-N pi/2, N pi/2)");

    const CoefficientField field(h.grid(), 1, h.values());
    const JetMap map = slag_map(field, n);
    const BoxDomain& region = h.grid().domain();
    const double diam = region.diameter();
    cert.lipschitz = field.lipschitz();

    auto& cc = cert.continuity;
    cc.map_label = map.label();
    cc.criterion = "slag-phase";
    cc.budget = validation;
    cc.seed = box.seed;

    const bool constant = cert.h_min == cert.h_max;
    cert.interval = cert.partition.interval_of(cert.h_min, cert.h_max);
    if (cert.interval || constant) {
        std::vector<double> target(etas.size()), delta(etas.size());
        if (constant) {
            for (std::size_t i = 0; i < etas.size(); ++i) {
                target[i] = std::numeric_limits<double>::infinity();
                delta[i] = diam;
            }
        } else {
            const Interval I = cert.partition.intervals[*cert.interval - 1];
            cert.epsilon = 0.5 * (I.hi - cert.h_max);
            cert.bound = eig_bound({cert.h_min, cert.h_max + cert.epsilon}, n);
            if (!cert.bound.bounded) throw InternalDefect("certify_slag_continuity: sigma left the phase interval");
            const double C = cert.bound.c;
            for (std::size_t i = 0; i < etas.size(); ++i) {
                target[i] = std::min(cert.epsilon, std::min(etas[i], C) / (1.0 + 4.0 * C * C));
                delta[i] = cert.lipschitz > 0.0 ? std::min(diam, 0.99 * target[i] / cert.lipschitz) : diam;
            }
        }
        bool violated = false;
        const ContinuitySearch search = translation_search(map, region, box, validation);
        for (std::size_t i = 0; i < etas.size(); ++i) {
            SlagTableRow row{etas[i], target[i], delta[i], 0, 0};
            const auto cell = search.cell(etas[i], delta[i]);
            row.validated = cell.evaluations;
            row.violations = cell.violations;
            cc.cells += 1;
            cc.evaluations += cell.evaluations;
            EtaRow er;
            er.eta = etas[i];
            er.delta = delta[i];
            er.extras["target"] = target[i];
            er.extras["violations"] = static_cast<double>(cell.violations);
            if (cell.witness && !cc.witness) cc.witness = cell.witness;
            violated = violated || cell.violations > 0;
            cc.rows.push_back(std::move(er));
            cert.table.push_back(row);
        }
        // A violation here means the constructive bound is wrong; never report it as certified.
        cc.verdict = violated ? Verdict::Inconclusive : Verdict::Certified;
        return cert;
    }

    // Range meets a special value (endpoints are excluded above).
    std::optional<Crossing> cross;
    for (std::size_t k = 1; k < n && !cross; ++k) {
        const double theta = special_value(n, k);
        if (cert.h_min <= theta && theta <= cert.h_max) {
            cert.crossed_k = k;
            cross = find_crossing(h, n, k);
        }
    }
    if (!cross) {
        cc.verdict = Verdict::Inconclusive;
        for (double e : etas) cc.rows.push_back(EtaRow{e, std::nullopt, 0, 0, {}});
        return cert;
    }
    const std::size_t k = cross->k;
    const double theta = special_value(n, k);
    const Grid& g = h.grid();
    const auto pf = g.coords(cross->from), pt = g.coords(cross->to);
    const double hf = h[cross->from], ht = h[cross->to];
    const double s = (theta - hf) / (ht - hf);  // in [0, 1)
    std::vector<double> x0(pf.size());
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = pf[i] + s * (pt[i] - pf[i]);

    // x_m = x0 + 2^{-m}(node − x0); h is affine along the edge, so h(x_m) − θ_k halves each step.
    for (int m = 0; m < 40; ++m) {
        const double f = std::ldexp(1.0, -m);
        std::vector<double> xm(x0.size());
        for (std::size_t i = 0; i < xm.size(); ++i) xm[i] = x0[i] + f * (pt[i] - x0[i]);
        const double hm = m == 0 ? ht : theta + f * (ht - theta);
        const double sep = std::abs(hm - theta);
        if (sep < kMinSeparation) break;
        SlagWitness w;
        w.crossing = x0;
        w.point = xm;
        w.h_point = hm;
        w.above = cross->above;
        if (cross->above) {
            w.block = failure_witness(n, k, 0.5 * sep);
        } else {
            // Jet on ∂Θ(x_m) at level h(x_m) < θ_k whose translate stays below θ_k.
            std::optional<FailureWitness> lw;
            for (double a = 1.0; a < 0x1p60; a *= 2.0) {
                lw = level_witness(n, k, hm, a);
                if (lw && lw->gap + (hm - theta) < -0.5 * sep) break;
                lw.reset();
            }
            if (!lw) break;
            w.block = *lw;
        }
        cert.witnesses.push_back(std::move(w));
    }

    // Generic witness for the smallest η: Inside at one end, translate Outside at the other.
    const double tol = map.boundary_tol();
    const double eta = *std::min_element(etas.begin(), etas.end());
    if (!cert.witnesses.empty()) {
        const SlagWitness* w0 = &cert.witnesses.front();
        const std::vector<double>& xin = w0->above ? w0->crossing : w0->point;
        const std::vector<double>& yout = w0->above ? w0->point : w0->crossing;
        const double level = field.scalar(xin) + 4.0 * tol;
        for (double a = 1.0; a < 0x1p60; a *= 2.0) {
            auto lw = level_witness(n, k, level, a);
            if (!lw) continue;
            Jet j{0.0, lw->matrix};
            Jet tr{-eta, SymMat::identity(n, eta)};
            const double moved = map.margin(yout, j + tr);
            if (moved < -10.0 * tol && map.margin(xin, j) > tol) {
                cc.witness = ContinuityWitness{xin, yout, j, tr, eta, distance(xin, yout), map.margin(xin, j), moved};
                break;
            }
        }
    }
    for (double e : etas) cc.rows.push_back(EtaRow{e, std::nullopt, 0, 0, {}});
    cc.verdict = cert.witnesses.empty() ? Verdict::Inconclusive : Verdict::Refuted;
    return cert;
}

}  // namespace nlpt

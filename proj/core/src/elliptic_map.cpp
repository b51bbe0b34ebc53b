#include "nlpt/elliptic_map.hpp"

#include "nlpt/error.hpp"
#include "nlpt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlpt {

namespace {

constexpr std::size_t kPairsPerBlock = 32;
constexpr double kTauCap = 1e8;

Jet scaled_identity_jet(std::size_t n, double r, double a)
{
    return {r, SymMat::identity(n, a)};
}

void check_finite(double v, const std::string& label, const Jet& j)
{
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "map '" << label << "' is not finite at " << j;
        throw EvaluationError(os.str(), j);
    }
}

void validate_etas(const std::vector<double>& etas)
{
    if (etas.empty()) throw InvalidParameter("continuity check: eta grid is empty");
    for (double e : etas)
        if (!(e > 0.0) || !std::isfinite(e)) throw InvalidParameter("continuity check: eta values must be positive");
}

void validate_budget(const SampleBudget& b)
{
    if (b.pairs == 0 || b.jets_per_pair == 0) throw InvalidParameter("continuity check: empty sample budget");
    if (b.max_halvings < 0 || b.max_halvings > 60) throw InvalidParameter("continuity check: max_halvings out of range");
}

}  // namespace

// ---------------------------------------------------------------- JetMap

JetMap::JetMap(BoxDomain domain, std::size_t jet_dim, MapFn g, std::string label, double boundary_tol)
    : domain_(std::move(domain)),
      n_(jet_dim),
      g_(std::make_shared<const MapFn>(std::move(g))),
      label_(std::move(label)),
      tol_(boundary_tol)
{
    domain_.validate();
    if (n_ == 0) throw InvalidParameter("JetMap: jet dimension must be at least 1");
    if (!(tol_ > 0.0)) throw InvalidParameter("JetMap: boundary_tol must be positive");
}

JetMap JetMap::constant(const ConstraintSet& s, BoxDomain domain)
{
    auto fn = s.defining_fn();
    JetMap m(std::move(domain), s.dim(), [fn](std::span<const double>, const Jet& j) { return fn(j); }, s.label(),
             s.boundary_tol());
    m.improper_ = s.improper();
    return m;
}

MembershipVerdict JetMap::membership(std::span<const double> x, const Jet& j) const
{
    if (j.dim() != n_) throw InvalidParameter("JetMap::membership: jet dimension mismatch");
    if (x.size() != domain_.dim()) throw InvalidParameter("JetMap::membership: point dimension mismatch");
    const double v = (*g_)(x, j);
    check_finite(v, label_, j);
    return classify_margin(v, tol_);
}

ConstraintSet JetMap::fiber(std::span<const double> x) const
{
    if (improper_) return ConstraintSet::improper_set(n_);
    std::vector<double> at(x.begin(), x.end());
    auto g = g_;
    return ConstraintSet(n_, [g, at](const Jet& j) { return (*g)(at, j); }, label_, true, tol_);
}

JetMap JetMap::with_label(std::string label) const
{
    JetMap m = *this;
    m.label_ = std::move(label);
    return m;
}

JetMap JetMap::with_proposals(ProposalFn p) const
{
    JetMap m = *this;
    m.proposals_ = std::move(p);
    return m;
}

JetMap JetMap::with_boundary_tol(double tol) const
{
    if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidParameter("JetMap: boundary_tol must be positive");
    JetMap m = *this;
    m.tol_ = tol;
    return m;
}

JetMap dual_map(const JetMap& m)
{
    auto g = m.fn();
    JetMap d(m.domain(), m.jet_dim(), [g](std::span<const double> x, const Jet& j) { return -g(x, -j); },
             m.label() + "~", m.boundary_tol());
    if (m.improper()) {
        // The dual of all of jet space is empty; keep it as an ordinary (never-satisfied) map.
        d = JetMap(m.domain(), m.jet_dim(), [](std::span<const double>, const Jet&) { return -1.0; },
                   m.label() + "~", m.boundary_tol());
    }
    if (m.proposals()) {
        auto p = m.proposals();
        d = d.with_proposals([p](std::span<const double> x, JetSampler& s) {
            auto jets = p(x, s);
            for (auto& j : jets) j = -j;
            return jets;
        });
    }
    return d;
}

double psi(double r, double M) noexcept { return std::clamp(r, -M, M); }

TauResult find_tau(const JetMap& m, std::span<const std::vector<double>> xs)
{
    if (xs.empty()) throw InvalidParameter("find_tau: no sample points");
    const JetMap d = dual_map(m);
    const std::size_t n = m.jet_dim();
    const double tol = m.boundary_tol();
    auto ok = [&](double tau) {
        const Jet j = scaled_identity_jet(n, -tau, tau);
        for (const auto& x : xs) {
            if (m.membership(x, j).margin < -tol) return false;
            if (d.membership(x, j).margin < -tol) return false;
        }
        return true;
    };
    TauResult out;
    out.points = xs.size();
    if (ok(0.0)) {
        out.found = true;
        return out;
    }
    double lo = 0.0, hi = 1.0;
    while (!ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > kTauCap) return out;
    }
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid))
            hi = mid;
        else
            lo = mid;
    }
    out.found = true;
    out.tau = hi;
    return out;
}

JetMap truncate_map(const JetMap& m, double M)
{
    if (!(M > 0.0) || !std::isfinite(M)) throw InvalidParameter("truncate_map: M must be positive and finite");
    const auto pts = sample_points(m.domain(), 256);
    const TauResult t = find_tau(m, pts);
    if (!t.found) throw InvalidParameter("truncate_map: no bounded harmonic (−τ + τ|x|²/2) found below the cap");
    if (M < t.tau) {
        std::ostringstream os;
        os << "truncate_map: M = " << M << " is below the bounded-harmonic level tau = " << t.tau;
        throw InvalidParameter(os.str());
    }
    auto g = m.fn();
    std::ostringstream label;
    label << "trunc[" << M << "](" << m.label() << ")";
    JetMap out(m.domain(), m.jet_dim(),
               [g, M](std::span<const double> x, const Jet& j) {
                   Jet c = j;
                   c.r = psi(j.r, M);
                   return g(x, c);
               },
               label.str(), m.boundary_tol());
    if (m.proposals()) out = out.with_proposals(m.proposals());
    return out;
}

const char* to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Refuted: return "refuted";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<double> ContinuityCertificate::eta_grid() const
{
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.eta);
    return out;
}

std::vector<double> ContinuityCertificate::delta_for_eta() const
{
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.delta ? *r.delta : std::numeric_limits<double>::quiet_NaN());
    return out;
}

Jet sample_jet(JetSampler& s, bool heavy_tail)
{
    Jet j = s.jet();
    if (heavy_tail && s.uniform(0.0, 1.0) < 0.2) {
        const double mag = std::pow(10.0, s.uniform(1.0, 9.0));
        j.r = s.uniform(0.0, 1.0) < 0.5 ? -mag : mag;
    }
    if (heavy_tail && s.uniform(0.0, 1.0) < 0.2) j.a *= std::pow(10.0, s.uniform(1.0, 6.0));
    return j;
}

std::optional<Jet> settle_inside(const JetMap& m, std::span<const double> x, const Jet& j, const Jet& dir, double level)
{
    const auto& g = m.fn();
    std::vector<double> at(x.begin(), x.end());
    const DefiningFn fx = [&g, &at](const Jet& p) { return g(at, p); };
    const RayCrossing c = ray_crossing(fx, j, dir, level);
    if (c.found) {
        Jet p = j;
        p.r += c.t_in * dir.r;
        p.a += dir.a * c.t_in;
        return p;
    }
    if (g(at, j) >= level) return j;
    return std::nullopt;
}

// ---------------------------------------------------------------- engine

ContinuitySearch::ContinuitySearch(ContinuityProblem problem, const BoxDomain& region, const SampleBox& box,
                                   const SampleBudget& budget)
    : problem_(std::move(problem)), region_(region), box_(box), budget_(budget)
{
    validate(box_);
    validate_budget(budget_);
    region_.validate();
    const std::size_t d = region_.dim();
    // Points are used twice with antithetic offsets ±ρu, ρ ∈ [1/2, 1). Every other point probes
    // along a coordinate axis so coordinate-wise variation of the map is hit head-on.
    xs_ = sample_points(region_, (budget_.pairs + 1) / 2);
    {
        std::vector<std::vector<double>> doubled;
        doubled.reserve(2 * xs_.size());
        for (const auto& x : xs_) {
            doubled.push_back(x);
            doubled.push_back(x);
        }
        xs_ = std::move(doubled);
    }
    JetSampler offs(box_, 1, 0x5eed0ff5ULL);
    offsets_.resize(xs_.size());
    for (std::size_t p = 0; p < xs_.size(); p += 2) {
        std::vector<double> u;
        if ((p / 2) % 2 == 0) {
            u.assign(d, 0.0);
            u[(p / 4) % d] = 1.0;
        } else {
            u = offs.direction(d);
        }
        const double rho = offs.uniform(0.5, 1.0) * (1.0 - 1e-9);
        for (double& v : u) v *= rho;
        offsets_[p] = u;
        for (double& v : u) v = -v;
        offsets_[p + 1] = std::move(u);
    }
    const std::size_t pairs = xs_.size();

    jets_.resize(pairs);
    base_.resize(pairs);
    const std::size_t blocks = (pairs + kPairsPerBlock - 1) / kPairsPerBlock;
    parallel_blocks(blocks, [&](std::size_t b) {
        JetSampler sampler(box_, problem_.jet_dim, 0x1000ULL + b);
        const std::size_t lo = b * kPairsPerBlock, hi = std::min(pairs, lo + kPairsPerBlock);
        for (std::size_t i = lo; i < hi; ++i) problem_.bank(xs_[i], sampler, budget_.jets_per_pair, jets_[i], base_[i]);
    });
}

ContinuitySearch::Cell ContinuitySearch::cell(double eta, double delta) const
{
    const std::size_t pairs = xs_.size();
    const std::size_t blocks = (pairs + kPairsPerBlock - 1) / kPairsPerBlock;
    std::vector<Cell> per(blocks);
    std::atomic<std::size_t> first_witness{blocks};
    parallel_blocks(blocks, [&](std::size_t b) {
        if (b > first_witness.load()) return;
        Cell& c = per[b];
        const std::size_t lo = b * kPairsPerBlock, hi = std::min(pairs, lo + kPairsPerBlock);
        std::vector<double> y;
        for (std::size_t i = lo; i < hi; ++i) {
            y = xs_[i];
            for (std::size_t k = 0; k < y.size(); ++k) y[k] += delta * offsets_[i][k];
            region_.clamp(y);
            for (std::size_t k = 0; k < jets_[i].size(); ++k) {
                ++c.evaluations;
                ProbeResult p = problem_.probe(y, jets_[i][k], base_[i][k], eta);
                if (p.severity == 0) continue;
                ++c.violations;
                if (p.severity == 1) {
                    ++c.suspect;
                    continue;
                }
                c.witness = ContinuityWitness{xs_[i], y, jets_[i][k], std::move(p.translate), eta, delta, base_[i][k],
                                              p.moved};
                std::size_t cur = first_witness.load();
                while (b < cur && !first_witness.compare_exchange_weak(cur, b)) {
                }
                return;
            }
        }
    });
    Cell out;
    for (auto& c : per) {
        out.violations += c.violations;
        out.suspect += c.suspect;
        out.evaluations += c.evaluations;
        if (!out.witness && c.witness) out.witness = std::move(c.witness);
    }
    return out;
}

ContinuityCertificate ContinuitySearch::run(const std::vector<double>& etas) const
{
    validate_etas(etas);
    ContinuityCertificate cert;
    cert.map_label = problem_.label;
    cert.criterion = problem_.criterion;
    cert.budget = budget_;
    cert.seed = box_.seed;
    bool refuted = false, inconclusive = false;
    const double d0 = region_.diameter();
    for (double eta : etas) {
        EtaRow row;
        row.eta = eta;
        Cell last;
        for (int h = 0; h <= budget_.max_halvings; ++h) {
            const double delta = std::ldexp(d0, -h);
            last = cell(eta, delta);
            ++cert.cells;
            cert.evaluations += last.evaluations;
            row.halvings = h;
            if (last.violations == 0) {
                row.delta = delta;
                break;
            }
        }
        if (!row.delta) {
            if (last.witness) {
                refuted = true;
                if (!cert.witness) cert.witness = std::move(last.witness);
            } else {
                inconclusive = true;
                row.suspect = last.suspect;
            }
        }
        cert.rows.push_back(std::move(row));
    }
    cert.verdict = refuted ? Verdict::Refuted : inconclusive ? Verdict::Inconclusive : Verdict::Certified;
    return cert;
}

// ---------------------------------------------------------------- map continuity

namespace {

ContinuityProblem translation_problem(const JetMap& m, bool relaxed, double R)
{
    const std::size_t n = m.jet_dim();
    const double tol = m.boundary_tol();
    ContinuityProblem p;
    p.label = m.label();
    p.criterion = relaxed ? "relaxed" : "translation";
    p.jet_dim = n;
    p.bank = [m, n, tol, relaxed, R](std::span<const double> x, JetSampler& s, std::size_t count,
                                     std::vector<Jet>& jets, std::vector<double>& base) {
        JetSampler& js = s;
        auto push = [&](const Jet& j) {
            const double v = m.margin(x, j);
            check_finite(v, m.label(), j);
            if (v <= tol) return;
            jets.push_back(j);
            base.push_back(v);
        };
        if (m.proposals()) {
            const auto props = m.proposals()(x, js);
            const std::size_t cap = count / 2;
            const Jet dir = relaxed ? scaled_identity_jet(n, 0.0, 1.0) : monotone_direction(n);
            for (const auto& q : props) {
                if (jets.size() >= cap) break;
                if (relaxed && std::abs(q.r) > R) continue;
                if (auto in = settle_inside(m, x, q, dir, 2.0 * tol)) push(*in);
            }
        }
        for (std::size_t attempt = 0; jets.size() < count && attempt < 4 * count; ++attempt) {
            Jet j = sample_jet(js, !relaxed);
            Jet dir;
            if (relaxed) {
                j.r = js.uniform(-R, R);
                dir = scaled_identity_jet(n, 0.0, 1.0);
            } else {
                const double c0 = js.uniform(0.0, 1.0), c1 = js.uniform(0.0, 1.0);
                if (c0 + c1 < 1e-3) continue;
                dir = monotone_direction(n, c0, c1);
            }
            if (auto in = settle_inside(m, x, j, dir, 2.0 * tol)) push(*in);
        }
    };
    p.probe = [m, n, tol, relaxed](std::span<const double> y, const Jet& j, double, double eta) {
        ProbeResult out;
        out.translate = scaled_identity_jet(n, relaxed ? 0.0 : -eta, eta);
        const Jet moved = j + out.translate;
        out.moved = m.margin(y, moved);
        check_finite(out.moved, m.label(), moved);
        out.severity = out.moved < -10.0 * tol ? 2 : out.moved < -tol ? 1 : 0;
        return out;
    };
    return p;
}

void require_region(const JetMap& m, const BoxDomain& region)
{
    if (region.dim() != m.domain().dim()) throw InvalidParameter("continuity check: region dimension mismatch");
    if (!m.domain().encloses(region)) throw InvalidParameter("continuity check: region must lie inside the map's domain");
}

}  // namespace

ContinuityCertificate check_translation_continuity(const JetMap& m, const std::vector<double>& etas,
                                                   const BoxDomain& region, const SampleBox& box,
                                                   const SampleBudget& budget)
{
    validate_etas(etas);
    return translation_search(m, region, box, budget).run(etas);
}

ContinuityCertificate check_relaxed_continuity(const JetMap& m, double R, const std::vector<double>& etas,
                                               const BoxDomain& region, const SampleBox& box,
                                               const SampleBudget& budget)
{
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidParameter("check_relaxed_continuity: R must be positive");
    validate_etas(etas);
    return translation_search(m, region, box, budget, R).run(etas);
}

ContinuitySearch translation_search(const JetMap& m, const BoxDomain& region, const SampleBox& box,
                                    const SampleBudget& budget, std::optional<double> relaxed_R)
{
    require_region(m, region);
    return ContinuitySearch(translation_problem(m, relaxed_R.has_value(), relaxed_R.value_or(0.0)), region, box,
                            budget);
}

bool replay(const JetMap& m, const ContinuityWitness& w)
{
    const auto at_x = m.membership(w.x, w.jet);
    const auto at_y = m.membership(w.y, w.jet + w.translate);
    return at_x.region == Region::Inside && at_y.region == Region::Outside;
}

}  // namespace nlpt

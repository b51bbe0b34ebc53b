#include "nlpt/operators.hpp"

#include "nlpt/error.hpp"
#include "nlpt/parallel.hpp"
#include "nlpt/slag.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlpt {

namespace {

constexpr double kRayLimit = 1e8;

double det(const SymMat& a)
{
    double p = 1.0;
    for (double l : eigenvalues(a)) p *= l;
    return p;
}

double ipow(double base, std::size_t e)
{
    double out = 1.0;
    for (std::size_t i = 0; i < e; ++i) out *= base;
    return out;
}

const CoefficientField& need_field(const OperatorParams& p, const std::string& kind, const std::string& name,
                                   std::size_t components)
{
    auto it = p.fields.find(name);
    if (it == p.fields.end()) throw InvalidParameter(kind + ": missing coefficient field '" + name + "'");
    if (it->second.components() != components) {
        std::ostringstream os;
        os << kind << ": field '" << name << "' must have " << components << " component(s)";
        throw InvalidParameter(os.str());
    }
    if (!it->second.grid().domain().encloses(p.domain))
        throw InvalidParameter(kind + ": field '" + name + "' does not cover the operator domain");
    return it->second;
}

double scalar_or(const OperatorParams& p, const std::string& name, double fallback)
{
    auto it = p.scalars.find(name);
    return it == p.scalars.end() ? fallback : it->second;
}

JetMap constant_q(std::size_t n, const BoxDomain& dom) { return JetMap::constant(canonical(CanonicalKind::Q, n), dom); }

JetMap unconstrained(std::size_t n, const BoxDomain& dom)
{
    return JetMap::constant(ConstraintSet::improper_set(n), dom);
}

double f_tol(double f) { return kBoundaryTol * (1.0 + std::abs(f)); }

Jet offset(const Jet& j, const Jet& dir, double t)
{
    Jet p = j;
    p.r += t * dir.r;
    p.a += dir.a * t;
    return p;
}

Jet random_q_direction(JetSampler& s, std::size_t n)
{
    for (;;) {
        const double c0 = s.uniform(0.0, 1.0), c1 = s.uniform(0.0, 1.0);
        if (c0 + c1 >= 1e-3) return monotone_direction(n, c0, c1);
    }
}

// A member of Φ(x) on or near its boundary, or any jet when unconstrained.
std::optional<Jet> phi_member(const OperatorSpec& op, std::span<const double> x, JetSampler& s, bool heavy)
{
    Jet j = sample_jet(s, heavy);
    if (!op.constrained()) return j;
    return settle_inside(op.phi, x, j, random_q_direction(s, op.n), 0.0);
}

using PointCheck = std::function<std::optional<PairWitness>(std::span<const double> x, JetSampler& s,
                                                            std::size_t& samples)>;

ConditionResult run_points(const std::string& name, const std::vector<std::vector<double>>& xs, const SampleBox& box,
                           std::size_t n, std::uint64_t stream, const PointCheck& check)
{
    std::vector<std::optional<PairWitness>> found(xs.size());
    std::vector<std::size_t> counts(xs.size(), 0);
    parallel_blocks(xs.size(), [&](std::size_t i) {
        JetSampler s(box, n, stream * 0x10000ULL + i);
        found[i] = check(xs[i], s, counts[i]);
    });
    ConditionResult out;
    out.name = name;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out.samples += counts[i];
        if (found[i] && !out.witness) out.witness = std::move(found[i]);
    }
    out.verdict = out.witness ? Verdict::Refuted : Verdict::Certified;
    return out;
}

ConditionResult not_applicable(const std::string& name)
{
    ConditionResult c;
    c.name = name;
    c.applicable = false;
    return c;
}

Verdict continuity_verdict(const ContinuityCertificate& c) { return c.verdict; }

}  // namespace

// ---------------------------------------------------------------- MonotoneTable

MonotoneTable::MonotoneTable(std::vector<double> knots, std::vector<double> values)
    : t_(std::move(knots)), v_(std::move(values))
{
    if (t_.size() < 2 || t_.size() != v_.size())
        throw InvalidParameter("profile: need at least two knots with one value each");
    for (std::size_t i = 0; i < t_.size(); ++i)
        if (!std::isfinite(t_[i]) || !std::isfinite(v_[i])) throw InvalidParameter("profile: values must be finite");
    for (std::size_t i = 1; i < t_.size(); ++i) {
        if (!(t_[i] > t_[i - 1])) throw InvalidParameter("profile: knots must be strictly increasing");
        if (!(v_[i] > v_[i - 1])) throw InvalidParameter("profile: g must be strictly increasing");
    }
}

double MonotoneTable::operator()(double t) const
{
    std::size_t i;
    if (t <= t_.front())
        i = 0;
    else if (t >= t_.back())
        i = t_.size() - 2;
    else
        i = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
    const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return v_[i] + w * (v_[i + 1] - v_[i]);
}

// ---------------------------------------------------------------- builtins

std::vector<std::string> builtin_kinds()
{
    return {"hyperbolic_affine_sphere", "monge_ampere", "perturbed_monge_ampere", "special_lagrangian", "linear",
            "degenerate_min_r"};
}

OperatorSpec make_builtin(const std::string& kind, const OperatorParams& params)
{
    params.domain.validate();
    const std::size_t n = params.n;
    if (n == 0 || n > 8) throw InvalidParameter(kind + ": dimension N must be in 1..8");
    OperatorSpec op;
    op.kind = kind;
    op.label = kind;
    op.n = n;
    op.domain = params.domain;
    op.params = params;
    const BoxDomain& dom = params.domain;

    if (kind == "hyperbolic_affine_sphere") {
        const CoefficientField h = need_field(params, kind, "h", 1);
        op.eval = [h, n](std::span<const double> x, const Jet& j) { return ipow(-j.r, n + 2) * det(j.a) - h.scalar(x); };
        op.phi = constant_q(n, dom);
        const double lh = h.lipschitz();
        op.proof_slack = [lh, n](double eta, double delta) { return ipow(eta, 2 * n + 2) - lh * delta; };
    } else if (kind == "monge_ampere") {
        const CoefficientField f = need_field(params, kind, "f", 1);
        op.eval = [f](std::span<const double> x, const Jet& j) { return -j.r * det(j.a) - f.scalar(x); };
        op.phi = constant_q(n, dom);
        const double lf = f.lipschitz();
        op.proof_slack = [lf, n](double eta, double delta) { return ipow(eta, n + 1) - lf * delta; };
    } else if (kind == "perturbed_monge_ampere") {
        const CoefficientField m = need_field(params, kind, "m", 1);
        const CoefficientField M = need_field(params, kind, "M", n * (n + 1) / 2);
        const CoefficientField h = need_field(params, kind, "h", 1);
        if (!params.profile) throw InvalidParameter(kind + ": missing profile g");
        if (h.min_value() < 0.0) throw InvalidParameter(kind + ": h must be nonnegative");
        const MonotoneTable g = *params.profile;
        const double r0 = scalar_or(params, "r0", 0.0);
        if (std::abs(g(r0)) > 1e-12 * (1.0 + std::abs(g.values().back() - g.values().front())))
            throw InvalidParameter(kind + ": profile must satisfy g(r0) = 0");
        op.eval = [g, m, M, h, n](std::span<const double> x, const Jet& j) {
            return g(m.scalar(x) - j.r) * det(j.a + M.matrix(x, n)) - h.scalar(x);
        };
        op.phi = JetMap(dom, n,
                        [m, M, r0, n](std::span<const double> x, const Jet& j) {
                            return std::min(m.scalar(x) - r0 - j.r, lambda_min(j.a + M.matrix(x, n)));
                        },
                        "Phi[perturbed_monge_ampere]");
        const double lm = m.lipschitz(), lM = M.lipschitz(n), lh = h.lipschitz();
        op.proof_slack = [lm, lM, lh, g, r0, n](double eta, double delta) {
            const double half = 0.5 * eta;
            return std::min({half - lm * delta, half - lM * delta, g(r0 + half) * ipow(half, n) - lh * delta});
        };
    } else if (kind == "special_lagrangian") {
        const CoefficientField h = need_field(params, kind, "h", 1);
        op.eval = [h](std::span<const double> x, const Jet& j) { return G_eval(j.a) - h.scalar(x); };
        op.phi = unconstrained(n, dom);
        op.proposals = slag_map(h, n).proposals();
    } else if (kind == "linear") {
        const CoefficientField c = need_field(params, kind, "c", 1);
        if (c.min_value() < 0.0) throw InvalidParameter(kind + ": c must be nonnegative");
        op.eval = [c](std::span<const double> x, const Jet& j) { return j.a.trace() - c.scalar(x) * j.r; };
        op.phi = unconstrained(n, dom);
    } else if (kind == "degenerate_min_r") {
        op.eval = [](std::span<const double>, const Jet& j) { return std::min(-j.r, 0.0); };
        op.phi = unconstrained(n, dom);
        op.proof_slack = [](double, double) { return 0.0; };
    } else {
        throw InvalidParameter("make_builtin: unknown operator kind '" + kind + "'");
    }
    return op;
}

OperatorSpec with_tolerance(OperatorSpec op, double tol)
{
    op.phi = op.phi.with_boundary_tol(tol);
    op.tol = tol;
    return op;
}

JetMap theta_from_pair(const OperatorSpec& op)
{
    const OperatorFn f = op.eval;
    JetMap out;
    if (op.constrained()) {
        const MapFn gphi = op.phi.fn();
        out = JetMap(op.domain, op.n,
                     [f, gphi](std::span<const double> x, const Jet& j) { return std::min(gphi(x, j), f(x, j)); },
                     "Theta[" + op.label + "]", op.tol);
    } else {
        out = JetMap(op.domain, op.n, f, "Theta[" + op.label + "]", op.tol);
    }
    if (op.proposals) out = out.with_proposals(op.proposals);
    return out;
}

AdmissibleVerdict classify_jet(const OperatorSpec& op, std::span<const double> x, const Jet& j)
{
    if (!op.domain.contains(x, 1e-12)) throw InvalidParameter("classify_jet: x outside the operator domain");
    AdmissibleVerdict v;
    v.f = op.F(x, j);
    if (!std::isfinite(v.f)) throw EvaluationError("classify_jet: F is not finite", j);
    v.phi = op.phi.membership(x, j);
    const double tol = op.phi.boundary_tol();
    v.sub = v.f >= -tol && v.phi.region != Region::Outside;
    v.super = v.f <= tol || v.phi.region != Region::Inside;
    return v;
}

// ---------------------------------------------------------------- conditions

namespace {

ConditionResult check_pep(const OperatorSpec& op, const std::vector<std::vector<double>>& xs, const SampleBox& box,
                          std::size_t jets)
{
    const double tol = op.phi.boundary_tol();
    return run_points("PEP", xs, box, op.n, 11, [&](std::span<const double> x, JetSampler& s, std::size_t& count)
                          -> std::optional<PairWitness> {
        for (std::size_t k = 0; k < jets; ++k) {
            auto j = phi_member(op, x, s, true);
            if (!j) continue;
            const Jet q = s.q_element(s.uniform(0.0, 1.0) < 0.5 ? 1.0 : 10.0);
            const Jet moved = *j + q;
            ++count;
            if (op.constrained() && op.phi.margin(x, moved) < -tol)
                return PairWitness{{x.begin(), x.end()}, {}, *j, q, op.phi.margin(x, moved), "Phi(x) not Q-monotone"};
            const double f0 = op.F(x, *j), f1 = op.F(x, moved);
            if (f1 < f0 - kBoundaryTol * (1.0 + std::max(std::abs(f0), std::abs(f1))))
                return PairWitness{{x.begin(), x.end()}, {}, *j, q, f1 - f0, "F decreases along a Q-translate"};
        }
        return std::nullopt;
    });
}

ConditionResult check_pb1(const OperatorSpec& op, const std::vector<std::vector<double>>& xs, const SampleBox& box)
{
    constexpr int kStarts = 8;
    return run_points("PB1", xs, box, op.n, 12, [&](std::span<const double> x, JetSampler& s, std::size_t& count)
                          -> std::optional<PairWitness> {
        const Jet ray = monotone_direction(op.n);
        const ConstraintSet fiber = op.phi.fiber(x);
        std::optional<Jet> first;
        double first_value = 0.0;
        for (int start = 0; start < kStarts; ++start) {
            Jet j0 = s.jet();
            std::optional<Jet> outside;
            if (op.constrained()) {
                const RayCrossing c = ray_crossing(fiber.defining_fn(), j0, ray, 0.0, kRayLimit);
                if (!c.found) continue;
                outside = j0.along_ray(c.t_out);
                j0 = j0.along_ray(c.t_in);
            }
            ++count;
            auto f = [&](double t) {
                const Jet j = j0.along_ray(t);
                const double v = op.F(x, j);
                if (std::isnan(v)) throw EvaluationError("PB1: F is NaN", j);
                return v;
            };
            const double f0 = f(0.0);
            if (!first) {
                first = j0;
                first_value = f0;
            }
            if (f0 == 0.0) return std::nullopt;
            // F is nondecreasing in t along (−1, I); walk toward the sign change.
            if (f0 > 0.0 && op.constrained()) {
                // A zero may sit on ∂Φ itself: the bracket across the boundary changes sign.
                if (outside && op.F(x, *outside) <= 0.0) return std::nullopt;
                continue;
            }
            const double sign = f0 < 0.0 ? 1.0 : -1.0;
            for (double t = 1.0; t <= kRayLimit; t *= 2.0)
                if ((f(sign * t) >= 0.0) != (f0 >= 0.0)) return std::nullopt;
        }
        if (!first) return PairWitness{{x.begin(), x.end()}, {}, Jet{}, std::nullopt, 0.0, "no Phi member found"};
        return PairWitness{{x.begin(), x.end()}, {}, *first, std::nullopt, first_value,
                           "no zero of F on Phi(x) along the monotone ray"};
    });
}

ConditionResult check_pb2(const OperatorSpec& op, const std::vector<std::vector<double>>& xs, const SampleBox& box,
                          std::size_t jets)
{
    return run_points("PB2", xs, box, op.n, 13, [&](std::span<const double> x, JetSampler& s, std::size_t& count)
                          -> std::optional<PairWitness> {
        const ConstraintSet fiber = op.phi.fiber(x);
        for (std::size_t k = 0; k < jets; ++k) {
            const Jet j = sample_jet(s, true);
            const Jet dir = random_q_direction(s, op.n);
            const RayCrossing c = ray_crossing(fiber.defining_fn(), j, dir, 0.0, kRayLimit);
            if (!c.found) continue;
            ++count;
            const Jet in = offset(j, dir, c.t_in), out = offset(j, dir, c.t_out);
            const double fi = op.F(x, in), fo = op.F(x, out);
            // The bracket straddles ∂Φ; F at the boundary point lies within its variation across it.
            if (fi > f_tol(fi) + std::abs(fi - fo))
                return PairWitness{{x.begin(), x.end()}, {}, in, std::nullopt, fi, "F > 0 on the boundary of Phi(x)"};
        }
        return std::nullopt;
    });
}

ConditionResult check_ndc(const OperatorSpec& op, const JetMap& theta, const std::vector<std::vector<double>>& xs,
                          const SampleBox& box, std::size_t jets)
{
    const double tol = theta.boundary_tol();
    return run_points("NDC", xs, box, op.n, 14, [&](std::span<const double> x, JetSampler& s, std::size_t& count)
                          -> std::optional<PairWitness> {
        for (std::size_t k = 0; k < jets; ++k) {
            const auto jb = settle_inside(theta, x, sample_jet(s, true), random_q_direction(s, op.n), 0.0);
            if (!jb) continue;
            if (theta.margin(x, *jb) < -tol) continue;
            // jb + ε(−1, I) lies in Θ + int Q, hence in the interior of Θ.
            for (double eps : {0.1 * (1.0 + jet_norm(*jb)), 1.0}) {
                const Jet j = jb->along_ray(eps);
                ++count;
                const double f = op.F(x, j);
                if (!(f > 0.0))
                    return PairWitness{{x.begin(), x.end()}, {}, j, std::nullopt, f, "F <= 0 at an interior jet of Theta(x)"};
            }
        }
        return std::nullopt;
    });
}

ConditionResult check_fuc(const OperatorSpec& op, const std::vector<std::vector<double>>& xs, const SampleBox& box)
{
    return run_points("F_UC", xs, box, op.n, 15, [&](std::span<const double> x, JetSampler& s, std::size_t& count)
                          -> std::optional<PairWitness> {
        Jet j0;
        for (int start = 0; start < 4; ++start) {
            j0 = s.jet();
            ++count;
            for (double t = 0.0; t <= kRayLimit; t = t == 0.0 ? 1.0 : 2.0 * t)
                if (op.F(x, j0.along_ray(-t)) < 0.0) return std::nullopt;
        }
        return PairWitness{{x.begin(), x.end()}, {}, j0, std::nullopt, op.F(x, j0), "F >= 0 along (r + t, A - tI)"};
    });
}

ConditionResult from_continuity(const std::string& name, const ContinuityCertificate& c)
{
    ConditionResult r;
    r.name = name;
    r.verdict = continuity_verdict(c);
    r.samples = c.evaluations;
    if (c.witness) {
        const auto& w = *c.witness;
        r.witness = PairWitness{w.x, w.y, w.jet, w.translate, w.value_y - w.value_x,
                                name == "RC" ? "F(y, r - eta, A + eta I) < F(x, r, A)" : "translate leaves the set"};
    }
    return r;
}

}  // namespace

bool PairCertificate::pass() const
{
    for (const auto& c : conditions)
        if (c.applicable && c.verdict != Verdict::Certified) return false;
    return true;
}

const ConditionResult* PairCertificate::find(const std::string& name) const
{
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

PairCertificate certify_pair(const OperatorSpec& op, const BoxDomain& region, const SampleBox& box,
                             const PairOptions& options)
{
    validate(box);
    if (!op.domain.encloses(region)) throw InvalidParameter("certify_pair: region must lie inside the operator domain");
    const auto xs = sample_points(region, options.points);
    const JetMap theta = theta_from_pair(op);

    PairCertificate cert;
    cert.label = op.label;
    cert.conditions.push_back(check_pep(op, xs, box, options.jets_per_point));
    cert.conditions.push_back(check_pb1(op, xs, box));
    cert.conditions.push_back(op.constrained() ? check_pb2(op, xs, box, options.jets_per_point)
                                               : not_applicable("PB2"));
    cert.conditions.push_back(check_ndc(op, theta, xs, box, options.jets_per_point));
    cert.conditions.push_back(op.constrained() ? not_applicable("F_UC") : check_fuc(op, xs, box));
    if (options.run_rc) {
        cert.rc = check_RC(op, options.etas, region, box, options.rc_budget);
        cert.conditions.push_back(from_continuity("RC", *cert.rc));
    } else {
        cert.conditions.push_back(not_applicable("RC"));
    }
    if (op.constrained() && options.run_rc) {
        cert.phi_continuity = check_translation_continuity(op.phi, options.etas, region, box, options.rc_budget);
        cert.conditions.push_back(from_continuity("PHI_CONT", *cert.phi_continuity));
    } else {
        cert.conditions.push_back(not_applicable("PHI_CONT"));
    }
    return cert;
}

ContinuityCertificate check_RC(const OperatorSpec& op, const std::vector<double>& etas, const BoxDomain& region,
                               const SampleBox& box, const SampleBudget& budget)
{
    if (!op.domain.encloses(region)) throw InvalidParameter("check_RC: region must lie inside the operator domain");
    const std::size_t n = op.n;
    ContinuityProblem p;
    p.label = op.label;
    p.criterion = "RC";
    p.jet_dim = n;
    p.bank = [&op](std::span<const double> x, JetSampler& s, std::size_t count, std::vector<Jet>& jets,
                      std::vector<double>& base) {
        auto push = [&](const Jet& j) {
            const double f = op.F(x, j);
            if (!std::isfinite(f)) throw EvaluationError("check_RC: F is not finite", j);
            jets.push_back(j);
            base.push_back(f);
        };
        if (op.proposals) {
            for (const auto& q : op.proposals(x, s)) {
                if (jets.size() >= count / 2) break;
                if (!op.constrained() || op.phi.margin(x, q) >= 0.0) push(q);
            }
        }
        for (std::size_t attempt = 0; jets.size() < count && attempt < 4 * count; ++attempt) {
            auto j = phi_member(op, x, s, true);
            if (!j) continue;
            if (op.constrained() && s.uniform(0.0, 1.0) < 0.5) *j += s.q_element(s.uniform(0.0, 1.0) < 0.5 ? 1.0 : 10.0);
            push(*j);
        }
    };
    p.probe = [&op, n](std::span<const double> y, const Jet& j, double base, double eta) {
        ProbeResult out;
        out.translate = Jet{-eta, SymMat::identity(n, eta)};
        const Jet moved = j + out.translate;
        out.moved = op.F(y, moved);
        if (!std::isfinite(out.moved)) throw EvaluationError("check_RC: F is not finite", moved);
        const double drop = out.moved - base;
        const double scale = 1.0 + std::max(std::abs(base), std::abs(out.moved));
        out.severity = drop < -10.0 * kBoundaryTol * scale ? 2 : drop < -kBoundaryTol * scale ? 1 : 0;
        return out;
    };
    const ContinuitySearch search(std::move(p), region, box, budget);
    ContinuityCertificate cert = search.run(etas);

    if (op.proof_slack) {
        const double diam = region.diameter();
        for (auto& row : cert.rows) {
            const double eta = row.eta;
            double dproof = 0.0;
            if (op.proof_slack(eta, diam) >= 0.0) {
                dproof = diam;
            } else if (op.proof_slack(eta, 0.0) >= 0.0) {
                double lo = 0.0, hi = diam;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * diam; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (op.proof_slack(eta, mid) >= 0.0 ? lo : hi) = mid;
                }
                dproof = lo;
            }
            row.extras["delta_proof"] = dproof;
            row.extras["slack_at_proof"] = op.proof_slack(eta, dproof);
            if (row.delta) row.extras["slack_at_sampled"] = op.proof_slack(eta, *row.delta);
            if (dproof > 0.0) {
                const auto cell = search.cell(eta, dproof);
                row.extras["proof_violations"] = static_cast<double>(cell.violations);
                cert.cells += 1;
                cert.evaluations += cell.evaluations;
                // The halving schedule bottoms out at diameter·2^-max_halvings; below that the analytic δ,
                // checked on a clean cell, stands in for the sampled one.
                if (!row.delta && cell.violations == 0) {
                    row.delta = dproof;
                    row.extras["delta_from_proof"] = 1.0;
                }
            }
        }
        bool all = true;
        for (const auto& row : cert.rows) all = all && row.delta.has_value();
        if (all) {
            cert.verdict = Verdict::Certified;
            cert.witness.reset();
        }
    }
    return cert;
}

CorrespondenceReport correspondence_check(const OperatorSpec& op, const BoxDomain& region, const SampleBox& box,
                                          std::size_t points, std::size_t jets_per_point)
{
    validate(box);
    if (!op.domain.encloses(region))
        throw InvalidParameter("correspondence_check: region must lie inside the operator domain");
    const JetMap theta = theta_from_pair(op);
    const double tol = theta.boundary_tol();
    const std::size_t n = op.n;
    const auto xs = sample_points(region, points);
    struct Local {
        std::size_t samples = 0, skipped = 0, mismatches = 0;
        std::vector<CorrespondenceMismatch> examples;
    };
    std::vector<Local> per(xs.size());
    parallel_blocks(xs.size(), [&](std::size_t i) {
        JetSampler s(box, n, 16 * 0x10000ULL + i);
        std::vector<Jet> jets{{-1.0, SymMat(n)}, {-1.0, SymMat::identity(n)}, {1.0, SymMat::identity(n, -1.0)},
                              {0.0, SymMat(n)}};
        for (std::size_t k = 0; k < jets_per_point; ++k) jets.push_back(s.jet());
        Local& L = per[i];
        for (const auto& j : jets) {
            const double eps = 0.1 * (1.0 + jet_norm(j));
            const bool interior = theta.margin(xs[i], Jet{j.r + eps, j.a.shifted(-eps)}) >= -tol;
            const bool exterior = theta.margin(xs[i], j.along_ray(eps)) < -tol;
            if (interior == exterior) {
                ++L.skipped;
                continue;
            }
            ++L.samples;
            const auto v = classify_jet(op, xs[i], j);
            if (v.super != !interior) {
                ++L.mismatches;
                if (L.examples.size() < 8) L.examples.push_back({xs[i], j, v.f, interior, v.super});
            }
        }
    });
    CorrespondenceReport out;
    for (auto& L : per) {
        out.samples += L.samples;
        out.skipped += L.skipped;
        out.mismatches += L.mismatches;
        for (auto& e : L.examples)
            if (out.examples.size() < 16) out.examples.push_back(std::move(e));
    }
    return out;
}

}  // namespace nlpt

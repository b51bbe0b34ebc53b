#include "nlpt/constraint.hpp"

#include "nlpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlpt {

const char* to_string(Region r) noexcept
{
    switch (r) {
    case Region::Inside: return "Inside";
    case Region::Boundary: return "Boundary";
    case Region::Outside: return "Outside";
    }
    return "?";
}

MembershipVerdict classify_margin(double margin, double tol) noexcept
{
    if (margin > tol) return {Region::Inside, margin};
    if (margin < -tol) return {Region::Outside, margin};
    return {Region::Boundary, margin};
}

ConstraintSet::ConstraintSet(std::size_t dim, DefiningFn g, std::string label, bool q_monotone_declared,
                             double boundary_tol)
    : dim_(dim),
      g_(std::make_shared<const DefiningFn>(std::move(g))),
      label_(std::move(label)),
      q_monotone_(q_monotone_declared),
      tol_(boundary_tol)
{
    if (dim == 0) throw InvalidParameter("ConstraintSet: dim must be at least 1");
    if (!(boundary_tol > 0.0)) throw InvalidParameter("ConstraintSet: boundary_tol must be positive");
}

MembershipVerdict ConstraintSet::membership(const Jet& j) const
{
    if (j.dim() != dim_) throw InvalidParameter("membership: jet dimension does not match the set");
    const double g = (*g_)(j);
    if (!std::isfinite(g)) {
        std::ostringstream os;
        os << "defining function of '" << label_ << "' is not finite at " << j;
        throw EvaluationError(os.str(), j);
    }
    return classify_margin(g, tol_);
}

ConstraintSet ConstraintSet::with_tolerance(double tol) const
{
    ConstraintSet c = *this;
    if (!(tol > 0.0)) throw InvalidParameter("with_tolerance: tolerance must be positive");
    c.tol_ = tol;
    return c;
}

ConstraintSet ConstraintSet::with_label(std::string label) const
{
    ConstraintSet c = *this;
    c.label_ = std::move(label);
    return c;
}

ConstraintSet ConstraintSet::improper_set(std::size_t dim)
{
    ConstraintSet c(dim, [](const Jet&) { return 1.0; }, "J", true);
    c.improper_ = true;
    return c;
}

MembershipVerdict membership(const ConstraintSet& s, const Jet& j) { return s.membership(j); }

ConstraintSet dual(const ConstraintSet& s)
{
    const DefiningFn& g = s.defining_fn();
    std::string label = s.label().empty() ? std::string("~") : s.label() + "~";
    ConstraintSet d(s.dim(), [g](const Jet& j) { return -g(-j); }, std::move(label), s.q_monotone_declared(),
                    s.boundary_tol());
    return d;
}

ConstraintSet canonical(CanonicalKind kind, std::size_t n)
{
    if (n == 0) throw InvalidParameter("canonical: n must be at least 1");
    switch (kind) {
    case CanonicalKind::Q:
        return {n, [](const Jet& j) { return std::min(-j.r, lambda_min(j.a)); }, "Q"};
    case CanonicalKind::Qdual:
        return {n, [](const Jet& j) { return std::max(-j.r, lambda_max(j.a)); }, "Q~"};
    case CanonicalKind::P_cone:
        return {n, [](const Jet& j) { return lambda_min(j.a); }, "P"};
    case CanonicalKind::full_J:
        return ConstraintSet::improper_set(n);
    }
    throw InvalidParameter("canonical: unknown kind");
}

ConstraintSet enlarge(const ConstraintSet& s, double eps)
{
    if (!(eps >= 0.0)) throw InvalidParameter("enlarge: eps must be nonnegative");
    const DefiningFn& g = s.defining_fn();
    std::ostringstream label;
    label << "N_" << eps << "(" << s.label() << ")";
    return {s.dim(), [g, eps](const Jet& j) { return g(j.along_ray(eps)); }, label.str(), s.q_monotone_declared(),
            s.boundary_tol()};
}

Jet monotone_direction(std::size_t n, double r_weight, double a_weight)
{
    return {-r_weight, SymMat::identity(n, a_weight)};
}

RayCrossing ray_crossing(const DefiningFn& g, const Jet& j, const Jet& dir, double level, double limit)
{
    auto f = [&](double t) {
        Jet p = j;
        p.r += t * dir.r;
        p.a += dir.a * t;
        const double v = g(p) - level;
        if (std::isnan(v)) throw EvaluationError("ray_crossing: defining function returned NaN", p);
        return v;
    };
    RayCrossing out;
    const double f0 = f(0.0);
    double inside, outside;
    if (f0 >= 0.0) {
        inside = 0.0;
        double step = 1.0;
        for (;;) {
            if (step > limit) return out;
            if (f(-step) < 0.0) {
                outside = -step;
                break;
            }
            inside = -step;
            step *= 2.0;
        }
    } else {
        outside = 0.0;
        double step = 1.0;
        for (;;) {
            if (step > limit) return out;
            if (f(step) >= 0.0) {
                inside = step;
                break;
            }
            outside = step;
            step *= 2.0;
        }
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        if (std::abs(inside - outside) <= 1e-14 * (1.0 + std::abs(inside))) break;
        if (f(mid) >= 0.0)
            inside = mid;
        else
            outside = mid;
    }
    out.found = true;
    out.t_in = inside;
    out.t_out = outside;
    return out;
}

namespace {

Jet offset(const Jet& j, const Jet& dir, double t)
{
    Jet p = j;
    p.r += t * dir.r;
    p.a += dir.a * t;
    return p;
}

// A member of s near its boundary, or nullopt when the (−1, I) ray never enters s.
std::optional<Jet> boundary_member(const ConstraintSet& s, const Jet& j)
{
    const Jet dir = monotone_direction(s.dim());
    const RayCrossing c = ray_crossing(s.defining_fn(), j, dir);
    if (!c.found) {
        if (s.margin(j) >= 0.0) return j;
        return std::nullopt;
    }
    return offset(j, dir, c.t_in);
}

}  // namespace

MonotoneReport check_q_monotone(const ConstraintSet& s, const SampleBox& box)
{
    validate(box);
    const std::size_t n = s.dim();
    const double tol = s.boundary_tol();
    MonotoneReport rep;

    std::vector<Jet> generators{{-1.0, SymMat(n)}, {0.0, SymMat::identity(n)}};
    auto test = [&](const Jet& j, const Jet& q) {
        ++rep.translates_tested;
        const double m = s.margin(j + q);
        if (m < -tol || std::isnan(m)) {
            rep.pass = false;
            rep.witness_jet = j;
            rep.witness_translate = q;
            rep.witness_margin = m;
            return false;
        }
        return true;
    };
    auto run_jet = [&](const Jet& j, JetSampler* sampler) {
        if (!s.contains(j)) return true;
        ++rep.jets_tested;
        for (const Jet& q : generators)
            if (!test(j, q)) return false;
        if (sampler)
            for (int k = 0; k < 4; ++k)
                if (!test(j, sampler->q_element(box.eig_scale))) return false;
        return true;
    };

    // Deterministic probes first so that canonical witnesses such as (0,0)+(−1,0) are reported.
    if (!run_jet(Jet{0.0, SymMat(n)}, nullptr)) return rep;

    JetSampler sampler(box, n, 1);
    for (std::size_t i = 0; i < box.count; ++i) {
        const Jet j = sampler.jet();
        if (!run_jet(j, &sampler)) return rep;
        if (auto b = boundary_member(s, j))
            if (!run_jet(*b, &sampler)) return rep;
    }
    return rep;
}

DualityReport check_duality_identities(const ConstraintSet& s, const SampleBox& box)
{
    validate(box);
    const std::size_t n = s.dim();
    const double tol = s.boundary_tol();
    const double band = 10.0 * tol;
    const ConstraintSet ds = dual(s);
    const ConstraintSet dds = dual(ds);
    const ConstraintSet qd = canonical(CanonicalKind::Qdual, n);
    DualityReport rep;

    auto point_identities = [&](const Jet& p) {
        const double g = s.margin(p);
        const bool on_boundary = classify_margin(g, tol).region == Region::Boundary;
        const bool in_s = g >= -band;
        const bool in_minus_dual = ds.margin(-p) >= -band;
        const bool both = in_s && in_minus_dual;
        if (on_boundary != both && std::abs(g) > band) {
            ++rep.boundary_mismatches;
            if (!rep.boundary_witness) rep.boundary_witness = p;
        }
        if (on_boundary) {
            Jet shifted = p;
            shifted.r += 1e-6;
            shifted.a = shifted.a.shifted(-1e-6);
            if (classify_margin(s.margin(shifted), tol).region == Region::Boundary) ++rep.thick_boundary;
        }
        if (std::abs(g) > band) {
            if (classify_margin(dds.margin(p), tol).region != classify_margin(g, tol).region) {
                ++rep.double_dual_mismatches;
                if (!rep.double_dual_witness) rep.double_dual_witness = p;
            }
        }
    };

    JetSampler sampler(box, n, 2);
    for (std::size_t i = 0; i < box.count; ++i) {
        const Jet j1 = sampler.jet();
        const Jet j2 = sampler.jet();
        ++rep.samples;
        point_identities(j1);
        auto m1 = boundary_member(s, j1);
        auto m2 = boundary_member(ds, j2);
        if (m1) point_identities(*m1);
        if (m1 && m2) {
            Jet a = *m1;
            Jet b = *m2;
            if (sampler.engine()() & 1U) a += sampler.q_element(box.eig_scale);
            if (sampler.engine()() & 1U) b += sampler.q_element(box.eig_scale);
            if (qd.margin(a + b) < -band) {
                ++rep.sum_violations;
                if (!rep.sum_witness) rep.sum_witness = std::make_pair(a, b);
            }
        }
    }
    rep.pass = rep.sum_violations == 0 && rep.boundary_mismatches == 0 && rep.double_dual_mismatches == 0;
    return rep;
}

namespace {

// Distance from p to s: 0 for members, else the entry time along (−1, I), which is exact for
// Q-monotone s; random directions can only shorten it for other sets.
double distance_to(const ConstraintSet& s, const Jet& p, JetSampler& sampler)
{
    if (s.margin(p) >= -s.boundary_tol()) return 0.0;
    const std::size_t n = s.dim();
    double best = std::numeric_limits<double>::infinity();
    const RayCrossing c = ray_crossing(s.defining_fn(), p, monotone_direction(n));
    if (c.found) best = c.t_in;
    for (int k = 0; k < 4; ++k) {
        Jet dir{sampler.uniform(-1.0, 1.0), sampler.matrix(1.0)};
        const double norm = jet_norm(dir);
        if (norm == 0.0) continue;
        dir *= 1.0 / norm;
        const double cap = std::isfinite(best) ? best : 1e8;
        const RayCrossing d = ray_crossing(s.defining_fn(), p, dir, 0.0, cap);
        if (d.found && d.t_in >= 0.0) best = std::min(best, d.t_in);
    }
    return best;
}

struct OneSided {
    double value = 0.0;
    std::size_t members = 0;
};

OneSided one_sided(const ConstraintSet& from, const ConstraintSet& to, double radius, const SampleBox& box,
                   std::uint64_t stream)
{
    const std::size_t n = from.dim();
    SampleBox window = box;
    window.r_range = {-radius, radius};
    window.eig_scale = radius;
    JetSampler sampler(window, n, stream);
    const Jet outward{1.0, SymMat::identity(n, -1.0)};
    OneSided out;
    for (std::size_t i = 0; i < box.count; ++i) {
        const Jet j = sampler.jet();
        if (jet_norm(j) > radius || from.margin(j) < -from.boundary_tol()) continue;
        ++out.members;
        Jet p = j;
        // Push to the far side of `from` along the outward ray; stay in the window.
        const RayCrossing c = ray_crossing(from.defining_fn(), j, outward, 0.0, 2.0 * radius);
        if (c.found && c.t_in > 0.0) {
            Jet q = offset(j, outward, c.t_in);
            if (jet_norm(q) <= radius) p = std::move(q);
        }
        out.value = std::max(out.value, distance_to(to, p, sampler));
    }
    return out;
}

}  // namespace

HausdorffEstimate windowed_hausdorff(const ConstraintSet& s1, const ConstraintSet& s2, double window_radius,
                                     const SampleBox& box)
{
    if (!(window_radius > 0.0)) throw InvalidParameter("windowed_hausdorff: R must be positive");
    if (s1.dim() != s2.dim()) throw InvalidParameter("windowed_hausdorff: dimension mismatch");
    validate(box);
    const OneSided a = one_sided(s1, s2, window_radius, box, 3);
    const OneSided b = one_sided(s2, s1, window_radius, box, 4);
    HausdorffEstimate est;
    est.members_first = a.members;
    est.members_second = b.members;
    if (a.members == 0 || b.members == 0) {
        est.empty = true;
        est.value = std::numeric_limits<double>::infinity();
        return est;
    }
    est.value = std::max(a.value, b.value);
    return est;
}

}  // namespace nlpt

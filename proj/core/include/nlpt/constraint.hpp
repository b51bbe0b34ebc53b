#pragma once

#include "nlpt/jet.hpp"
#include "nlpt/sampling.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace nlpt {

inline constexpr double kBoundaryTol = 1e-9;

enum class Region { Inside, Boundary, Outside };

const char* to_string(Region r) noexcept;

struct MembershipVerdict {
    Region region = Region::Outside;
    double margin = 0.0;
};

/// Non-finite defining-function value; carries the offending jet.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, Jet jet) : std::runtime_error(what), jet_(std::move(jet)) {}
    const Jet& jet() const noexcept { return jet_; }

private:
    Jet jet_;
};

using DefiningFn = std::function<double(const Jet&)>;

MembershipVerdict classify_margin(double margin, double tol) noexcept;

/// One fiber {g ≥ 0} of jet space.
class ConstraintSet {
public:
    ConstraintSet(std::size_t dim, DefiningFn g, std::string label = {}, bool q_monotone_declared = true,
                  double boundary_tol = kBoundaryTol);

    std::size_t dim() const noexcept { return dim_; }
    double boundary_tol() const noexcept { return tol_; }
    bool q_monotone_declared() const noexcept { return q_monotone_; }
    /// True only for the all-of-jet-space sentinel.
    bool improper() const noexcept { return improper_; }
    const std::string& label() const noexcept { return label_; }

    /// Raw g(j); no finiteness check.
    double margin(const Jet& j) const { return (*g_)(j); }
    MembershipVerdict membership(const Jet& j) const;
    bool contains(const Jet& j) const { return membership(j).region != Region::Outside; }

    const DefiningFn& defining_fn() const noexcept { return *g_; }
    ConstraintSet with_tolerance(double tol) const;
    ConstraintSet with_label(std::string label) const;

    static ConstraintSet improper_set(std::size_t dim);

private:
    std::size_t dim_;
    std::shared_ptr<const DefiningFn> g_;
    std::string label_;
    bool q_monotone_;
    double tol_;
    bool improper_ = false;
};

MembershipVerdict membership(const ConstraintSet& s, const Jet& j);

/// Dirichlet dual through g̃(r, A) = −g(−r, −A).
ConstraintSet dual(const ConstraintSet& s);

enum class CanonicalKind { Q, Qdual, P_cone, full_J };

ConstraintSet canonical(CanonicalKind kind, std::size_t n);

/// Closed ε-enlargement {j : dist(j, s) ≤ ε} of a Q-monotone set, via g(j + (−ε, εI)).
ConstraintSet enlarge(const ConstraintSet& s, double eps);

/// Bracketed crossing of level along j + t·dir. `t_in` satisfies g ≥ level, `t_out` g < level.
struct RayCrossing {
    bool found = false;
    double t_in = 0.0;
    double t_out = 0.0;
};

/// Grows the bracket geometrically up to |t| ≤ limit in whichever direction changes the sign of
/// g − level, then bisects. dir is normally a Q-element such as (−1, I).
RayCrossing ray_crossing(const DefiningFn& g, const Jet& j, const Jet& dir, double level = 0.0,
                         double limit = 1e8);

/// (−1, I) in dimension n.
Jet monotone_direction(std::size_t n, double r_weight = 1.0, double a_weight = 1.0);

struct MonotoneReport {
    bool pass = true;
    std::size_t jets_tested = 0;
    std::size_t translates_tested = 0;
    std::optional<Jet> witness_jet;
    std::optional<Jet> witness_translate;
    double witness_margin = 0.0;
};

/// Samples members of s and Q-translates of them; fails on the first translate that is Outside.
MonotoneReport check_q_monotone(const ConstraintSet& s, const SampleBox& box);

struct DualityReport {
    bool pass = true;
    std::size_t samples = 0;
    std::size_t sum_violations = 0;
    std::size_t boundary_mismatches = 0;
    std::size_t double_dual_mismatches = 0;
    /// Boundary verdicts that persist after a (1e-6, -1e-6 I) inward shift: the {g > 0} proxy for the
    /// interior may be too small here.
    std::size_t thick_boundary = 0;
    std::optional<std::pair<Jet, Jet>> sum_witness;
    std::optional<Jet> boundary_witness;
    std::optional<Jet> double_dual_witness;
};

DualityReport check_duality_identities(const ConstraintSet& s, const SampleBox& box);

struct HausdorffEstimate {
    double value = 0.0;
    bool empty = false;
    std::size_t members_first = 0;
    std::size_t members_second = 0;
};

/// Two-sided sampled lower estimate of the Hausdorff distance of s1, s2 inside the jet-norm ball of radius R.
HausdorffEstimate windowed_hausdorff(const ConstraintSet& s1, const ConstraintSet& s2, double window_radius,
                                     const SampleBox& box);

}  // namespace nlpt

#pragma once

#include "nlpt/elliptic_map.hpp"
#include "nlpt/grid.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nlpt {

/// Strictly increasing 1-D profile with linear interpolation between knots and linear extrapolation
/// past the ends.
class MonotoneTable {
public:
    MonotoneTable() = default;
    MonotoneTable(std::vector<double> knots, std::vector<double> values);

    double operator()(double t) const;
    const std::vector<double>& knots() const noexcept { return t_; }
    const std::vector<double>& values() const noexcept { return v_; }

private:
    std::vector<double> t_;
    std::vector<double> v_;
};

/// Inputs of make_builtin. Scalar fields have one component; the matrix field M stores N(N+1)/2
/// packed components.
struct OperatorParams {
    std::size_t n = 2;
    BoxDomain domain;
    std::map<std::string, CoefficientField> fields;
    std::map<std::string, double> scalars;
    std::optional<MonotoneTable> profile;
};

using OperatorFn = std::function<double(std::span<const double> x, const Jet& j)>;
/// Lower bound of F(y, r − η, A + ηI) − F(x, r, A) over Φ(x) for |x − y| ≤ δ, when the operator has one.
using SlackFn = std::function<double(double eta, double delta)>;

struct OperatorSpec {
    std::string kind;
    std::string label;
    std::size_t n = 0;
    BoxDomain domain;
    OperatorFn eval;
    /// Improper when the operator is unconstrained.
    JetMap phi;
    OperatorParams params;
    SlackFn proof_slack;
    ProposalFn proposals;
    /// Boundary tolerance of Θ and Φ membership.
    double tol = kBoundaryTol;

    bool constrained() const noexcept { return !phi.improper(); }
    double F(std::span<const double> x, const Jet& j) const { return eval(x, j); }
};

/// Kinds: hyperbolic_affine_sphere (h), monge_ampere (f), perturbed_monge_ampere (m, M, h, profile g, r0),
/// special_lagrangian (h), linear (c), degenerate_min_r.
OperatorSpec make_builtin(const std::string& kind, const OperatorParams& params);
std::vector<std::string> builtin_kinds();

/// Copy of op with Φ and Θ membership tolerance set to tol.
OperatorSpec with_tolerance(OperatorSpec op, double tol);

/// Θ(x) = {min(g_Φ, F) ≥ 0}, or {F ≥ 0} when unconstrained.
JetMap theta_from_pair(const OperatorSpec& op);

struct AdmissibleVerdict {
    bool sub = false;
    bool super = false;
    double f = 0.0;
    MembershipVerdict phi;
};

AdmissibleVerdict classify_jet(const OperatorSpec& op, std::span<const double> x, const Jet& j);

struct PairWitness {
    std::vector<double> x;
    std::vector<double> y;
    Jet jet;
    std::optional<Jet> translate;
    double value = 0.0;
    std::string detail;
};

struct ConditionResult {
    std::string name;
    bool applicable = true;
    Verdict verdict = Verdict::Certified;
    std::size_t samples = 0;
    std::optional<PairWitness> witness;
};

struct PairCertificate {
    std::string label;
    std::vector<ConditionResult> conditions;
    std::optional<ContinuityCertificate> rc;
    std::optional<ContinuityCertificate> phi_continuity;

    /// Every applicable condition certified.
    bool pass() const;
    const ConditionResult* find(const std::string& name) const;
};

struct PairOptions {
    std::vector<double> etas{0.1, 0.5, 1.0};
    SampleBudget rc_budget;
    std::size_t points = 64;
    std::size_t jets_per_point = 64;
    bool run_rc = true;
};

/// Sampled verification of PEP, PB1, PB2, NDC, F_UC, RC and (constrained) continuity of Φ.
PairCertificate certify_pair(const OperatorSpec& op, const BoxDomain& region, const SampleBox& box,
                             const PairOptions& options = {});

/// F(y, r − η, A + ηI) ≥ F(x, r, A) − tol·(1 + |F|) on Φ(x) members. Rows carry the proof-slack table
/// (delta_proof, slack_at_proof, proof_violations) when the operator has one.
ContinuityCertificate check_RC(const OperatorSpec& op, const std::vector<double>& etas, const BoxDomain& region,
                               const SampleBox& box, const SampleBudget& budget = {});

struct CorrespondenceMismatch {
    std::vector<double> x;
    Jet jet;
    double f = 0.0;
    bool interior = false;
    bool super = false;
};

struct CorrespondenceReport {
    std::size_t samples = 0;
    std::size_t skipped = 0;
    std::size_t mismatches = 0;
    /// First mismatches in sample order.
    std::vector<CorrespondenceMismatch> examples;
    bool pass() const noexcept { return mismatches == 0; }
};

/// On robustly classified jets, the supersolution flag must equal "not interior to Θ(x)".
CorrespondenceReport correspondence_check(const OperatorSpec& op, const BoxDomain& region, const SampleBox& box,
                                          std::size_t points = 64, std::size_t jets_per_point = 64);

}  // namespace nlpt

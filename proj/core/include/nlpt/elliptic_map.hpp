#pragma once

#include "nlpt/constraint.hpp"
#include "nlpt/domain.hpp"
#include "nlpt/sampling.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlpt {

using MapFn = std::function<double(std::span<const double> x, const Jet& j)>;
/// Map-specific candidate jets on (or near) ∂Θ(x), used alongside random samples when hunting for witnesses.
using ProposalFn = std::function<std::vector<Jet>(std::span<const double> x, JetSampler& sampler)>;

/// x ↦ Θ(x) = {g(x, ·) ≥ 0} over a box domain.
class JetMap {
public:
    JetMap() = default;
    JetMap(BoxDomain domain, std::size_t jet_dim, MapFn g, std::string label, double boundary_tol = kBoundaryTol);

    static JetMap constant(const ConstraintSet& s, BoxDomain domain);

    const BoxDomain& domain() const noexcept { return domain_; }
    std::size_t jet_dim() const noexcept { return n_; }
    const std::string& label() const noexcept { return label_; }
    double boundary_tol() const noexcept { return tol_; }
    bool improper() const noexcept { return improper_; }
    const MapFn& fn() const noexcept { return *g_; }
    const ProposalFn& proposals() const noexcept { return proposals_; }

    double margin(std::span<const double> x, const Jet& j) const { return (*g_)(x, j); }
    MembershipVerdict membership(std::span<const double> x, const Jet& j) const;
    ConstraintSet fiber(std::span<const double> x) const;

    JetMap with_label(std::string label) const;
    JetMap with_proposals(ProposalFn p) const;
    /// Throws InvalidParameter unless tol > 0.
    JetMap with_boundary_tol(double tol) const;

private:
    BoxDomain domain_;
    std::size_t n_ = 0;
    std::shared_ptr<const MapFn> g_;
    std::string label_;
    double tol_ = kBoundaryTol;
    bool improper_ = false;
    ProposalFn proposals_;
};

/// x ↦ dual(Θ(x)); label suffixed "~".
JetMap dual_map(const JetMap& m);

/// ψ_M as the clamp to [−M, M].
double psi(double r, double M) noexcept;

struct TauResult {
    bool found = false;
    double tau = 0.0;
    std::size_t points = 0;
};

/// Smallest τ (relative resolution 1e-6, cap 1e8) with (−τ, τI) not Outside Θ(x) and Θ̃(x) at every point.
/// The associated bounded harmonic is −τ + (τ/2)|x|².
TauResult find_tau(const JetMap& m, std::span<const std::vector<double>> x_samples);

/// Θ_M(x) = {(r, A) : (ψ_M(r), A) ∈ Θ(x)}. Throws InvalidParameter when M is below find_tau(m).
JetMap truncate_map(const JetMap& m, double M);

enum class Verdict { Certified, Refuted, Inconclusive };
const char* to_string(Verdict v) noexcept;

struct SampleBudget {
    std::size_t pairs = 2000;
    std::size_t jets_per_pair = 50;
    int max_halvings = 20;
};

struct ContinuityWitness {
    std::vector<double> x;
    std::vector<double> y;
    Jet jet;
    Jet translate;
    double eta = 0.0;
    double delta = 0.0;
    double value_x = 0.0;
    double value_y = 0.0;
};

struct EtaRow {
    double eta = 0.0;
    std::optional<double> delta;
    int halvings = 0;
    std::size_t suspect = 0;
    std::map<std::string, double> extras;
};

struct ContinuityCertificate {
    std::string map_label;
    std::string criterion;
    std::vector<EtaRow> rows;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<ContinuityWitness> witness;
    SampleBudget budget;
    std::size_t cells = 0;
    std::size_t evaluations = 0;
    std::uint64_t seed = 0;

    std::vector<double> eta_grid() const;
    /// NaN where no δ passed.
    std::vector<double> delta_for_eta() const;
};

/// Θ(x) + (−η, ηI) ⊂ Θ(y) for |x − y| < δ, searched over the halving schedule.
ContinuityCertificate check_translation_continuity(const JetMap& m, const std::vector<double>& etas,
                                                   const BoxDomain& region, const SampleBox& box,
                                                   const SampleBudget& budget = {});

/// Θ(x) ∩ ([−R, R] × S(N)) + (0, ηI) ⊂ Θ(y); jets are moved onto ∂Θ(x) along A-only rays.
ContinuityCertificate check_relaxed_continuity(const JetMap& m, double R, const std::vector<double>& etas,
                                               const BoxDomain& region, const SampleBox& box,
                                               const SampleBudget& budget = {});

/// Re-evaluates a stored witness: Inside at x and Outside at y.
bool replay(const JetMap& m, const ContinuityWitness& w);

// ---- engine shared with operators::check_RC ----

struct ProbeResult {
    double moved = 0.0;
    Jet translate;
    /// 0 ok, 1 violation inside the 10·tol band, 2 violation beyond it.
    int severity = 0;
};

struct ContinuityProblem {
    std::string label;
    std::string criterion;
    std::size_t jet_dim = 1;
    /// Appends up to `count` jets at x with their base values.
    std::function<void(std::span<const double> x, JetSampler& sampler, std::size_t count, std::vector<Jet>& jets,
                       std::vector<double>& base)>
        bank;
    std::function<ProbeResult(std::span<const double> y, const Jet& j, double base, double eta)> probe;
};

class ContinuitySearch {
public:
    ContinuitySearch(ContinuityProblem problem, const BoxDomain& region, const SampleBox& box,
                     const SampleBudget& budget);

    ContinuityCertificate run(const std::vector<double>& etas) const;

    struct Cell {
        std::size_t violations = 0;
        std::size_t suspect = 0;
        std::optional<ContinuityWitness> witness;
        std::size_t evaluations = 0;
    };
    /// Every pair/jet at one (η, δ); stops at the first witness.
    Cell cell(double eta, double delta) const;

    const BoxDomain& region() const noexcept { return region_; }

private:
    ContinuityProblem problem_;
    BoxDomain region_;
    SampleBox box_;
    SampleBudget budget_;
    std::vector<std::vector<double>> xs_;
    std::vector<std::vector<double>> offsets_;
    std::vector<std::vector<Jet>> jets_;
    std::vector<std::vector<double>> base_;
};

/// The search behind check_translation_continuity (or, with relaxed_R, check_relaxed_continuity);
/// exposed so callers can evaluate single (η, δ) cells.
ContinuitySearch translation_search(const JetMap& m, const BoxDomain& region, const SampleBox& box,
                                    const SampleBudget& budget, std::optional<double> relaxed_R = {});

/// A sampler jet; with heavy tails one in five draws gets a log-uniform |r| in [10, 1e9] and one in
/// five has A scaled by up to 1e6.
Jet sample_jet(JetSampler& s, bool heavy_tail);

/// Moves j along dir onto the level-`level` set of g(x, ·) from the inside; nullopt if no crossing.
std::optional<Jet> settle_inside(const JetMap& m, std::span<const double> x, const Jet& j, const Jet& dir,
                                 double level);

}  // namespace nlpt

#pragma once

#include "nlpt/elliptic_map.hpp"
#include "nlpt/grid.hpp"
#include "nlpt/sampling.hpp"
#include "nlpt/symmat.hpp"

#include <optional>
#include <vector>

namespace nlpt {

/// Σ arctan λ_i(a), in (−Nπ/2, Nπ/2).
double G_eval(const SymMat& a);

/// θ_k = (N − 2k)π/2; defined for 0 ≤ k ≤ N (θ_0, θ_N are the range endpoints).
double special_value(std::size_t n, std::size_t k);

struct PhasePartition {
    std::size_t n = 0;
    /// θ_1 … θ_{N−1}.
    std::vector<double> special_values;
    /// intervals[k−1] = I_k = (θ_k, θ_{k−1}), k = 1..N.
    std::vector<Interval> intervals;

    /// k with [lo, hi] ⊂ I_k, if any.
    std::optional<std::size_t> interval_of(double lo, double hi) const;
};

PhasePartition phase_partition(std::size_t n);

struct EigBound {
    bool bounded = false;
    double c = 0.0;
    std::size_t interval = 0;
    double dist = 0.0;
};

/// If Σ sits inside some I_k at distance dist from its endpoints, every A with G(A) ∈ Σ has an eigenvalue
/// with |λ| ≤ tan(π/2 − dist/N). Otherwise unbounded.
EigBound eig_bound(Interval sigma, std::size_t n);

/// Block matrix diag(−a·I_k, b·I_{N−k}) with G equal to a prescribed level.
struct FailureWitness {
    std::size_t n = 0;
    std::size_t k = 0;
    double level = 0.0;
    double a = 0.0;
    double b = 0.0;
    SymMat matrix;
    /// G(matrix) − level, from the arctan sum.
    double phase_error = 0.0;
    /// G(matrix + I) − level.
    double gap = 0.0;
};

/// The block witness for a given a at level θ_k; nullopt when the solved b is not positive.
std::optional<FailureWitness> block_witness(std::size_t n, std::size_t k, double a);
/// Same at an arbitrary level.
std::optional<FailureWitness> level_witness(std::size_t n, std::size_t k, double level, double a);
/// Doubles a from 1 until 0 < gap < target_gap.
FailureWitness failure_witness(std::size_t n, std::size_t k, double target_gap);

/// x ↦ {(r, A) : G(A) ≥ h(x)}, with block-form proposals at level h(x).
JetMap slag_map(const CoefficientField& h, std::size_t n, std::string label = "slag");

struct SlagTableRow {
    double eta = 0.0;
    /// Bound that |h(x) − h(y)| must stay below.
    double target = 0.0;
    double delta = 0.0;
    std::size_t validated = 0;
    std::size_t violations = 0;
};

struct SlagWitness {
    /// Where h crosses θ_k (interpolated along a grid edge).
    std::vector<double> crossing;
    std::vector<double> point;
    double h_point = 0.0;
    /// True when h(point) > θ_k: the jet sits on ∂Θ(crossing) and leaves Θ(point).
    bool above = true;
    FailureWitness block;
};

struct SlagCertificate {
    std::size_t n = 0;
    PhasePartition partition;
    double h_min = 0.0;
    double h_max = 0.0;
    std::optional<std::size_t> interval;
    std::optional<std::size_t> crossed_k;
    double epsilon = 0.0;
    EigBound bound;
    double lipschitz = 0.0;
    std::vector<SlagTableRow> table;
    /// First entry sits at a grid node; later ones approach the crossing.
    std::vector<SlagWitness> witnesses;
    ContinuityCertificate continuity;
};

/// Continuity of x ↦ {G(A) ≥ h(x)} by phase analysis of h. Certified branch: ε, C and a Lipschitz
/// bound of the interpolated h give δ(η); each cell is then spot-checked by sampling. Refuted branch:
/// h meets a special value and block witnesses are built on the nearest grid nodes.
SlagCertificate certify_slag_continuity(const GridFunction& h, std::size_t n, const std::vector<double>& etas,
                                        const SampleBox& box, const SampleBudget& validation = {500, 20, 0});

}  // namespace nlpt

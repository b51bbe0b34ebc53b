#pragma once

#include "nlpt/elliptic_map.hpp"
#include "nlpt/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nlpt {

/// Grid checks test necessary conditions on sampled C² or semiconvex data; a pass is evidence, not proof.
inline constexpr const char* kGridCaveat =
    "grid check on sampled data: necessary conditions at nodes only, not a continuum certificate";

struct DiscreteJet {
    std::size_t node = 0;
    double value = 0.0;
    SymMat hessian;

    Jet jet() const { return {value, hessian}; }
};

/// Central second differences; mixed terms from the 4-point cross. Throws InvalidParameter off the interior.
DiscreteJet discrete_jet(const GridFunction& u, std::size_t node);

/// 10·(1 + max|u|)·h² with h the largest grid step.
double hessian_tolerance(const GridFunction& u);

struct NodeIssue {
    std::size_t node = 0;
    std::vector<double> x;
    double value = 0.0;
    std::string detail;
};

struct GridReport {
    bool pass = true;
    std::size_t checked = 0;
    std::size_t failure_count = 0;
    /// First failures in node order (at most kMaxListed).
    std::vector<NodeIssue> failures;
    /// Every failing node, in report order.
    std::vector<std::size_t> failed_nodes;
    double tolerance = 0.0;
    std::string caveat = kGridCaveat;

    static constexpr std::size_t kMaxListed = 64;
    void fail(std::size_t node, std::vector<double> x, double value, std::string detail);
    bool failed_at(std::size_t node) const;
};

/// u^ε(x) = max over lattice offsets z with |z| ≤ √(2εM) of u(x − z) − |z|²/ε, M = sup|u|.
GridFunction sup_convolution(const GridFunction& u, double eps);

/// Axis and diagonal second differences of u + (λ/2)|x|² are ≥ −1e-10·(1 + max|w|)/h².
GridReport check_semiconvex(const GridFunction& u, double lambda);

enum class SubaffineMode { Hessian, AffineComparison, Plus };

/// Hessian: λ_max(D²w) ≥ −tol at interior nodes. AffineComparison: on every dyadic sub-box (down to 4 nodes
/// per axis), interior values stay below the least-squares plane of the box boundary lifted over it. Plus:
/// `inner` applied to w⁺ (for Hessian, nodes with w⁺ ≤ tol pass and the rest use D²w, equal to D²w⁺ there).
GridReport check_subaffine(const GridFunction& w, SubaffineMode mode,
                           SubaffineMode inner = SubaffineMode::AffineComparison);

/// At each interior node: w ≤ tol or λ_max(D²w) ≥ −tol.
GridReport check_qdual_subharmonic(const GridFunction& w);

enum class Side { Sub, Super };

/// Sub: the discrete jet is within jet distance hessian_tolerance(u) of Θ(x). Super: the same for −J in the
/// dual fiber. Interior nodes only.
GridReport check_subharmonic(const GridFunction& u, const JetMap& m, Side side);

struct ComparisonVerdict {
    bool pass = true;
    bool precondition_ok = true;
    /// Which input failed its precondition ("u", "v", "w"), empty otherwise.
    std::string precondition_failed;
    std::vector<GridReport> preconditions;
    /// False when the boundary hypothesis does not hold; the conclusion is then vacuous.
    bool boundary_ok = true;
    std::vector<NodeIssue> violations;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool theorem_contradiction = false;
    std::string caveat = kGridCaveat;
};

/// Zero maximum principle on a Q̃-subharmonic w: w ≤ tol on the boundary forces w ≤ tol inside.
ComparisonVerdict zmp_check(const GridFunction& w);

struct AdditionReport {
    GridReport u_sub;
    GridReport utilde_sub;
    GridReport sum;
    bool pass = false;
    std::string failed_input;
};

/// u sub for m and ũ sub for dual_map(m) imply u + ũ is Q̃-subharmonic.
AdditionReport subharmonic_addition_test(const GridFunction& u, const GridFunction& utilde, const JetMap& m);

/// u sub and v super for m, u ≤ v on the boundary ⇒ u ≤ v everywhere. Violations with verified
/// preconditions are reported as a theorem contradiction.
ComparisonVerdict compare(const GridFunction& u, const GridFunction& v, const JetMap& m);

/// u(x + y) + (η/2)(|x|² − ω), ω = 2 + max|x|² over nodes, restricted to nodes farther than `margin`
/// from the boundary of the active region. margin defaults to the grid domain's margin; |y| < margin.
GridFunction translate_perturb(const GridFunction& u, std::span<const double> y, double eta,
                               std::optional<double> margin = {});

}  // namespace nlpt

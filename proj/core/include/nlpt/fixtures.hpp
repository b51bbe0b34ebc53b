#pragma once

#include "nlpt/grid.hpp"
#include "nlpt/operators.hpp"

#include <string>
#include <vector>

namespace nlpt {

/// Named operator set-ups used by the tests, the benchmarks and `nlpt fixture`.
///   affine_sphere            N=2, h = |x|² on [0,1]²
///   affine_sphere_negative   N=2, h ≡ −1 (no zero of F on Q)
///   perturbed_ma             N=2, g(t) = t, r0 = 0, m = sin(πx₁), M = 0.1·sin(3πx₂)·I, h = x₁x₂
///   slag_positive            N=2, h = π/2 + 0.3·sin(2πx₁)
///   slag_positive_3d         N=3 on [0,1]³, h = 0.5·sin(2πx₁) + 0.2·x₂
///   slag_crossing            N=2, h = 0.5 − x₁
///   linear                   N=2, tr A − (1 + x₁)·r
///   degenerate_min_r         N=2, min(−r, 0)
std::vector<std::string> fixture_names();
OperatorParams fixture_params(const std::string& name);
std::string fixture_kind(const std::string& name);
OperatorSpec fixture_operator(const std::string& name);

/// u* = |x|²/2 − c solves (−u)⁴·det D²u = h for h = (c − |x|²/2)⁴ (N = 2). The grid covers [−1, 1]² with the
/// closed unit disc active; h is sampled on the same grid.
struct ExplicitSolution {
    OperatorSpec op;
    GridFunction u;
};
ExplicitSolution affine_sphere_disc(std::size_t nodes = 129, double c = 0.6);

/// Scalar coefficient on a uniform grid with `nodes` points per axis.
CoefficientField sampled_field(const BoxDomain& domain, std::size_t nodes,
                               const std::function<double(std::span<const double>)>& fn);

}  // namespace nlpt

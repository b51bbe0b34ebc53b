#pragma once

#include "nlpt/jet.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace nlpt {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// Parameters of a reproducible jet stream.
struct SampleBox {
    Interval r_range{-10.0, 10.0};
    double eig_scale = 10.0;
    std::uint64_t seed = 0;
    std::size_t count = 1000;
};

/// splitmix64 finalizer; derives independent sub-seeds for parallel blocks.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Radical inverse of index in the given base (Halton coordinate).
double radical_inverse(std::uint64_t index, unsigned base) noexcept;
/// The first `dim` coordinates of the Halton point with the given index.
std::vector<double> halton_point(std::uint64_t index, std::size_t dim);

/// Random generator for jets, matrices, and Q-elements.
class JetSampler {
public:
    JetSampler(const SampleBox& box, std::size_t n);
    JetSampler(const SampleBox& box, std::size_t n, std::uint64_t stream);

    std::size_t dim() const noexcept { return n_; }
    std::mt19937_64& engine() noexcept { return rng_; }

    double uniform(double lo, double hi);
    double normal();
    /// Sign-symmetric with log-uniform magnitude in [1e-3·scale, scale].
    double eigenvalue(double scale);

    /// Haar-distributed orthogonal matrix, row-major.
    std::vector<double> orthogonal();
    /// QΛQᵀ with eigenvalue() entries.
    SymMat matrix();
    SymMat matrix(double scale);
    /// Positive semidefinite matrix; with probability 1/4 some eigenvalues are exactly zero.
    SymMat psd(double scale);
    /// Unit vector in ℝ^d.
    std::vector<double> direction(std::size_t d);

    Jet jet();
    /// (s, P) with s ≤ 0 and P ⪰ 0, magnitudes up to scale.
    Jet q_element(double scale);

private:
    SampleBox box_;
    std::size_t n_;
    std::mt19937_64 rng_;
};

/// The full stream of box.count jets. Throws InvalidParameter when eig_scale ≤ 0 or count = 0.
std::vector<Jet> random_jet(const SampleBox& box, std::size_t n);

void validate(const SampleBox& box);

}  // namespace nlpt

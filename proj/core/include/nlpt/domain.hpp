#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlpt {

/// Axis-aligned box Ω with an optional interior margin describing Ω' ⊂⊂ Ω.
struct BoxDomain {
    std::vector<double> lower;
    std::vector<double> upper;
    double margin = 0.0;

    BoxDomain() = default;
    BoxDomain(std::vector<double> lo, std::vector<double> hi, double margin_ = 0.0);

    static BoxDomain cube(std::size_t d, double lo, double hi, double margin = 0.0);

    std::size_t dim() const noexcept { return lower.size(); }
    double diameter() const;
    std::vector<double> center() const;
    bool contains(std::span<const double> x, double slack = 0.0) const;
    /// inner ⊆ this (closed boxes).
    bool encloses(const BoxDomain& inner) const;
    /// The box shrunk by `margin` on every side.
    BoxDomain interior() const;
    BoxDomain shrunk(double by) const;
    std::vector<std::vector<double>> corners() const;
    /// Clamps x into the box in place.
    void clamp(std::span<double> x) const;

    /// Throws InvalidParameter unless lower < upper componentwise and the margin fits.
    void validate() const;
};

/// The 2^d corners followed by Halton points (index from 1) until `count` points are produced.
std::vector<std::vector<double>> sample_points(const BoxDomain& box, std::size_t count);

double distance(std::span<const double> x, std::span<const double> y);

}  // namespace nlpt

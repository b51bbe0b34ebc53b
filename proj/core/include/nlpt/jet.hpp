#pragma once

#include "nlpt/symmat.hpp"

#include <iosfwd>
#include <utility>

namespace nlpt {

/// Gradient-free 2-jet (r, A).
struct Jet {
    double r = 0.0;
    SymMat a;

    Jet() = default;
    Jet(double r_, SymMat a_) : r(r_), a(std::move(a_)) {}

    std::size_t dim() const noexcept { return a.dim(); }

    /// (r - t, A + tI): the direction along which every Q-monotone set grows.
    Jet along_ray(double t) const { return {r - t, a.shifted(t)}; }

    Jet& operator+=(const Jet& o)
    {
        r += o.r;
        a += o.a;
        return *this;
    }
    Jet& operator-=(const Jet& o)
    {
        r -= o.r;
        a -= o.a;
        return *this;
    }
    Jet& operator*=(double s)
    {
        r *= s;
        a *= s;
        return *this;
    }

    friend Jet operator+(Jet x, const Jet& y) { return x += y; }
    friend Jet operator-(Jet x, const Jet& y) { return x -= y; }
    friend Jet operator*(Jet x, double s) { return x *= s; }
    friend Jet operator*(double s, Jet x) { return x *= s; }
    friend Jet operator-(Jet x) { return x *= -1.0; }
    friend bool operator==(const Jet&, const Jet&) = default;
};

/// max(|r|, spectral radius of A).
double jet_norm(const Jet& j);

std::ostream& operator<<(std::ostream& os, const Jet& j);

}  // namespace nlpt

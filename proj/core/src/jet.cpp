#include "nlpt/jet.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nlpt {

double jet_norm(const Jet& j)
{
    if (j.dim() == 0) return std::abs(j.r);
    return std::max(std::abs(j.r), spectral_radius(j.a));
}

std::ostream& operator<<(std::ostream& os, const Jet& j)
{
    os << "(r=" << j.r << ", A=[";
    const std::size_t n = j.dim();
    for (std::size_t i = 0; i < n; ++i) {
        if (i) os << "; ";
        for (std::size_t k = 0; k < n; ++k) os << (k ? " " : "") << j.a(i, k);
    }
    return os << "])";
}

}  // namespace nlpt

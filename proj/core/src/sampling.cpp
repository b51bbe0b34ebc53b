#include "nlpt/sampling.hpp"

#include "nlpt/error.hpp"

#include <array>
#include <cmath>

namespace nlpt {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double radical_inverse(std::uint64_t index, unsigned base) noexcept
{
    const double inv = 1.0 / base;
    double f = inv;
    double result = 0.0;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return result;
}

std::vector<double> halton_point(std::uint64_t index, std::size_t dim)
{
    static constexpr std::array<unsigned, 16> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim > primes.size()) throw InvalidParameter("halton_point: at most 16 dimensions");
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) p[i] = radical_inverse(index, primes[i]);
    return p;
}

void validate(const SampleBox& box)
{
    if (!(box.eig_scale > 0.0) || !std::isfinite(box.eig_scale))
        throw InvalidParameter("SampleBox: eig_scale must be positive and finite");
    if (box.count == 0) throw InvalidParameter("SampleBox: count must be at least 1");
    if (!(box.r_range.lo <= box.r_range.hi)) throw InvalidParameter("SampleBox: r_range must satisfy lo <= hi");
}

JetSampler::JetSampler(const SampleBox& box, std::size_t n) : JetSampler(box, n, 0) {}

JetSampler::JetSampler(const SampleBox& box, std::size_t n, std::uint64_t stream)
    : box_(box), n_(n), rng_(split_seed(box.seed, stream))
{
    validate(box);
    if (n == 0) throw InvalidParameter("JetSampler: dim must be at least 1");
}

double JetSampler::uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

double JetSampler::normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

double JetSampler::eigenvalue(double scale)
{
    const double lo = std::log(1e-3 * scale);
    const double hi = std::log(scale);
    const double mag = std::exp(uniform(lo, hi));
    return (rng_() & 1U) ? mag : -mag;
}

std::vector<double> JetSampler::orthogonal()
{
    // Gram-Schmidt on a Gaussian matrix; columns are orthonormalized in order.
    const std::size_t n = n_;
    std::vector<double> q(n * n);
    for (double& v : q) v = normal();
    for (std::size_t k = 0; k < n; ++k) {
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < k; ++j) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += q[i * n + j] * q[i * n + k];
                for (std::size_t i = 0; i < n; ++i) q[i * n + k] -= dot * q[i * n + j];
            }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += q[i * n + k] * q[i * n + k];
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) q[i * n + k] /= norm;
    }
    return q;
}

SymMat JetSampler::matrix() { return matrix(box_.eig_scale); }

SymMat JetSampler::matrix(double scale)
{
    std::vector<double> lam(n_);
    for (double& l : lam) l = eigenvalue(scale);
    return SymMat::from_spectrum(lam, orthogonal());
}

SymMat JetSampler::psd(double scale)
{
    std::vector<double> lam(n_);
    const bool degenerate = (rng_() & 3U) == 0;
    for (std::size_t i = 0; i < n_; ++i) {
        lam[i] = std::abs(eigenvalue(scale));
        if (degenerate && (rng_() & 1U)) lam[i] = 0.0;
    }
    return SymMat::from_spectrum(lam, orthogonal());
}

std::vector<double> JetSampler::direction(std::size_t d)
{
    std::vector<double> v(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = normal();
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

Jet JetSampler::jet()
{
    const double r = box_.r_range.lo == box_.r_range.hi ? box_.r_range.lo : uniform(box_.r_range.lo, box_.r_range.hi);
    return {r, matrix()};
}

Jet JetSampler::q_element(double scale)
{
    const double s = (rng_() & 3U) == 0 ? 0.0 : -std::abs(eigenvalue(scale));
    return {s, psd(scale)};
}

std::vector<Jet> random_jet(const SampleBox& box, std::size_t n)
{
    JetSampler sampler(box, n);
    std::vector<Jet> out;
    out.reserve(box.count);
    for (std::size_t i = 0; i < box.count; ++i) out.push_back(sampler.jet());
    return out;
}

}  // namespace nlpt

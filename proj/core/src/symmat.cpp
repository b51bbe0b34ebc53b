#include "nlpt/symmat.hpp"

#include "nlpt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nlpt {

SymMat::SymMat(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

SymMat SymMat::identity(std::size_t n, double scale)
{
    SymMat m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = scale;
    return m;
}

SymMat SymMat::diagonal(std::span<const double> d)
{
    SymMat m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

SymMat SymMat::diagonal(std::initializer_list<double> d)
{
    return diagonal(std::span<const double>(d.begin(), d.size()));
}

SymMat SymMat::from_dense(std::size_t n, std::span<const double> row_major)
{
    if (row_major.size() != n * n) throw InvalidParameter("from_dense: expected n*n entries");
    SymMat m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) m(i, j) = row_major[i * n + j];
    return m;
}

SymMat SymMat::from_rows(std::initializer_list<std::initializer_list<double>> rows)
{
    const std::size_t n = rows.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw InvalidParameter("from_rows: matrix must be square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return from_dense(n, flat);
}

SymMat SymMat::from_spectrum(std::span<const double> values, std::span<const double> q)
{
    const std::size_t n = values.size();
    if (q.size() != n * n) throw InvalidParameter("from_spectrum: factor must be n*n");
    SymMat m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += q[i * n + k] * values[k] * q[j * n + k];
            m(i, j) = s;
        }
    return m;
}

std::vector<double> SymMat::dense() const
{
    std::vector<double> out(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out[i * n_ + j] = (*this)(i, j);
    return out;
}

double SymMat::trace() const noexcept
{
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMat::frobenius() const noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) {
            const double v = (*this)(i, j);
            s += (i == j ? 1.0 : 2.0) * v * v;
        }
    return std::sqrt(s);
}

SymMat SymMat::shifted(double t) const
{
    SymMat m = *this;
    for (std::size_t i = 0; i < n_; ++i) m(i, i) += t;
    return m;
}

SymMat& SymMat::operator+=(const SymMat& o)
{
    if (o.n_ != n_) throw InvalidParameter("SymMat: dimension mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

SymMat& SymMat::operator-=(const SymMat& o)
{
    if (o.n_ != n_) throw InvalidParameter("SymMat: dimension mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

SymMat& SymMat::operator*=(double s) noexcept
{
    for (double& v : data_) v *= s;
    return *this;
}

namespace {

// Jacobi on a dense copy; `v` is accumulated only when non-null.
void jacobi(std::size_t n, std::vector<double>& a, std::vector<double>* v)
{
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    double scale = 0.0;
    for (double x : a) scale += x * x;
    scale = std::sqrt(scale);
    if (scale == 0.0 || n == 1) return;

    for (int sweep = 0; sweep <= kJacobiMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * at(p, q) * at(p, q);
        off = std::sqrt(off);
        if (off <= kJacobiTolerance * scale) return;
        if (sweep == kJacobiMaxSweeps) break;

        // Rotations below this size are skipped on early sweeps (threshold Jacobi).
        const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0 || std::abs(apq) < threshold) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150)
                    t = 0.5 / theta;
                else
                    t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                at(p, q) = 0.0;
                at(q, p) = 0.0;
                if (v) {
                    auto& vm = *v;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = vm[k * n + p];
                        const double vkq = vm[k * n + q];
                        vm[k * n + p] = c * vkp - s * vkq;
                        vm[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    throw InternalDefect("eig_sym: Jacobi sweep cap of " + std::to_string(kJacobiMaxSweeps) + " exceeded");
}

}  // namespace

EigenSystem eig_sym(const SymMat& a)
{
    const std::size_t n = a.dim();
    if (n == 0) throw InvalidParameter("eig_sym: dim must be at least 1");
    std::vector<double> work = a.dense();
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    jacobi(n, work, &v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return work[x * n + x] < work[y * n + y]; });
    EigenSystem es;
    es.values.resize(n);
    es.vectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        es.values[k] = work[order[k] * n + order[k]];
        for (std::size_t i = 0; i < n; ++i) es.vectors[i * n + k] = v[i * n + order[k]];
    }
    return es;
}

std::vector<double> eigenvalues(const SymMat& a)
{
    const std::size_t n = a.dim();
    if (n == 0) throw InvalidParameter("eigenvalues: dim must be at least 1");
    std::vector<double> work = a.dense();
    jacobi(n, work, nullptr);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = work[i * n + i];
    std::sort(out.begin(), out.end());
    return out;
}

double lambda_min(const SymMat& a) { return eigenvalues(a).front(); }

double lambda_max(const SymMat& a) { return eigenvalues(a).back(); }

double spectral_radius(const SymMat& a)
{
    const auto ev = eigenvalues(a);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

}  // namespace nlpt

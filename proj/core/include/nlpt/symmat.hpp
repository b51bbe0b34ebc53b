#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace nlpt {

/// Dense symmetric matrix holding only the upper triangle, row-major.
class SymMat {
public:
    SymMat() = default;
    explicit SymMat(std::size_t n);

    static SymMat identity(std::size_t n, double scale = 1.0);
    static SymMat diagonal(std::span<const double> d);
    static SymMat diagonal(std::initializer_list<double> d);
    /// Reads the upper triangle of a row-major n×n array.
    static SymMat from_dense(std::size_t n, std::span<const double> row_major);
    static SymMat from_rows(std::initializer_list<std::initializer_list<double>> rows);
    /// Builds Q diag(values) Qᵀ where q is row-major with eigenvectors as columns.
    static SymMat from_spectrum(std::span<const double> values, std::span<const double> q);

    std::size_t dim() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[index(i, j)]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[index(i, j)]; }

    std::span<const double> packed() const noexcept { return data_; }
    std::vector<double> dense() const;

    double trace() const noexcept;
    double frobenius() const noexcept;
    /// A + t·I.
    SymMat shifted(double t) const;

    SymMat& operator+=(const SymMat& o);
    SymMat& operator-=(const SymMat& o);
    SymMat& operator*=(double s) noexcept;

    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(SymMat a, double s) { return a *= s; }
    friend SymMat operator*(double s, SymMat a) { return a *= s; }
    friend SymMat operator-(SymMat a) { return a *= -1.0; }
    friend bool operator==(const SymMat&, const SymMat&) = default;

private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept
    {
        if (i > j) {
            const std::size_t t = i;
            i = j;
            j = t;
        }
        return i * n_ - i * (i + 1) / 2 + j;
    }

    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Eigenvalues sorted non-decreasing; vectors row-major n×n with column k the k-th eigenvector.
struct EigenSystem {
    std::vector<double> values;
    std::vector<double> vectors;

    double vector_entry(std::size_t row, std::size_t k) const { return vectors[row * values.size() + k]; }
};

/// Cyclic Jacobi with threshold sweeps. Throws InternalDefect past the sweep cap.
EigenSystem eig_sym(const SymMat& a);
/// Same iteration without accumulating the orthogonal factor.
std::vector<double> eigenvalues(const SymMat& a);

double lambda_min(const SymMat& a);
double lambda_max(const SymMat& a);
double spectral_radius(const SymMat& a);

inline constexpr double kJacobiTolerance = 1e-13;
inline constexpr int kJacobiMaxSweeps = 64;

}  // namespace nlpt

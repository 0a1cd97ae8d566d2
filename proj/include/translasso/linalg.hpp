#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace translasso {

using Vector = std::vector<double>;

// Dense row-major matrix. The toolkit targets p up to a few thousand, so a
// flat double buffer is all we need.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n);
};

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& m, const Vector& v);
// m'v without forming the transpose.
Vector matvec_t(const Matrix& m, const Vector& v);

Vector sub(const Vector& a, const Vector& b);
double dot(const Vector& a, const Vector& b);
double norm2_sq(const Vector& v);
double norm1(const Vector& v);
double norm_inf(const Vector& v);
double max_abs(const Matrix& m);

// M'M, computed on the upper triangle and mirrored so the result is
// symmetric entry for entry.
Matrix gram(const Matrix& m);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Returns eigenvalues in `values` (descending) and the matching orthonormal
// eigenvectors as the columns of `vectors`.
void jacobi_eigen(const Matrix& sym, Vector& values, Matrix& vectors);

// Moore-Penrose pseudo-inverse of a symmetric PSD matrix. Eigenvalues below
// tol * lambda_max are treated as zero. Throws std::invalid_argument if the
// input is asymmetric beyond 1e-10 relative.
Matrix pseudo_inverse(const Matrix& g, double tol = 1e-10);

// Rank of a symmetric PSD matrix with the same relative cutoff.
std::size_t psd_rank(const Matrix& g, double tol = 1e-10);

// Solves A x = b for symmetric positive definite A via Cholesky. Throws
// std::runtime_error(context + ...) when a pivot is not positive.
Vector solve_spd(const Matrix& a, const Vector& b, const std::string& context = "solve_spd");

// Quantile by linear interpolation between order statistics, h = (N-1)q + 1
// (R type-7). `sorted` must be ascending and non-empty.
double quantile_linear(const Vector& sorted, double q);

// Deterministic stream generator: SplitMix64 over a 64-bit counter, with
// Gaussian variates from the Marsaglia polar transform. The algorithm is
// fixed so experiments replay exactly from a seed; independent streams are
// derived as seed + stream_index.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // uniform in [0, 1)
    double next_uniform();
    // standard normal (polar method, second variate cached)
    double next_gaussian();

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// One design row with Cov(x_j, x_k) = rho^|j-k|, generated by the AR(1)
// recursion x_1 ~ N(0,1), x_j = rho x_{j-1} + sqrt(1-rho^2) z_j. Every
// coordinate has unit marginal variance. Throws for rho outside [0, 1).
Vector mvn_ar1_row(std::size_t p, double rho, Rng& rng);

}  // namespace translasso

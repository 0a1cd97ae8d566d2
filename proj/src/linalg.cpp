#include "translasso/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace translasso {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool all_finite(const Vector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.data); }

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: dimension mismatch");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* brow = &b.data[k * b.cols];
            double* crow = &c.data[i * c.cols];
            for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols != v.size()) throw std::invalid_argument("matvec: dimension mismatch");
    Vector out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = &m.data[i * m.cols];
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
    return out;
}

Vector matvec_t(const Matrix& m, const Vector& v) {
    if (m.rows != v.size()) throw std::invalid_argument("matvec_t: dimension mismatch");
    Vector out(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* row = &m.data[i * m.cols];
        for (std::size_t j = 0; j < m.cols; ++j) out[j] += row[j] * vi;
    }
    return out;
}

Vector sub(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: length mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2_sq(const Vector& v) { return dot(v, v); }

double norm1(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

double norm_inf(const Vector& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

double max_abs(const Matrix& m) { return norm_inf(m.data); }

Matrix gram(const Matrix& m) {
    Matrix g(m.cols, m.cols);
    for (std::size_t i = 0; i < m.cols; ++i) {
        for (std::size_t j = i; j < m.cols; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < m.rows; ++r) acc += m(r, i) * m(r, j);
            g(i, j) = acc;
            g(j, i) = acc;
        }
    }
    return g;
}

void jacobi_eigen(const Matrix& sym, Vector& values, Matrix& vectors) {
    if (sym.rows != sym.cols) throw std::invalid_argument("jacobi_eigen: matrix not square");
    const std::size_t n = sym.rows;
    Matrix a = sym;
    vectors = Matrix::identity(n);

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off <= 1e-30 * std::max(1.0, norm2_sq(a.data))) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = vectors(k, p);
                    const double vkq = vectors(k, q);
                    vectors(k, p) = c * vkp - s * vkq;
                    vectors(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);

    // sort eigenpairs descending
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
    Vector sorted_vals(n);
    Matrix sorted_vecs(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        sorted_vals[c] = values[order[c]];
        for (std::size_t r = 0; r < n; ++r) sorted_vecs(r, c) = vectors(r, order[c]);
    }
    values = std::move(sorted_vals);
    vectors = std::move(sorted_vecs);
}

static void check_symmetric(const Matrix& g, const char* who) {
    if (g.rows != g.cols) throw std::invalid_argument(std::string(who) + ": matrix not square");
    const double scale = std::max(1e-300, max_abs(g));
    for (std::size_t i = 0; i < g.rows; ++i)
        for (std::size_t j = i + 1; j < g.cols; ++j)
            if (std::fabs(g(i, j) - g(j, i)) > 1e-10 * scale)
                throw std::invalid_argument(std::string(who) + ": matrix not symmetric");
}

Matrix pseudo_inverse(const Matrix& g, double tol) {
    check_symmetric(g, "pseudo_inverse");
    if (tol <= 0.0) throw std::invalid_argument("pseudo_inverse: tol must be positive");
    Vector vals;
    Matrix vecs;
    jacobi_eigen(g, vals, vecs);
    const double lmax = vals.empty() ? 0.0 : std::max(0.0, vals[0]);
    const double cutoff = tol * lmax;

    const std::size_t n = g.rows;
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (vals[k] <= cutoff) continue;
        const double inv = 1.0 / vals[k];
        for (std::size_t i = 0; i < n; ++i) {
            const double vik = vecs(i, k) * inv;
            for (std::size_t j = i; j < n; ++j) {
                out(i, j) += vik * vecs(j, k);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
    return out;
}

std::size_t psd_rank(const Matrix& g, double tol) {
    check_symmetric(g, "psd_rank");
    Vector vals;
    Matrix vecs;
    jacobi_eigen(g, vals, vecs);
    const double lmax = vals.empty() ? 0.0 : std::max(0.0, vals[0]);
    const double cutoff = tol * std::max(lmax, 1e-300);
    std::size_t r = 0;
    for (double v : vals)
        if (v > cutoff) ++r;
    return r;
}

Vector solve_spd(const Matrix& a, const Vector& b, const std::string& context) {
    if (a.rows != a.cols || a.rows != b.size())
        throw std::invalid_argument(context + ": dimension mismatch");
    const std::size_t n = a.rows;
    Matrix l(n, n);
    const double scale = std::max(1e-300, max_abs(a));
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 1e-14 * scale)
            throw std::runtime_error(context + ": matrix is singular or not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / l(j, j);
        }
    }
    // forward then backward substitution
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * y[k];
        y[i] = v / l(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double v = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * x[k];
        x[ii] = v / l(ii, ii);
    }
    return x;
}

double quantile_linear(const Vector& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile_linear: empty input");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_uniform() - 1.0;
        v = 2.0 * next_uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

Vector mvn_ar1_row(std::size_t p, double rho, Rng& rng) {
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("mvn_ar1_row: rho must be in [0, 1)");
    if (p == 0) throw std::invalid_argument("mvn_ar1_row: p must be positive");
    Vector row(p);
    row[0] = rng.next_gaussian();
    const double innov = std::sqrt(1.0 - rho * rho);
    for (std::size_t j = 1; j < p; ++j) row[j] = rho * row[j - 1] + innov * rng.next_gaussian();
    return row;
}

}  // namespace translasso

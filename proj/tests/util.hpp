#pragma once

#include <cmath>

#include "translasso/linalg.hpp"

namespace translasso::testutil {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.next_gaussian();
    return m;
}

inline Vector random_vector(std::size_t len, Rng& rng) {
    Vector v(len);
    for (double& x : v) x = rng.next_gaussian();
    return v;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::fabs(a[i] - b[i]));
    return worst;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return max_abs_diff(a.data, b.data);
}

}  // namespace translasso::testutil

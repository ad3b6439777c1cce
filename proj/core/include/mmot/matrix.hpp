#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace mmot {

// Small dense row-major matrix, just enough for Hessian blocks and the
// signature machinery.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.a) s += v * v;
    return std::sqrt(s);
}

inline double max_abs_diff(const Matrix& x, const Matrix& y) {
    double d = 0.0;
    for (std::size_t k = 0; k < x.a.size(); ++k) d = std::max(d, std::fabs(x.a[k] - y.a[k]));
    return d;
}

} // namespace mmot

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace vdmdp {

using Matrix = std::vector<std::vector<double>>;

/// Solves A x = b by Gaussian elimination with partial pivoting. A and b are
/// copied; sizes must agree. Throws std::runtime_error on a numerically singular
/// pivot. Meant for the small dense systems this library produces (policy
/// evaluation, stationary distributions); not a general-purpose solver.
inline std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = b.size();
    if (a.size() != n)
        throw std::invalid_argument("solve_linear: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("solve_linear: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const double inv = 1.0 / a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri][c] * x[c];
        x[ri] = s / a[ri][ri];
    }
    return x;
}

/// Stationary distribution of a row-stochastic matrix with a single recurrent
/// class: solves pi^T (I - P) = 0 with the normalization sum(pi) = 1 substituted
/// for the last equation. For unichain P the solution is unique and supported on
/// the recurrent class.
inline std::vector<double> stationary_distribution(const Matrix& p) {
    const std::size_t n = p.size();
    Matrix a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = (i == j ? 1.0 : 0.0) - p[j][i];
    for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
    b[n - 1] = 1.0;
    auto pi = solve_linear(std::move(a), std::move(b));
    for (double& v : pi)
        if (v < 0.0 && v > -1e-12) v = 0.0; // clip elimination noise
    return pi;
}

} // namespace vdmdp

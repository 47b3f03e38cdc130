#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sturmslater {

using Matrix = std::vector<std::vector<double>>;

/// Determinant by partially pivoted Gaussian elimination; consumes the input.
/// Conditioning is the caller's concern: pair with column_norm_product.
inline double lu_det(Matrix a) {
    const std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw std::invalid_argument("lu_det needs a square matrix");
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(a[r][k]) > std::abs(a[pivot][k])) pivot = r;
        if (a[pivot][k] == 0.0) return 0.0;
        if (pivot != k) {
            std::swap(a[pivot], a[k]);
            det = -det;
        }
        det *= a[k][k];
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = a[r][k] / a[k][k];
            for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
        }
    }
    return det;
}

/// Product of Euclidean column norms; Hadamard's bound on |det|, used as the
/// scale against which near-singularity is judged.
inline double column_norm_product(const Matrix& a) {
    if (a.empty()) return 1.0;
    double prod = 1.0;
    for (std::size_t c = 0; c < a[0].size(); ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < a.size(); ++r) s += a[r][c] * a[r][c];
        prod *= std::sqrt(s);
    }
    return prod;
}

/// A unit-norm kernel vector of an m x n matrix with m < n, by row echelon
/// reduction with partial pivoting and back substitution on the free column.
/// Assumes full row rank (guaranteed in this project by the independence of
/// the eigenfunction value/derivative vectors).
inline std::vector<double> nullspace_vector(Matrix a) {
    const std::size_t m = a.size();
    if (m == 0) throw std::invalid_argument("empty system");
    const std::size_t n = a[0].size();
    if (n != m + 1)
        throw std::invalid_argument("nullspace_vector expects exactly one more column than rows");

    std::vector<std::size_t> pivot_col(m);
    std::vector<bool> used_col(n, false);
    for (std::size_t k = 0; k < m; ++k) {
        // best pivot over remaining columns and rows
        std::size_t pr = k, pc = n;
        double best = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            if (used_col[c]) continue;
            for (std::size_t r = k; r < m; ++r)
                if (std::abs(a[r][c]) > best) {
                    best = std::abs(a[r][c]);
                    pr = r;
                    pc = c;
                }
        }
        if (best == 0.0) throw std::invalid_argument("system is rank deficient");
        std::swap(a[k], a[pr]);
        used_col[pc] = true;
        pivot_col[k] = pc;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == k || a[r][pc] == 0.0) continue;
            const double f = a[r][pc] / a[k][pc];
            for (std::size_t c = 0; c < n; ++c) a[r][c] -= f * a[k][c];
            a[r][pc] = 0.0;
        }
    }
    std::size_t free_col = 0;
    while (free_col < n && used_col[free_col]) ++free_col;

    std::vector<double> v(n, 0.0);
    v[free_col] = 1.0;
    for (std::size_t k = 0; k < m; ++k) v[pivot_col[k]] = -a[k][free_col] / a[k][pivot_col[k]];

    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

}  // namespace sturmslater

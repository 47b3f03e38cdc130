#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sturmslater/errors.hpp"
#include "sturmslater/linalg.hpp"
#include "sturmslater/rng.hpp"
#include "sturmslater/spectral.hpp"

namespace sturmslater {

using CoefficientVector = std::vector<double>;

/// Prescribed zeros: strictly increasing interior points with positive
/// multiplicities.
struct NodeSpec {
    std::vector<double> points;
    std::vector<int> multiplicities;

    int total() const {
        int t = 0;
        for (int k : multiplicities) t += k;
        return t;
    }

    void validate() const {
        if (points.empty() || points.size() != multiplicities.size())
            throw std::invalid_argument("node spec needs matching points/multiplicities");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!(points[i] > 0.0 && points[i] < 1.0))
                throw std::invalid_argument("node locations must lie strictly inside ]0,1[");
            if (i + 1 < points.size() && !(points[i] < points[i + 1]))
                throw std::invalid_argument("node locations must be strictly increasing");
            if (multiplicities[i] < 1)
                throw std::invalid_argument("multiplicities must be positive");
        }
    }
};

namespace detail {

/// Constraint columns h^{(m)}(c_g) for every group g and order m < k_g:
/// entry [row i-1] = d^m h_i / dx^m at c_g.
inline Matrix constraint_columns(const SpectralBasis& basis, const NodeSpec& spec) {
    spec.validate();
    const int n = basis.size();
    Matrix cols;
    for (std::size_t g = 0; g < spec.points.size(); ++g)
        for (int m = 0; m < spec.multiplicities[g]; ++m) {
            std::vector<double> col(static_cast<std::size_t>(n));
            for (int i = 1; i <= n; ++i)
                col[static_cast<std::size_t>(i - 1)] = basis[i].derivative(spec.points[g], m);
            cols.push_back(std::move(col));
        }
    return cols;
}

inline double det_of_columns(const Matrix& cols) {
    const std::size_t n = cols.empty() ? 0 : cols[0].size();
    Matrix a(n, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a[r][c] = cols[c][r];
    return lu_det(std::move(a));
}

inline double columns_norm_product(const Matrix& cols) {
    double prod = 1.0;
    for (const auto& col : cols) {
        double s = 0.0;
        for (double v : col) s += v * v;
        prod *= std::sqrt(s);
    }
    return prod;
}

}  // namespace detail

/// Slater determinant det[h_i(x_j)] over the basis. The points are
/// canonicalized to increasing order with the permutation parity applied
/// afterwards, so antisymmetry under point swaps holds exactly, not just up
/// to elimination roundoff.
inline double slater_det(const SpectralBasis& basis, std::vector<double> points) {
    const int n = basis.size();
    if (static_cast<int>(points.size()) != n)
        throw std::invalid_argument("need exactly n evaluation points");
    int sign = 1;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {  // insertion sort, parity tracked
        for (std::size_t j = i + 1; j > 0 && points[j] < points[j - 1]; --j) {
            std::swap(points[j], points[j - 1]);
            sign = -sign;
        }
    }
    Matrix a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j < n; ++j)
            a[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] =
                basis[i].value(points[static_cast<std::size_t>(j)]);
    return sign * lu_det(std::move(a));
}

/// Flips eigenfunction signs (in index order) until every leading Slater
/// determinant evaluated at the equispaced interior probe is positive. The
/// probe for size k is (1/(k+1), ..., k/(k+1)); if a probe determinant is
/// too small to trust, a seeded randomized ordered probe takes over.
inline SpectralBasis sign_normalize(SpectralBasis basis) {
    const int n = basis.size();
    for (int k = 1; k <= n; ++k) {
        std::vector<double> probe(static_cast<std::size_t>(k));
        for (int i = 1; i <= k; ++i)
            probe[static_cast<std::size_t>(i - 1)] = static_cast<double>(i) / (k + 1);

        auto leading_det = [&](const std::vector<double>& pts) {
            Matrix a(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k)));
            for (int i = 1; i <= k; ++i)
                for (int j = 0; j < k; ++j)
                    a[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] =
                        basis[i].value(pts[static_cast<std::size_t>(j)]);
            return lu_det(std::move(a));
        };

        double det = leading_det(probe);
        if (std::abs(det) < 1e-13) {
            SplitMix64 rng(0x5157u + static_cast<std::uint64_t>(k));
            bool found = false;
            for (int attempt = 0; attempt < 50 && !found; ++attempt) {
                for (auto& p : probe) p = rng.uniform(0.02, 0.98);
                std::sort(probe.begin(), probe.end());
                det = leading_det(probe);
                found = std::abs(det) >= 1e-13;
            }
            if (!found)
                throw DegenerateProbe("no trustworthy probe for leading determinant " +
                                      std::to_string(k));
        }
        if (det < 0.0) basis.replace(k, basis[k].negated());
    }
    return basis;
}

/// Cofactor coefficients of the last column: s_j = (-1)^{n+j} times the minor
/// that deletes row j, so that sum_j s_j h_j(x) = det[h(c_1) ... h(c_{n-1}) h(x)].
/// The expansion identity is cross-checked on a 17-point grid before the
/// vector is returned.
inline CoefficientVector cofactor_coeffs(const SpectralBasis& basis,
                                         const std::vector<double>& c) {
    const int n = basis.size();
    if (static_cast<int>(c.size()) != n - 1)
        throw std::invalid_argument("need n - 1 points");
    NodeSpec spec;
    spec.points = c;
    spec.multiplicities.assign(c.size(), 1);
    spec.validate();

    const Matrix cols = detail::constraint_columns(basis, spec);
    CoefficientVector s(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        Matrix minor(static_cast<std::size_t>(n - 1),
                     std::vector<double>(static_cast<std::size_t>(n - 1)));
        int rr = 0;
        for (int r = 1; r <= n; ++r) {
            if (r == j) continue;
            for (std::size_t cc = 0; cc < cols.size(); ++cc)
                minor[static_cast<std::size_t>(rr)][cc] = cols[cc][static_cast<std::size_t>(r - 1)];
            ++rr;
        }
        double v = lu_det(std::move(minor));
        if ((n + j) % 2 == 1) v = -v;
        s[static_cast<std::size_t>(j - 1)] = v;
    }

    // expansion consistency check
    double scale = 0.0;
    for (double v : s) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw NearSingular("all cofactors vanished");
    for (int i = 0; i < 17; ++i) {
        const double x = (i + 0.5) / 17.0;
        double lhs = 0.0;
        for (int j = 1; j <= n; ++j)
            lhs += s[static_cast<std::size_t>(j - 1)] * basis[j].value(x);
        std::vector<double> pts = c;
        pts.push_back(x);
        const double rhs = slater_det(basis, pts);
        if (std::abs(lhs - rhs) > 1e-8 * (scale + std::abs(rhs)))
            throw VerificationFailure("cofactor expansion mismatch at x = " + std::to_string(x));
    }
    return s;
}

/// Confluent determinant |h(c_1) ... h^{(k_1-1)}(c_1) ... h(x)| with
/// sum k_j = n - 1 prescribed derivative columns and a final value column.
inline double confluent_slater(const SpectralBasis& basis, const NodeSpec& spec, double x) {
    const int n = basis.size();
    if (spec.total() != n - 1)
        throw std::invalid_argument("multiplicities must sum to n - 1");
    Matrix cols = detail::constraint_columns(basis, spec);
    std::vector<double> last(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) last[static_cast<std::size_t>(i - 1)] = basis[i].value(x);
    cols.push_back(std::move(last));
    return detail::det_of_columns(cols);
}

/// Square confluent determinant with sum k_j = n. A value below the
/// conditioning threshold would contradict the linear independence of the
/// derivative vectors and is surfaced as NearSingular.
inline double confluent_matrix_det(const SpectralBasis& basis, const NodeSpec& spec) {
    const int n = basis.size();
    if (spec.total() != n) throw std::invalid_argument("multiplicities must sum to n");
    const Matrix cols = detail::constraint_columns(basis, spec);
    const double det = detail::det_of_columns(cols);
    const double scale = detail::columns_norm_product(cols);
    if (std::abs(det) <= 1e-10 * scale)
        throw NearSingular("confluent determinant at " + std::to_string(det) +
                           " against scale " + std::to_string(scale));
    return det;
}

/// Coefficients of the last-column expansion of the confluent determinant
/// with sum k_j = n - 1: the combination sum_j b_j h_j vanishes to order k_g
/// at every c_g.
inline CoefficientVector confluent_cofactors(const SpectralBasis& basis, const NodeSpec& spec) {
    const int n = basis.size();
    if (spec.total() != n - 1)
        throw std::invalid_argument("multiplicities must sum to n - 1");
    const Matrix cols = detail::constraint_columns(basis, spec);

    CoefficientVector b(static_cast<std::size_t>(n));
    double maxabs = 0.0;
    for (int j = 1; j <= n; ++j) {
        Matrix minor(static_cast<std::size_t>(n - 1),
                     std::vector<double>(static_cast<std::size_t>(n - 1)));
        int rr = 0;
        for (int r = 1; r <= n; ++r) {
            if (r == j) continue;
            for (std::size_t cc = 0; cc < cols.size(); ++cc)
                minor[static_cast<std::size_t>(rr)][cc] = cols[cc][static_cast<std::size_t>(r - 1)];
            ++rr;
        }
        double v = lu_det(std::move(minor));
        if ((n + j) % 2 == 1) v = -v;
        b[static_cast<std::size_t>(j - 1)] = v;
        maxabs = std::max(maxabs, std::abs(v));
    }
    if (maxabs <= 1e-10 * detail::columns_norm_product(cols))
        throw NearSingular("confluent cofactors vanished against the column scale");
    return b;
}

}  // namespace sturmslater

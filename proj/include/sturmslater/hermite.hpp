#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sturmslater/errors.hpp"
#include "sturmslater/linalg.hpp"
#include "sturmslater/multipoly.hpp"
#include "sturmslater/rng.hpp"
#include "sturmslater/unipoly.hpp"

namespace sturmslater {

// ---------------------------------------------------------------------------
// Harmonic-oscillator eigenfunctions h_n(x) = gamma_{n-1} H_{n-1}(x) e^{-x^2/2}
// on the real line, with eigenvalues 2n - 1. The polynomial structure makes
// every zero-counting question exact.
// ---------------------------------------------------------------------------

inline constexpr int kHermiteBudget = 40;

/// Exact coefficients of the (physicists') Hermite polynomial H_m,
/// little-endian. Leading coefficient is 2^m.
struct HermitePoly {
    int degree = 0;
    std::vector<BigInt> coeffs;  // size degree + 1

    RatPoly to_ratpoly() const {
        std::vector<BigRat> c(coeffs.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i];
        return RatPoly(std::move(c));
    }
};

/// H_m by the recurrence H_{m+1} = 2x H_m - 2m H_{m-1}, exactly.
inline HermitePoly hermite(int m) {
    if (m < 0) throw std::invalid_argument("Hermite degree must be nonnegative");
    if (m > kHermiteBudget)
        throw BudgetExceeded("Hermite budget is m <= " + std::to_string(kHermiteBudget));
    std::vector<BigInt> prev = {1};       // H_0
    if (m == 0) return {0, std::move(prev)};
    std::vector<BigInt> cur = {0, 2};     // H_1
    for (int k = 1; k < m; ++k) {
        std::vector<BigInt> next(cur.size() + 1);
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += 2 * cur[i];
        for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= 2 * k * prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return {m, std::move(cur)};
}

/// H_m'' - 2x H_m' + 2m H_m, exactly; the zero polynomial when the recurrence
/// is implemented correctly.
inline RatPoly hermite_ode_residual(int m) {
    const RatPoly h = hermite(m).to_ratpoly();
    const RatPoly xpoly({BigRat(0), BigRat(1)});
    return h.derivative().derivative() - BigRat(2) * (xpoly * h.derivative()) +
           BigRat(2 * m) * h;
}

/// Normalizing constant gamma_m = (2^m m! sqrt(pi))^{-1/2}.
inline double gamma_norm(int m) {
    if (m < 0 || m > kHermiteBudget)
        throw BudgetExceeded("gamma budget is 0 <= m <= " + std::to_string(kHermiteBudget));
    double f = std::sqrt(M_PI);
    for (int k = 1; k <= m; ++k) f *= 2.0 * k;
    return 1.0 / std::sqrt(f);
}

inline double oscillator_eigenvalue(int n) { return 2.0 * n - 1.0; }

/// Value of H_m at x in doubles (three-term recurrence).
inline double hermite_value(int m, double x) {
    double p0 = 1.0;
    if (m == 0) return p0;
    double p1 = 2.0 * x;
    for (int k = 1; k < m; ++k) {
        const double p2 = 2.0 * x * p1 - 2.0 * k * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

/// h_n(x) = gamma_{n-1} H_{n-1}(x) e^{-x^2/2} for n >= 1.
inline double oscillator_h(int n, double x) {
    return gamma_norm(n - 1) * hermite_value(n - 1, x) * std::exp(-0.5 * x * x);
}

/// Polynomial factor of d^m/dx^m [H_p(x) e^{-x^2/2}]: G_{p,0} = H_p and
/// G_{p,m+1} = G' - x G. Integer coefficients, exact.
inline RatPoly gaussian_hermite_derivative_poly(int p, int m) {
    RatPoly g = hermite(p).to_ratpoly();
    const RatPoly xpoly({BigRat(0), BigRat(1)});
    for (int k = 0; k < m; ++k) g = g.derivative() - xpoly * g;
    return g;
}

/// m-th derivative of h_n at x.
inline double oscillator_h_derivative(int n, int m, double x) {
    const RatPoly g = gaussian_hermite_derivative_poly(n - 1, m);
    return gamma_norm(n - 1) * g(x) * std::exp(-0.5 * x * x);
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature: integrates f(x) e^{-x^2} exactly for polynomial f
// of degree <= 2k - 1. Nodes are the roots of H_k, located by scanning the
// normalized (bounded) Hermite function and bisecting each sign change.
// ---------------------------------------------------------------------------

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // for integrals of f(x) e^{-x^2}
};

namespace detail {

/// Normalized Hermite function psi_k(x) = gamma_k H_k(x) e^{-x^2/2}; stays
/// O(1) for all k and x, so root scanning is overflow-free.
inline double normalized_hermite_function(int k, double x) {
    double p0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (k == 0) return p0;
    double p1 = std::sqrt(2.0) * x * p0;
    for (int j = 1; j < k; ++j) {
        const double p2 =
            std::sqrt(2.0 / (j + 1.0)) * x * p1 - std::sqrt(j / (j + 1.0)) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

}  // namespace detail

inline GaussHermiteRule gauss_hermite_rule(int k) {
    if (k < 1 || k > 2 * kHermiteBudget) throw BudgetExceeded("quadrature order out of range");
    auto psi = [k](double x) { return detail::normalized_hermite_function(k, x); };

    // All roots lie inside |x| < sqrt(2k + 1).
    const double bound = std::sqrt(2.0 * k + 1.0) + 0.5;
    const int samples = 80 * k;
    std::vector<double> roots;
    double xa = -bound, fa = psi(xa);
    for (int i = 1; i <= samples; ++i) {
        const double xb = -bound + 2.0 * bound * i / samples;
        const double fb = psi(xb);
        if (fa == 0.0) roots.push_back(xa);
        else if (fa * fb < 0.0) {
            double lo = xa, hi = xb, flo = fa;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = psi(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        xa = xb;
        fa = fb;
    }
    if (static_cast<int>(roots.size()) != k)
        throw VerificationFailure("Gauss-Hermite root scan found " +
                                  std::to_string(roots.size()) + " of " + std::to_string(k));

    GaussHermiteRule rule;
    rule.nodes = roots;
    rule.weights.resize(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        const double x = roots[i];
        const double psi_prev = detail::normalized_hermite_function(k - 1, x);
        // w_i = 1 / (k psi_{k-1}(x_i)^2 e^{x_i^2}); the gaussian factors are
        // kept explicit so weights pair with plain polynomial values.
        rule.weights[i] = 1.0 / (k * psi_prev * psi_prev * std::exp(x * x));
    }
    return rule;
}

// ---------------------------------------------------------------------------
// Slater determinant of oscillator eigenfunctions.
// ---------------------------------------------------------------------------

/// P_n evaluated in doubles as the plain product of pairwise differences;
/// numerically stable at any scale.
inline double difference_product_value(const std::vector<double>& x) {
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) prod *= x[i] - x[j];
    return prod;
}

/// Slater determinant det[h_i(x_j)] for the oscillator eigenfunctions.
inline double oscillator_slater_det(int n, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("need n points");
    Matrix a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                oscillator_h(i + 1, x[static_cast<std::size_t>(j)]);
    return lu_det(std::move(a));
}

/// The constant B_n with det[h_i(x_j)] = B_n e^{-|x|^2/2} P_n(x):
/// B_n = (-1)^{n(n-1)/2} 2^{n(n-1)/2} prod_{m<n} gamma_m. Verified against 20
/// random well-separated points to 1e-8 relative; a mismatch means a sign
/// convention broke and raises VerificationFailure.
inline double slater_vandermonde_constant(int n) {
    if (n < 1 || n > 7) throw BudgetExceeded("constant verified for 1 <= n <= 7");
    double b = 1.0;
    for (int m = 0; m < n; ++m) b *= gamma_norm(m);
    b *= std::pow(2.0, 0.5 * n * (n - 1));
    if ((n * (n - 1) / 2) % 2 == 1) b = -b;

    if (n >= 2) {
        SplitMix64 rng(0xB5u + static_cast<std::uint64_t>(n));
        for (int trial = 0; trial < 20; ++trial) {
            // ordered points with gaps in [0.4, 1.0], centered near zero
            std::vector<double> x(static_cast<std::size_t>(n));
            double acc = 0.0, sum = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += (i == 0) ? rng.uniform(-1.0, 0.0) : rng.uniform(0.4, 1.0);
                x[static_cast<std::size_t>(i)] = acc;
                sum += acc;
            }
            const double mean = sum / n;
            double norm2 = 0.0;
            for (auto& v : x) {
                v -= mean;
                norm2 += v * v;
            }
            const double pn_val = difference_product_value(x);
            const double lhs = oscillator_slater_det(n, x);
            const double rhs = b * std::exp(-0.5 * norm2) * pn_val;
            if (std::abs(lhs - rhs) > 1e-8 * std::abs(lhs))
                throw VerificationFailure("Slater/Vandermonde prefactor mismatch at n = " +
                                          std::to_string(n));
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Exact zero counting for linear combinations sum b_j h_j.
// ---------------------------------------------------------------------------

/// Exact polynomial part of sum_j b_j h_j after stripping the positive
/// gaussian: coefficients b_j gamma_{j-1} are snapped to rationals
/// (continued fractions, 1e-12 relative) and contracted with the exact
/// Hermite coefficients.
inline RatPoly oscillator_combination_poly(const std::vector<double>& b) {
    RatPoly p;
    for (std::size_t j = 0; j < b.size(); ++j) {
        if (b[j] == 0.0) continue;
        const BigRat beta = rationalize(b[j] * gamma_norm(static_cast<int>(j)), 1e-12);
        p = p + beta * hermite(static_cast<int>(j)).to_ratpoly();
    }
    return p;
}

/// Total number of real zeros, counted with multiplicities, of the
/// combination sum b_j h_j over the first n = b.size() eigenfunctions.
/// Exact Sturm-chain count on the rationalized polynomial part.
inline int oscillator_zero_count(const std::vector<double>& b) {
    if (b.size() > 12) throw BudgetExceeded("combination budget is n <= 12");
    bool all_zero = true;
    for (double v : b)
        if (v != 0.0) all_zero = false;
    if (b.empty() || all_zero) throw ZeroVector("coefficient vector is zero");

    // Rescale by a power of two: exact in binary floating point, so a
    // coefficient vector engineered to hit an exact rational polynomial
    // (hence a multiple root) keeps that structure through the snap.
    double maxabs = 0.0;
    for (double v : b) maxabs = std::max(maxabs, std::abs(v));
    const double scale = std::exp2(std::ilogb(maxabs));
    std::vector<double> bs(b);
    for (double& v : bs) v /= scale;

    const RatPoly p = oscillator_combination_poly(bs);
    if (p.is_zero()) throw ZeroVector("combination rationalized to zero");
    return count_real_roots_with_multiplicity(p);
}

// ---------------------------------------------------------------------------
// Exact confluent determinants: columns of eigenfunction derivatives at
// grouped points. Stripping the row factor gamma_{i-1} and the column factor
// e^{-c^2/2} leaves rational matrices, so vanishing orders are decided by
// exact division rather than tolerances.
// ---------------------------------------------------------------------------

/// One prescribed zero: rational location and multiplicity.
struct RationalNode {
    BigRat location;
    int multiplicity = 1;
};

namespace detail {

/// Stripped constraint columns: entry (i, col) = G_{i, m}(c_g) for column
/// (g, m), m < multiplicity of group g. Rows i = 0..n-1.
inline std::vector<std::vector<BigRat>> oscillator_constraint_columns(
    int n, const std::vector<RationalNode>& nodes) {
    int total = 0;
    for (const auto& nd : nodes) total += nd.multiplicity;
    std::vector<std::vector<BigRat>> cols;
    cols.reserve(static_cast<std::size_t>(total));
    for (const auto& nd : nodes)
        for (int m = 0; m < nd.multiplicity; ++m) {
            std::vector<BigRat> col(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                col[static_cast<std::size_t>(i)] =
                    gaussian_hermite_derivative_poly(i, m)(nd.location);
            cols.push_back(std::move(col));
        }
    return cols;
}

inline void check_sorted_nodes(const std::vector<RationalNode>& nodes) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i].location < nodes[i + 1].location))
            throw std::invalid_argument("node locations must be strictly increasing");
    for (const auto& nd : nodes)
        if (nd.multiplicity < 1) throw std::invalid_argument("multiplicities must be positive");
}

}  // namespace detail

/// Exact polynomial part of the confluent determinant
/// |h(c_1) ... h^{(k_1-1)}(c_1) ... h(x)| over the first n oscillator
/// eigenfunctions, with sum k_j = n - 1. Equal to the true function of x up
/// to a positive constant times e^{-x^2/2}.
inline RatPoly oscillator_confluent_poly(int n, const std::vector<RationalNode>& nodes) {
    detail::check_sorted_nodes(nodes);
    int total = 0;
    for (const auto& nd : nodes) total += nd.multiplicity;
    if (total != n - 1) throw std::invalid_argument("multiplicities must sum to n - 1");
    if (n > 8) throw BudgetExceeded("exact confluent budget is n <= 8");

    const auto cols = detail::oscillator_constraint_columns(n, nodes);
    RatPoly p;
    for (int i = 0; i < n; ++i) {
        // minor: drop row i, keep all constraint columns
        std::vector<std::vector<BigRat>> minor;
        minor.reserve(static_cast<std::size_t>(n - 1));
        for (int r = 0; r < n; ++r) {
            if (r == i) continue;
            std::vector<BigRat> row(cols.size());
            for (std::size_t c = 0; c < cols.size(); ++c) row[c] = cols[c][static_cast<std::size_t>(r)];
            minor.push_back(std::move(row));
        }
        BigRat cof = rational_det(std::move(minor));
        if ((i + n) % 2 == 0) cof = -cof;  // (-1)^{n+j}, row index j = i + 1
        if (cof != 0) p = p + cof * hermite(i).to_ratpoly();
    }
    return p;
}

/// Exact determinant of the square confluent matrix (sum k_j = n), stripped
/// of its positive row/column factors. Nonzero by linear independence of the
/// derivative vectors; the sign matches the full determinant's.
inline BigRat oscillator_confluent_square_det(int n, const std::vector<RationalNode>& nodes) {
    detail::check_sorted_nodes(nodes);
    int total = 0;
    for (const auto& nd : nodes) total += nd.multiplicity;
    if (total != n) throw std::invalid_argument("multiplicities must sum to n");
    if (n > 8) throw BudgetExceeded("exact confluent budget is n <= 8");

    const auto cols = detail::oscillator_constraint_columns(n, nodes);
    std::vector<std::vector<BigRat>> a(static_cast<std::size_t>(n),
                                       std::vector<BigRat>(static_cast<std::size_t>(n)));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
    return rational_det(std::move(a));
}

}  // namespace sturmslater

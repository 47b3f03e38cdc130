#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sturmslater/errors.hpp"
#include "sturmslater/rng.hpp"

namespace sturmslater {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Sparse multivariate polynomial with arbitrary-precision integer
/// coefficients. All operations are exact; zero coefficients are never stored.
class MultiPoly {
public:
    using Monomial = std::vector<int>;  // exponent per variable

    explicit MultiPoly(int nvars) : nvars_(nvars) {
        if (nvars < 1) throw std::invalid_argument("MultiPoly needs at least one variable");
    }

    static MultiPoly constant(int nvars, BigInt c) {
        MultiPoly p(nvars);
        if (c != 0) p.terms_[Monomial(static_cast<std::size_t>(nvars), 0)] = std::move(c);
        return p;
    }

    static MultiPoly variable(int nvars, int i) {
        MultiPoly p(nvars);
        Monomial m(static_cast<std::size_t>(nvars), 0);
        m[static_cast<std::size_t>(i)] = 1;
        p.terms_[std::move(m)] = 1;
        return p;
    }

    static MultiPoly monomial(int nvars, Monomial m, BigInt c) {
        MultiPoly p(nvars);
        if (c != 0) p.terms_[std::move(m)] = std::move(c);
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const std::map<Monomial, BigInt>& terms() const { return terms_; }

    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() != 1) return false;
        for (int e : terms_.begin()->first)
            if (e != 0) return false;
        return true;
    }

    /// Value of a constant polynomial (zero polynomial included).
    BigInt constant_value() const {
        if (!is_constant()) throw NotConstant("polynomial has positive degree");
        return terms_.empty() ? BigInt(0) : terms_.begin()->second;
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& [m, c] : terms_) {
            int d = 0;
            for (int e : m) d += e;
            if (d > deg) deg = d;
        }
        return deg;
    }

    MultiPoly operator-() const {
        MultiPoly r(nvars_);
        for (const auto& [m, c] : terms_) r.terms_[m] = -c;
        return r;
    }

    MultiPoly& operator+=(const MultiPoly& o) {
        check_vars(o);
        for (const auto& [m, c] : o.terms_) {
            auto it = terms_.find(m);
            if (it == terms_.end()) {
                terms_[m] = c;
            } else {
                it->second += c;
                if (it->second == 0) terms_.erase(it);
            }
        }
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) { return *this += -o; }

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        a.check_vars(b);
        MultiPoly r(a.nvars_);
        Monomial m(static_cast<std::size_t>(a.nvars_));
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) {
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
                auto it = r.terms_.find(m);
                if (it == r.terms_.end()) {
                    BigInt prod = ca * cb;
                    if (prod != 0) r.terms_.emplace(m, std::move(prod));
                } else {
                    it->second += ca * cb;
                    if (it->second == 0) r.terms_.erase(it);
                }
            }
        }
        return r;
    }

    bool operator==(const MultiPoly& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

    /// Exact partial derivative with respect to variable i.
    MultiPoly partial(int i) const {
        MultiPoly r(nvars_);
        const auto idx = static_cast<std::size_t>(i);
        for (const auto& [m, c] : terms_) {
            if (m[idx] == 0) continue;
            Monomial d = m;
            --d[idx];
            r.terms_[std::move(d)] = c * m[idx];
        }
        return r;
    }

    /// Exact evaluation at a rational point.
    BigRat evaluate(const std::vector<BigRat>& x) const {
        if (x.size() != static_cast<std::size_t>(nvars_))
            throw std::invalid_argument("evaluation point has wrong dimension");
        // Powers are cached per variable; exponents stay small (< nvars).
        std::vector<std::vector<BigRat>> pow(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) pow[i].push_back(1);
        auto power = [&](std::size_t i, int e) -> const BigRat& {
            auto& p = pow[i];
            while (static_cast<int>(p.size()) <= e) p.push_back(p.back() * x[i]);
            return p[static_cast<std::size_t>(e)];
        };
        BigRat acc = 0;
        for (const auto& [m, c] : terms_) {
            BigRat t = c;
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m[i] != 0) t *= power(i, m[i]);
            acc += t;
        }
        return acc;
    }

private:
    void check_vars(const MultiPoly& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("variable-count mismatch");
    }

    int nvars_;
    std::map<Monomial, BigInt> terms_;
};

// Expanded-polynomial budget: n! monomials at n = 8 is the supported ceiling.
inline constexpr int kVandermondeBudget = 8;

namespace detail {
inline void check_vdm_budget(int n) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (n > kVandermondeBudget)
        throw BudgetExceeded("exact Vandermonde budget is n <= " +
                             std::to_string(kVandermondeBudget));
}
}  // namespace detail

/// prod_{j=i+1..nvars} (x_i - x_j), the factor with pivot variable i in the
/// nested-product form of the Vandermonde polynomial. 1 when i is last.
inline MultiPoly difference_product(int nvars, int i) {
    MultiPoly p = MultiPoly::constant(nvars, 1);
    for (int j = i + 1; j < nvars; ++j)
        p = p * (MultiPoly::variable(nvars, i) - MultiPoly::variable(nvars, j));
    return p;
}

/// The expanded Vandermonde polynomial P_n = prod_{i<j} (x_i - x_j); P_1 = 1.
inline MultiPoly vandermonde_poly(int n) {
    detail::check_vdm_budget(n);
    MultiPoly p = MultiPoly::constant(n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            p = p * (MultiPoly::variable(n, i) - MultiPoly::variable(n, j));
    return p;
}

/// Exact determinant of a square rational matrix by fraction-free (Bareiss)
/// elimination. The input is consumed.
inline BigRat rational_det(std::vector<std::vector<BigRat>> a) {
    const int n = static_cast<int>(a.size());
    if (n == 0) return 1;
    BigRat prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        if (a[ku][ku] == 0) {
            int swap_row = -1;
            for (int r = k + 1; r < n; ++r)
                if (a[static_cast<std::size_t>(r)][ku] != 0) {
                    swap_row = r;
                    break;
                }
            if (swap_row < 0) return 0;  // singular
            std::swap(a[ku], a[static_cast<std::size_t>(swap_row)]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                auto& aij = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                aij = (aij * a[ku][ku] -
                       a[static_cast<std::size_t>(i)][ku] * a[ku][static_cast<std::size_t>(j)]) /
                      prev;
            }
        prev = a[ku][ku];
    }
    return sign * a[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(n - 1)];
}

/// Determinant of the moment matrix with rows (1, x, ..., x^{n-1}) evaluated
/// at the given points, by exact fraction-free elimination.
/// Satisfies P_n(points) = (-1)^{n(n-1)/2} * det.
inline BigRat vandermonde_det(const std::vector<BigRat>& points) {
    const int n = static_cast<int>(points.size());
    detail::check_vdm_budget(n);
    std::vector<std::vector<BigRat>> a(static_cast<std::size_t>(n),
                                       std::vector<BigRat>(static_cast<std::size_t>(n)));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            BigRat v = 1;
            for (int k = 0; k < r; ++k) v *= points[static_cast<std::size_t>(c)];
            a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = v;
        }
    return rational_det(std::move(a));
}

/// Exact Laplacian sum_i d^2 p / dx_i^2.
inline MultiPoly laplacian(const MultiPoly& p) {
    MultiPoly r(p.nvars());
    for (int i = 0; i < p.nvars(); ++i) r += p.partial(i).partial(i);
    return r;
}

/// Applies the corner derivative d_{x_2} d^2_{x_3} ... d^{n-1}_{x_n}.
inline MultiPoly corner_derivative(MultiPoly p) {
    for (int i = 1; i < p.nvars(); ++i)
        for (int k = 0; k < i; ++k) p = p.partial(i);
    return p;
}

/// Raw value of the corner derivative applied to P_n. The magnitude is the
/// factorial product (n-1)! (n-2)! ... 2!; the sign is (-1)^{n(n-1)/2}, which
/// the determinant form of P_n carries along.
inline BigInt mixed_derivative_raw(int n) {
    detail::check_vdm_budget(n);
    return corner_derivative(vandermonde_poly(n)).constant_value();
}

/// The factorial constant (n-1)! (n-2)! ... 2! extracted from the corner
/// derivative of P_n by removing the antisymmetry sign. Throws NotConstant if
/// the derivative fails to collapse to degree zero.
inline BigInt mixed_derivative_constant(int n) {
    const BigInt raw = mixed_derivative_raw(n);
    return (n * (n - 1) / 2) % 2 == 0 ? raw : -raw;
}

/// A sorted list of distinct rational values with positive multiplicities:
/// the combinatorial data of a grouped point (c1,...,c1, c2,...,c2, ...).
class GroupedPoint {
public:
    GroupedPoint(std::vector<BigRat> values, std::vector<int> multiplicities)
        : values_(std::move(values)), mult_(std::move(multiplicities)) {
        if (values_.empty() || values_.size() != mult_.size())
            throw std::invalid_argument("grouped point needs matching values/multiplicities");
        for (std::size_t i = 0; i + 1 < values_.size(); ++i)
            if (!(values_[i] < values_[i + 1]))
                throw std::invalid_argument("grouped point values must be strictly increasing");
        for (int k : mult_)
            if (k < 1) throw std::invalid_argument("multiplicities must be positive");
    }

    const std::vector<BigRat>& values() const { return values_; }
    const std::vector<int>& multiplicities() const { return mult_; }
    int groups() const { return static_cast<int>(values_.size()); }
    int total() const {
        int t = 0;
        for (int k : mult_) t += k;
        return t;
    }

    /// The grouped point expanded to a full n-vector.
    std::vector<BigRat> expand() const {
        std::vector<BigRat> x;
        x.reserve(static_cast<std::size_t>(total()));
        for (std::size_t g = 0; g < values_.size(); ++g)
            for (int k = 0; k < mult_[g]; ++k) x.push_back(values_[g]);
        return x;
    }

private:
    std::vector<BigRat> values_;
    std::vector<int> mult_;
};

/// The constant rho in the local factorization of P_n near a grouped point:
/// rho = prod_{i<j} (c_i - c_j)^{k_i k_j}. Nonzero since the values are
/// distinct; 1 for a single group.
inline BigRat local_factor_constant(const GroupedPoint& c) {
    detail::check_vdm_budget(c.total());
    BigRat rho = 1;
    const auto& v = c.values();
    const auto& k = c.multiplicities();
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const BigRat d = v[i] - v[j];
            for (int e = 0; e < k[i] * k[j]; ++e) rho *= d;
        }
    return rho;
}

/// Same constant accumulated stage by stage: the i-th stage contributes
/// [(c_i - c_{i+1})^{k_{i+1}} ... (c_i - c_p)^{k_p}]^{k_i}.
inline BigRat local_factor_constant_stagewise(const GroupedPoint& c) {
    BigRat rho = 1;
    const auto& v = c.values();
    const auto& k = c.multiplicities();
    for (std::size_t i = 0; i < v.size(); ++i) {
        BigRat stage = 1;
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            BigRat f = 1;
            for (int e = 0; e < k[j]; ++e) f *= (v[i] - v[j]);
            stage *= f;
        }
        BigRat stage_pow = 1;
        for (int e = 0; e < k[i]; ++e) stage_pow *= stage;
        rho *= stage_pow;
    }
    return rho;
}

/// Exact ratio P_n(c + t*eta) / [rho(c) * prod_g P_{k_g}(t * eta_g)] for one
/// displacement direction. The denominator blocks take the group-local slices
/// of eta. Tends to 1 as t -> 0.
inline BigRat local_factor_ratio(const GroupedPoint& c, const std::vector<BigRat>& eta,
                                 const BigRat& t) {
    const int n = c.total();
    detail::check_vdm_budget(n);
    if (eta.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("direction has wrong dimension");

    const std::vector<BigRat> base = c.expand();
    std::vector<BigRat> shifted(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) shifted[i] = base[i] + t * eta[i];
    const BigRat num = vandermonde_poly(n).evaluate(shifted);

    BigRat den = local_factor_constant(c);
    std::size_t offset = 0;
    for (std::size_t g = 0; g < c.values().size(); ++g) {
        const int kg = c.multiplicities()[g];
        std::vector<BigRat> slice(static_cast<std::size_t>(kg));
        for (int i = 0; i < kg; ++i) slice[static_cast<std::size_t>(i)] = t * eta[offset + i];
        den *= vandermonde_poly(kg).evaluate(slice);
        offset += static_cast<std::size_t>(kg);
    }
    if (den == 0)
        throw std::invalid_argument("direction must have distinct coordinates inside each group");
    return num / den;
}

struct LocalFactorReport {
    std::vector<double> t;              // probed displacement scales
    std::vector<double> max_deviation;  // max |r(t) - 1| over directions, per t
    double fitted_slope = 0.0;          // max over t of max_deviation / t
};

namespace detail {

/// Random direction with rational coordinates in [-1/2, 1/2], distinct inside
/// each multiplicity group so that the denominator blocks cannot vanish.
inline std::vector<BigRat> random_group_direction(const GroupedPoint& c, SplitMix64& rng) {
    const int n = c.total();
    std::vector<BigRat> eta(static_cast<std::size_t>(n));
    std::size_t offset = 0;
    for (std::size_t g = 0; g < c.values().size(); ++g) {
        const int kg = c.multiplicities()[g];
        for (int i = 0; i < kg; ++i) {
            for (;;) {
                const BigRat v(rng.uniform_int(-32, 32), 64);
                bool fresh = true;
                for (int j = 0; j < i; ++j)
                    if (eta[offset + j] == v) fresh = false;
                if (fresh) {
                    eta[offset + i] = v;
                    break;
                }
            }
        }
        offset += static_cast<std::size_t>(kg);
    }
    return eta;
}

}  // namespace detail

/// Probes the local factorization of P_n near a grouped point: for random
/// directions and t in {1e-2, 1e-3, 1e-4}, evaluates the exact ratio r(t) and
/// records max |r(t) - 1| per t. The correction term vanishes linearly, so
/// the slope fitted at the coarsest t must bound the finer scales; a
/// violation means the factorization constant is wrong and raises
/// VerificationFailure.
inline LocalFactorReport check_local_factorization(const GroupedPoint& c, int trials,
                                                   std::uint64_t seed = 42) {
    static const BigRat kScales[3] = {BigRat(1, 100), BigRat(1, 1000), BigRat(1, 10000)};
    SplitMix64 rng(seed);
    std::vector<std::vector<BigRat>> dirs;
    dirs.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) dirs.push_back(detail::random_group_direction(c, rng));

    LocalFactorReport report;
    for (const BigRat& t : kScales) {
        double worst = 0.0;
        for (const auto& eta : dirs) {
            const BigRat dev = local_factor_ratio(c, eta, t) - 1;
            const double d = std::abs(static_cast<double>(dev));
            if (d > worst) worst = d;
        }
        report.t.push_back(static_cast<double>(t));
        report.max_deviation.push_back(worst);
        const double slope = worst / static_cast<double>(t);
        if (slope > report.fitted_slope) report.fitted_slope = slope;
    }
    const double fitted = 1.25 * report.max_deviation[0] / report.t[0];
    for (std::size_t i = 1; i < report.t.size(); ++i)
        if (report.max_deviation[i] > fitted * report.t[i])
            throw VerificationFailure("local factorization deviation is not O(t) at t = " +
                                      std::to_string(report.t[i]));
    return report;
}

/// Quotient and remainder of p under division by (x_i - x_j): the remainder
/// is p with x_i replaced by x_j, and p = (x_i - x_j) * quotient + remainder
/// exactly.
inline std::pair<MultiPoly, MultiPoly> divide_by_difference(const MultiPoly& p, int i, int j) {
    const int n = p.nvars();
    MultiPoly quotient(n);
    MultiPoly remainder(n);
    const auto xi = static_cast<std::size_t>(i);
    const auto xj = static_cast<std::size_t>(j);
    for (const auto& [m, c] : p.terms()) {
        const int k = m[xi];
        MultiPoly::Monomial base = m;
        base[xi] = 0;
        // x_i^k = (x_i - x_j) * sum_{t<k} x_i^t x_j^{k-1-t} + x_j^k
        for (int t = 0; t < k; ++t) {
            MultiPoly::Monomial q = base;
            q[xi] = t;
            q[xj] += k - 1 - t;
            quotient += MultiPoly::monomial(n, std::move(q), c);
        }
        MultiPoly::Monomial r = base;
        r[xj] += k;
        remainder += MultiPoly::monomial(n, std::move(r), c);
    }
    return {std::move(quotient), std::move(remainder)};
}

}  // namespace sturmslater

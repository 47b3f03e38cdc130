#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sturmslater {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Dense univariate polynomial over the rationals, little-endian coefficient
/// order, always normalized (no stored leading zeros). All arithmetic is
/// exact; this is the workhorse behind Sturm-chain root counting.
class RatPoly {
public:
    RatPoly() = default;  // zero polynomial
    explicit RatPoly(std::vector<BigRat> coeffs) : c_(std::move(coeffs)) { normalize(); }
    static RatPoly constant(BigRat v) { return RatPoly({std::move(v)}); }
    static RatPoly monomial(int degree, BigRat v) {
        std::vector<BigRat> c(static_cast<std::size_t>(degree) + 1);
        c.back() = std::move(v);
        return RatPoly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    const std::vector<BigRat>& coeffs() const { return c_; }
    BigRat coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[static_cast<std::size_t>(i)]
                                                           : BigRat(0);
    }
    const BigRat& leading() const { return c_.back(); }

    BigRat operator()(const BigRat& x) const {
        BigRat acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    double operator()(double x) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it)
            acc = acc * x + static_cast<double>(*it);
        return acc;
    }

    RatPoly derivative() const {
        if (c_.size() <= 1) return RatPoly();
        std::vector<BigRat> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * BigInt(i);
        return RatPoly(std::move(d));
    }

    friend RatPoly operator+(const RatPoly& a, const RatPoly& b) {
        std::vector<BigRat> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return RatPoly(std::move(c));
    }
    friend RatPoly operator-(const RatPoly& a, const RatPoly& b) {
        std::vector<BigRat> c(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
        return RatPoly(std::move(c));
    }
    friend RatPoly operator*(const RatPoly& a, const RatPoly& b) {
        if (a.is_zero() || b.is_zero()) return RatPoly();
        std::vector<BigRat> c(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return RatPoly(std::move(c));
    }
    friend RatPoly operator*(const BigRat& s, const RatPoly& p) {
        if (s == 0) return RatPoly();
        std::vector<BigRat> c = p.c_;
        for (auto& v : c) v *= s;
        return RatPoly(std::move(c));
    }
    bool operator==(const RatPoly& o) const { return c_ == o.c_; }

    /// Exact Euclidean division: returns (quotient, remainder).
    static std::pair<RatPoly, RatPoly> divmod(const RatPoly& a, const RatPoly& b) {
        if (b.is_zero()) throw std::domain_error("polynomial division by zero");
        std::vector<BigRat> rem = a.c_;
        const int db = b.degree();
        if (a.degree() < db) return {RatPoly(), a};
        std::vector<BigRat> quot(static_cast<std::size_t>(a.degree() - db) + 1);
        for (int i = a.degree(); i >= db; --i) {
            const BigRat q = rem[static_cast<std::size_t>(i)] / b.leading();
            if (q == 0) continue;
            quot[static_cast<std::size_t>(i - db)] = q;
            for (int j = 0; j <= db; ++j)
                rem[static_cast<std::size_t>(i - db + j)] -= q * b.c_[static_cast<std::size_t>(j)];
        }
        return {RatPoly(std::move(quot)), RatPoly(std::move(rem))};
    }

    RatPoly monic() const {
        if (is_zero()) return *this;
        return (BigRat(1) / leading()) * (*this);
    }

    /// Scaled so the leading coefficient has magnitude 1 but keeps its sign;
    /// safe inside Sturm chains where signs are load-bearing.
    RatPoly positive_scaled() const {
        if (is_zero()) return *this;
        const BigRat lead = leading();
        return (BigRat(1) / (lead > 0 ? lead : -lead)) * (*this);
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<BigRat> c_;
};

/// Monic gcd by the Euclidean algorithm (exact).
inline RatPoly poly_gcd(RatPoly a, RatPoly b) {
    while (!b.is_zero()) {
        RatPoly r = RatPoly::divmod(a, b).second;
        a = std::move(b);
        b = std::move(r).monic();  // keeps coefficient growth in check
    }
    return a.monic();
}

/// Yun's square-free decomposition: p = lc * prod_i f_i^i with each f_i monic
/// and square-free. Returns the (f_i, i) pairs with nonconstant f_i.
inline std::vector<std::pair<RatPoly, int>> squarefree_decomposition(const RatPoly& p) {
    std::vector<std::pair<RatPoly, int>> out;
    if (p.degree() < 1) return out;
    const RatPoly pm = p.monic();
    RatPoly g = poly_gcd(pm, pm.derivative());
    RatPoly w = RatPoly::divmod(pm, g).first;
    RatPoly z = RatPoly::divmod(pm.derivative(), g).first - w.derivative();
    int i = 1;
    while (w.degree() > 0) {
        RatPoly a = poly_gcd(w, z);
        if (a.degree() > 0) out.emplace_back(a, i);
        w = RatPoly::divmod(w, a).first;
        z = RatPoly::divmod(z, a).first - w.derivative();
        ++i;
    }
    return out;
}

namespace detail {

inline int sign_of(const BigRat& v) { return v == 0 ? 0 : (v > 0 ? 1 : -1); }

/// Sign variations in the Sturm sequence evaluated at +/- infinity.
inline int sturm_variations_at_infinity(const std::vector<RatPoly>& chain, bool plus) {
    int variations = 0;
    int prev = 0;
    for (const auto& q : chain) {
        if (q.is_zero()) continue;
        int s = sign_of(q.leading());
        if (!plus && q.degree() % 2 == 1) s = -s;
        if (prev != 0 && s != 0 && s != prev) ++variations;
        if (s != 0) prev = s;
    }
    return variations;
}

}  // namespace detail

/// Number of distinct real roots of p via the classical Sturm chain.
inline int count_distinct_real_roots(const RatPoly& p) {
    if (p.degree() < 1) return 0;
    std::vector<RatPoly> chain;
    chain.push_back(p.monic());
    chain.push_back(chain.front().derivative().positive_scaled());
    while (chain.back().degree() > 0) {
        RatPoly r = RatPoly::divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.is_zero()) {
            // shared factor: restart on the square-free part
            const RatPoly sf = RatPoly::divmod(p, poly_gcd(p, p.derivative())).first;
            return count_distinct_real_roots(sf);
        }
        chain.push_back(((BigRat(-1)) * r).positive_scaled());
    }
    return detail::sturm_variations_at_infinity(chain, false) -
           detail::sturm_variations_at_infinity(chain, true);
}

/// Number of real roots counted with multiplicities, exactly.
inline int count_real_roots_with_multiplicity(const RatPoly& p) {
    int total = 0;
    for (const auto& [factor, mult] : squarefree_decomposition(p))
        total += mult * count_distinct_real_roots(factor);
    return total;
}

/// Exact multiplicity of the root c (0 if p(c) != 0).
inline int root_multiplicity(const RatPoly& p, const BigRat& c) {
    if (p.is_zero()) throw std::domain_error("zero polynomial has no root multiplicity");
    RatPoly q = p;
    const RatPoly lin({-c, BigRat(1)});
    int m = 0;
    while (!q.is_zero() && q(c) == 0) {
        q = RatPoly::divmod(q, lin).first;
        ++m;
    }
    return m;
}

/// Nearest rational to v within relative tolerance, by the continued-fraction
/// convergents of v. Exact inputs (integers, small fractions that doubles
/// represent well) snap to themselves.
inline BigRat rationalize(double v, double rel_tol = 1e-12) {
    if (v == 0.0) return BigRat(0);
    if (!std::isfinite(v)) throw std::domain_error("cannot rationalize a non-finite value");
    const bool negative = v < 0.0;
    const double target = std::abs(v);

    double x = target;
    BigInt h_prev = 1, h = BigInt(static_cast<long long>(std::floor(x)));
    BigInt k_prev = 0, k = 1;
    double frac = x - std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        const double approx = static_cast<double>(BigRat(h, k));
        if (std::abs(approx - target) <= rel_tol * target) break;
        if (frac < 1e-18) break;
        x = 1.0 / frac;
        const double a_floor = std::floor(x);
        if (a_floor > 9e18) break;
        const BigInt a(static_cast<long long>(a_floor));
        const BigInt h_next = a * h + h_prev;
        const BigInt k_next = a * k + k_prev;
        h_prev = h;
        k_prev = k;
        h = h_next;
        k = k_next;
        frac = x - a_floor;
    }
    BigRat r(h, k);
    return negative ? -r : r;
}

}  // namespace sturmslater

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sturmslater/errors.hpp"
#include "sturmslater/expr.hpp"
#include "sturmslater/ode.hpp"

namespace sturmslater {

// ---------------------------------------------------------------------------
// Dirichlet spectrum of -y'' + q y = lambda y on [0, 1] by phase (Prufer)
// shooting: the terminal angle theta(1; lambda) increases strictly in lambda
// and crosses j*pi exactly at the j-th eigenvalue, so the index is a winding
// count rather than something inferred from a discretized matrix.
// ---------------------------------------------------------------------------

inline constexpr int kDefaultGrid = 4096;
inline constexpr int kDerivativeOrderCap = 12;

// The terminal angle is flat in lambda at large j (d theta / d lambda decays
// like lambda^{-3/2}), so eigenvalue solving integrates the phase equation
// near machine tolerance; the cheap default stays available for callers that
// only need the angle itself.
inline constexpr double kShootRtol = 3e-14;
inline constexpr double kShootAtol = 1e-14;

struct DirichletProblem {
    Potential potential;

    /// max |q| sampled on a 1025-point uniform grid; feeds bracket bounds.
    double potential_bound() const {
        double m = 0.0;
        for (int i = 0; i <= 1024; ++i)
            m = std::max(m, std::abs(potential(static_cast<double>(i) / 1024.0)));
        return m;
    }
};

/// Terminal phase theta(1; lambda) of theta' = cos^2(theta) +
/// (lambda - q) sin^2(theta), theta(0) = 0.
inline double prufer_terminal_angle(const DirichletProblem& problem, double lambda,
                                    double rtol = 1e-10, double atol = 1e-12) {
    const Potential& q = problem.potential;
    auto rhs = [&](double x, const std::array<double, 1>& y) {
        const double s = std::sin(y[0]);
        const double c = std::cos(y[0]);
        return std::array<double, 1>{c * c + (lambda - q(x)) * s * s};
    };
    return integrate_ode<1>(rhs, {0.0}, 0.0, 1.0, rtol, atol)[0];
}

/// One computed eigenpair: eigenvalue plus the dense (h, h') record on a
/// uniform grid. Evaluation between nodes is piecewise cubic Hermite, which
/// at the default resolution is far below solver error. Values are immutable
/// after construction and safe to share across threads.
class EigenPair {
public:
    EigenPair(int index, double lambda, Potential q, std::shared_ptr<const std::vector<double>> q_nodes,
              std::vector<double> values, std::vector<double> slopes)
        : index_(index),
          lambda_(lambda),
          q_(std::move(q)),
          q_nodes_(std::move(q_nodes)),
          h_(std::move(values)),
          hp_(std::move(slopes)) {
        node_count_ = count_interior_sign_changes();
    }

    int index() const { return index_; }
    double eigenvalue() const { return lambda_; }
    int grid() const { return static_cast<int>(h_.size()) - 1; }

    /// Copy with h replaced by -h.
    EigenPair negated() const {
        std::vector<double> h(h_), hp(hp_);
        for (auto& v : h) v = -v;
        for (auto& v : hp) v = -v;
        return EigenPair(index_, lambda_, q_, q_nodes_, std::move(h), std::move(hp));
    }
    const std::vector<double>& values() const { return h_; }
    const std::vector<double>& slopes() const { return hp_; }
    const Potential& potential() const { return q_; }
    int node_count() const { return node_count_; }

    /// h(x) by cubic Hermite interpolation of the stored (h, h') nodes.
    double value(double x) const {
        const auto [k, t, dx] = locate(x);
        const double y0 = h_[k], y1 = h_[k + 1];
        const double m0 = hp_[k] * dx, m1 = hp_[k + 1] * dx;
        return hermite_cubic(t, y0, y1, m0, m1);
    }

    /// h'(x) by cubic Hermite interpolation of (h', h''), with h'' supplied
    /// by the differential equation at the nodes.
    double derivative(double x) const {
        const auto [k, t, dx] = locate(x);
        const double y0 = hp_[k], y1 = hp_[k + 1];
        const double m0 = second_at_node(k) * dx, m1 = second_at_node(k + 1) * dx;
        return hermite_cubic(t, y0, y1, m0, m1);
    }

    /// m-th derivative: interpolation for m <= 1, then the differential
    /// equation h'' = (q - lambda) h differentiated by the Leibniz rule with
    /// the symbolic derivatives of q.
    double derivative(double x, int m) const {
        if (m < 0) throw std::invalid_argument("negative derivative order");
        if (m > kDerivativeOrderCap)
            throw OrderBudget("derivative order cap is " + std::to_string(kDerivativeOrderCap));
        if (m == 0) return value(x);
        if (m == 1) return derivative(x);
        std::vector<double> d(static_cast<std::size_t>(m) + 1);
        d[0] = value(x);
        d[1] = derivative(x);
        std::vector<double> qd;  // q^{(i)}(x) for i <= m - 2
        for (int i = 0; i + 2 <= m; ++i) qd.push_back(q_.derivative(i, x));
        for (int k = 2; k <= m; ++k) {
            // h^{(k)} = sum_i C(k-2, i) q^{(i)} h^{(k-2-i)} - lambda h^{(k-2)}
            double acc = -lambda_ * d[static_cast<std::size_t>(k - 2)];
            double binom = 1.0;
            for (int i = 0; i <= k - 2; ++i) {
                acc += binom * qd[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(k - 2 - i)];
                binom = binom * (k - 2 - i) / (i + 1);
            }
            d[static_cast<std::size_t>(k)] = acc;
        }
        return d[static_cast<std::size_t>(m)];
    }

private:
    static double hermite_cubic(double t, double y0, double y1, double m0, double m1) {
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }

    std::tuple<std::size_t, double, double> locate(double x) const {
        if (x < 0.0 || x > 1.0) throw std::invalid_argument("x outside [0, 1]");
        const int m = grid();
        const double dx = 1.0 / m;
        int k = static_cast<int>(x * m);
        if (k >= m) k = m - 1;
        const double t = x * m - k;
        return {static_cast<std::size_t>(k), t, dx};
    }

    double second_at_node(std::size_t k) const {
        return ((*q_nodes_)[k] - lambda_) * h_[k];
    }

    int count_interior_sign_changes() const {
        const int m = grid();
        double scale = 0.0;
        for (double v : h_) scale = std::max(scale, std::abs(v));
        const double tol = 1e-9 * scale;
        int changes = 0;
        int prev = 0;
        for (int i = 1; i < m; ++i) {
            const double v = h_[static_cast<std::size_t>(i)];
            if (std::abs(v) <= tol) continue;  // node sitting on a zero
            const int s = v > 0 ? 1 : -1;
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
        return changes;
    }

    int index_;
    double lambda_;
    Potential q_;
    std::shared_ptr<const std::vector<double>> q_nodes_;
    std::vector<double> h_, hp_;
    int node_count_ = 0;
};

namespace detail {

inline std::shared_ptr<const std::vector<double>> sample_potential(const Potential& q, int grid) {
    auto nodes = std::make_shared<std::vector<double>>(static_cast<std::size_t>(grid) + 1);
    for (int i = 0; i <= grid; ++i)
        (*nodes)[static_cast<std::size_t>(i)] = q(static_cast<double>(i) / grid);
    return nodes;
}

inline EigenPair integrate_eigenfunction(const DirichletProblem& problem, int j, double lambda,
                                         int grid,
                                         std::shared_ptr<const std::vector<double>> q_nodes) {
    const Potential& q = problem.potential;
    auto rhs = [&](double x, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], (q(x) - lambda) * y[0]};
    };
    std::vector<double> h(static_cast<std::size_t>(grid) + 1);
    std::vector<double> hp(static_cast<std::size_t>(grid) + 1);
    integrate_ode_sampled<2>(
        rhs, {0.0, 1.0}, 0.0, 1.0, grid,
        [&](int i, double, const std::array<double, 2>& y) {
            h[static_cast<std::size_t>(i)] = y[0];
            hp[static_cast<std::size_t>(i)] = y[1];
        },
        1e-12, 1e-13);

    // composite Simpson for the L^2 norm on the dense grid
    double integral = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double w = (i == 0 || i == grid) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        integral += w * h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
    }
    integral /= 3.0 * grid;
    const double inv_norm = 1.0 / std::sqrt(integral);
    for (auto& v : h) v *= inv_norm;
    for (auto& v : hp) v *= inv_norm;

    EigenPair pair(j, lambda, q, std::move(q_nodes), std::move(h), std::move(hp));
    if (pair.node_count() != j - 1)
        throw VerificationFailure("eigenfunction " + std::to_string(j) + " shows " +
                                  std::to_string(pair.node_count()) + " sign changes");
    return pair;
}

}  // namespace detail

/// Solves for the j-th Dirichlet eigenpair: brackets theta(1; lambda) = j*pi,
/// bisects to width 1e-11 (1 + |lambda|), polishes with three secant steps,
/// then re-integrates the linear equation and normalizes to unit L^2 norm.
/// The returned eigenfunction satisfies h'(0) > 0.
inline EigenPair solve_eigen(const DirichletProblem& problem, int j, int n_grid = kDefaultGrid) {
    if (j < 1) throw std::invalid_argument("eigenvalue index must be >= 1");
    if (n_grid < 256) throw std::invalid_argument("grid must be at least 256");
    if (n_grid % 2 == 1) ++n_grid;  // Simpson needs an even cell count

    const double qbound = problem.potential_bound();
    const double target = j * M_PI;

    double lo = -qbound - 1.0;
    double hi = j * j * M_PI * M_PI + qbound + 1.0;
    auto shoot = [&](double lambda) {
        return prufer_terminal_angle(problem, lambda, kShootRtol, kShootAtol);
    };
    double theta_lo = shoot(lo);
    double theta_hi = shoot(hi);
    while (theta_lo >= target) {
        lo -= 2.0 * (hi - lo);
        if (std::abs(lo) > 1e8) throw BracketFailure("no lower bracket within |lambda| <= 1e8");
        theta_lo = shoot(lo);
    }
    while (theta_hi <= target) {
        hi += 2.0 * (hi - lo);
        if (std::abs(hi) > 1e8) throw BracketFailure("no upper bracket within |lambda| <= 1e8");
        theta_hi = shoot(hi);
    }

    while (hi - lo > 1e-11 * (1.0 + std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        const double theta_mid = shoot(mid);
        if (theta_mid < target) {
            lo = mid;
            theta_lo = theta_mid;
        } else {
            hi = mid;
            theta_hi = theta_mid;
        }
    }

    // secant refinement on theta(1; lambda) - j pi
    double a = lo, fa = theta_lo - target;
    double b = hi, fb = theta_hi - target;
    for (int iter = 0; iter < 3 && fb != fa; ++iter) {
        const double c = b - fb * (b - a) / (fb - fa);
        if (!std::isfinite(c)) break;
        a = b;
        fa = fb;
        b = c;
        fb = shoot(b) - target;
    }
    const double lambda = b;

    return detail::integrate_eigenfunction(problem, j, lambda, n_grid,
                                           detail::sample_potential(problem.potential, n_grid));
}

/// The first n Dirichlet eigenpairs on a shared grid.
class SpectralBasis {
public:
    static SpectralBasis build(const DirichletProblem& problem, int n, int grid = kDefaultGrid) {
        if (n < 1) throw std::invalid_argument("basis size must be >= 1");
        SpectralBasis basis;
        basis.problem_ = problem;
        basis.pairs_.reserve(static_cast<std::size_t>(n));
        for (int j = 1; j <= n; ++j) basis.pairs_.push_back(solve_eigen(problem, j, grid));
        return basis;
    }

    const DirichletProblem& problem() const { return problem_; }
    int size() const { return static_cast<int>(pairs_.size()); }
    int grid() const { return pairs_.front().grid(); }

    /// 1-based access matching the eigenvalue index.
    const EigenPair& operator[](int j) const { return pairs_.at(static_cast<std::size_t>(j - 1)); }

    const std::vector<EigenPair>& pairs() const { return pairs_; }

    /// Replaces pair j (1-based); used by sign normalization.
    void replace(int j, EigenPair pair) { pairs_.at(static_cast<std::size_t>(j - 1)) = std::move(pair); }

    /// The sub-basis of the first n pairs. Sign normalization commutes with
    /// truncation because the flip for index k only probes indices <= k.
    SpectralBasis truncated(int n) const {
        if (n < 1 || n > size()) throw std::invalid_argument("truncation size out of range");
        SpectralBasis b;
        b.problem_ = problem_;
        b.pairs_.assign(pairs_.begin(), pairs_.begin() + n);
        return b;
    }

private:
    DirichletProblem problem_{Potential::parse("0")};
    std::vector<EigenPair> pairs_;
};

/// Gram matrix of the basis under composite Simpson on the dense grid.
inline std::vector<std::vector<double>> gram_matrix(const SpectralBasis& basis) {
    const int n = basis.size();
    const int grid = basis.grid();
    std::vector<std::vector<double>> g(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    for (int a = 1; a <= n; ++a)
        for (int b = a; b <= n; ++b) {
            const auto& ha = basis[a].values();
            const auto& hb = basis[b].values();
            double integral = 0.0;
            for (int i = 0; i <= grid; ++i) {
                const double w = (i == 0 || i == grid) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
                integral += w * ha[static_cast<std::size_t>(i)] * hb[static_cast<std::size_t>(i)];
            }
            integral /= 3.0 * grid;
            g[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] = integral;
            g[static_cast<std::size_t>(b - 1)][static_cast<std::size_t>(a - 1)] = integral;
        }
    return g;
}

/// Largest deviation of the Gram matrix from the identity.
inline double gram_max_deviation(const SpectralBasis& basis) {
    const auto g = gram_matrix(basis);
    double worst = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b) {
            const double target = a == b ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(g[a][b] - target));
        }
    return worst;
}

}  // namespace sturmslater

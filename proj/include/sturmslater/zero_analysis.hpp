#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sturmslater/errors.hpp"
#include "sturmslater/slater.hpp"
#include "sturmslater/spectral.hpp"

namespace sturmslater {

// ---------------------------------------------------------------------------
// Zeros of linear combinations S = sum b_j h_j: location, multiplicity, and
// the node/antinode split. Multiplicity is the first derivative order that is
// significant on the combination's own length scale 1/omega, omega^2 = the
// top eigenvalue: |S^{(m)}(c)| (1/omega)^m / m! > eps * sup|S| says the m-th
// Taylor term moves the function at scale eps within one wavelength.
// ---------------------------------------------------------------------------

enum class ZeroKind { Node, Antinode };

struct ZeroRecord {
    double location = 0.0;
    int multiplicity = 1;
    ZeroKind kind = ZeroKind::Node;
};

struct ZeroReport {
    std::vector<ZeroRecord> records;  // sorted by location
    int nodes = 0;
    int antinodes = 0;
    int total_with_multiplicity = 0;
};

inline double combination_value(const SpectralBasis& basis, const CoefficientVector& b,
                                double x) {
    double s = 0.0;
    for (int j = 1; j <= basis.size(); ++j)
        s += b[static_cast<std::size_t>(j - 1)] * basis[j].value(x);
    return s;
}

inline double combination_derivative(const SpectralBasis& basis, const CoefficientVector& b,
                                     double x, int m) {
    double s = 0.0;
    for (int j = 1; j <= basis.size(); ++j)
        s += b[static_cast<std::size_t>(j - 1)] * basis[j].derivative(x, m);
    return s;
}

namespace detail {

struct ZeroSearchConstants {
    static constexpr double dip_rel = 1e-7;         // floor of the dip screen
    static constexpr double accept_rel = 1e-9;      // refined |S| that counts as a zero
    static constexpr double probe_eps = 1e-5;       // Taylor-contribution cutoff
    static constexpr double bisect_width = 1e-12;   // refinement target for locations
    static constexpr double merge_distance = 1e-6;  // collapse split near-multiple zeros
    static constexpr int order_cap = kDerivativeOrderCap;

    /// An even-order zero sitting mid-cell lifts the nearest sample to about
    /// sup * (omega * cell)^2 / 8, so the screen widens with the resolution;
    /// candidates are only accepted after refinement drives |S| to the noise
    /// floor, so the wide screen cannot invent zeros.
    static double dip_screen(double omega, double cell) {
        return std::max(dip_rel, 2.0 * omega * cell * (omega * cell));
    }
};

inline void check_coefficients(const SpectralBasis& basis, const CoefficientVector& b) {
    if (static_cast<int>(b.size()) != basis.size())
        throw std::invalid_argument("coefficient count must match basis size");
    bool nonzero = false;
    for (double v : b) {
        if (!std::isfinite(v)) throw std::invalid_argument("coefficients must be finite");
        if (v != 0.0) nonzero = true;
    }
    if (!nonzero) throw ZeroVector("coefficient vector is zero");
}

/// Samples of S at the i/grid nodes; reuses the stored eigenfunction arrays
/// when the requested grid matches the basis grid.
inline std::vector<double> sample_combination(const SpectralBasis& basis,
                                              const CoefficientVector& b, int grid) {
    std::vector<double> s(static_cast<std::size_t>(grid) + 1, 0.0);
    if (grid == basis.grid()) {
        for (int j = 1; j <= basis.size(); ++j) {
            const double bj = b[static_cast<std::size_t>(j - 1)];
            if (bj == 0.0) continue;
            const auto& h = basis[j].values();
            for (int i = 0; i <= grid; ++i) s[static_cast<std::size_t>(i)] += bj * h[static_cast<std::size_t>(i)];
        }
    } else {
        for (int i = 0; i <= grid; ++i)
            s[static_cast<std::size_t>(i)] =
                combination_value(basis, b, static_cast<double>(i) / grid);
    }
    return s;
}

inline double bisect_root(const SpectralBasis& basis, const CoefficientVector& b, double lo,
                          double hi, double flo) {
    for (int it = 0; it < 80 && hi - lo > ZeroSearchConstants::bisect_width; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = combination_value(basis, b, mid);
        if (fm == 0.0) return mid;
        if ((flo < 0) == (fm < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double golden_min_abs(const SpectralBasis& basis, const CoefficientVector& b, double lo,
                             double hi) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, d = hi;
    double c1 = d - inv_phi * (d - a);
    double c2 = a + inv_phi * (d - a);
    double f1 = std::abs(combination_value(basis, b, c1));
    double f2 = std::abs(combination_value(basis, b, c2));
    for (int it = 0; it < 120 && d - a > 1e-12; ++it) {
        if (f1 < f2) {
            d = c2;
            c2 = c1;
            f2 = f1;
            c1 = d - inv_phi * (d - a);
            f1 = std::abs(combination_value(basis, b, c1));
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + inv_phi * (d - a);
            f2 = std::abs(combination_value(basis, b, c2));
        }
    }
    return 0.5 * (a + d);
}

/// Frequency scale of the combination: sqrt of the top eigenvalue magnitude,
/// floored at pi (the lowest Dirichlet frequency on a unit interval).
inline double frequency_scale(const SpectralBasis& basis) {
    const double top = std::abs(basis[basis.size()].eigenvalue());
    return std::max(std::sqrt(top), M_PI);
}

/// Smallest derivative order whose Taylor contribution at distance 1/omega
/// clears the cutoff. Throws UnresolvedZero past the order cap.
inline int classify_multiplicity(const SpectralBasis& basis, const CoefficientVector& b,
                                 double c, double omega, double sup) {
    double threshold = ZeroSearchConstants::probe_eps * sup;  // m = 0 term
    for (int m = 1; m <= ZeroSearchConstants::order_cap; ++m) {
        threshold *= omega * m;  // eps * sup * omega^m * m!
        if (std::abs(combination_derivative(basis, b, c, m)) > threshold) return m;
    }
    throw UnresolvedZero("no significant derivative through order " +
                         std::to_string(ZeroSearchConstants::order_cap) + " at x = " +
                         std::to_string(c));
}

/// Newton polishing on S^{(m-1)}, which has a simple zero at a multiplicity-m
/// location; clamped to the surrounding cell.
inline double polish_location(const SpectralBasis& basis, const CoefficientVector& b, double c,
                              int m, double cell) {
    double x = c;
    for (int it = 0; it < 8; ++it) {
        const double g = combination_derivative(basis, b, x, m - 1);
        const double gp = combination_derivative(basis, b, x, m);
        if (gp == 0.0) break;
        double step = -g / gp;
        step = std::clamp(step, -2.0 * cell, 2.0 * cell);
        const double next = std::clamp(x + step, 1e-9, 1.0 - 1e-9);
        if (std::abs(next - x) < 1e-15) {
            x = next;
            break;
        }
        x = next;
    }
    return std::clamp(x, std::max(1e-9, c - 2.0 * cell), std::min(1.0 - 1e-9, c + 2.0 * cell));
}

}  // namespace detail

/// Locates and classifies the interior zeros of S = sum b_j h_j.
///
/// Sign changes on the sampling grid are bisected. Sign-preserving dips of
/// |S| below the resolution-aware screen are golden-section refined and kept
/// only when |S| reaches the noise floor there (a genuine zero). Each
/// candidate's multiplicity comes from derivative probing, with a Newton
/// polish on S^{(m-1)} for m >= 2 so that even high-order locations land
/// within ~1e-9. Candidates that collapse to the same polished point are
/// merged. Zeros forced at the endpoints by the boundary condition are out
/// of scope and never reported.
inline ZeroReport find_zeros(const SpectralBasis& basis, const CoefficientVector& b,
                             int grid = kDefaultGrid) {
    detail::check_coefficients(basis, b);
    if (grid < 256) throw std::invalid_argument("grid must be at least 256");

    const double omega = detail::frequency_scale(basis);

    for (int attempt = 0;; ++attempt) {
        const std::vector<double> s = detail::sample_combination(basis, b, grid);
        double sup = 0.0;
        for (double v : s) sup = std::max(sup, std::abs(v));
        if (sup == 0.0) throw ZeroVector("combination vanished at every sample");
        const double cell = 1.0 / grid;

        // node coordinate; must match sample_combination exactly so that the
        // sampled signs and the refinement endpoints describe the same points
        auto node_x = [grid](int i) { return static_cast<double>(i) / grid; };

        // raw candidates: exact-zero nodes, bracket cells, and dip windows
        std::vector<double> exact_nodes;
        std::vector<int> brackets;  // cell index i: sign change on [x_i, x_{i+1}]
        std::vector<int> dips;      // node index i: |S| dip without sign change
        for (int i = 1; i + 1 <= grid; ++i)
            if (s[static_cast<std::size_t>(i)] == 0.0) exact_nodes.push_back(node_x(i));
        for (int i = 1; i + 2 <= grid; ++i) {
            const double a = s[static_cast<std::size_t>(i)];
            const double bval = s[static_cast<std::size_t>(i + 1)];
            if (a == 0.0 || bval == 0.0) continue;  // handled by the exact-zero path
            if ((a < 0) != (bval < 0)) brackets.push_back(i);
        }
        const double dip_screen = detail::ZeroSearchConstants::dip_screen(omega, cell) * sup;
        for (int i = 2; i + 2 <= grid; ++i) {
            const double prev = std::abs(s[static_cast<std::size_t>(i - 1)]);
            const double cur = std::abs(s[static_cast<std::size_t>(i)]);
            const double next = std::abs(s[static_cast<std::size_t>(i + 1)]);
            if (cur > 0.0 && cur <= dip_screen && cur <= prev && cur <= next) {
                const bool sign_change =
                    (s[static_cast<std::size_t>(i - 1)] < 0) != (s[static_cast<std::size_t>(i + 1)] < 0);
                if (!sign_change) dips.push_back(i);
            }
        }

        // one refinement doubling when candidates crowd within 4 cells
        if (attempt == 0) {
            std::vector<double> rough = exact_nodes;
            for (int i : brackets) rough.push_back(node_x(i) + 0.5 * cell);
            for (int i : dips) rough.push_back(node_x(i));
            std::sort(rough.begin(), rough.end());
            bool crowded = false;
            for (std::size_t i = 0; i + 1 < rough.size(); ++i)
                if (rough[i + 1] - rough[i] < 4.0 * cell) crowded = true;
            if (crowded) {
                grid *= 2;
                continue;
            }
        }

        auto classify = [&](double c0) {
            int m = detail::classify_multiplicity(basis, b, c0, omega, sup);
            double c = c0;
            for (int round = 0; round < 4 && m >= 2; ++round) {
                const double polished = detail::polish_location(basis, b, c, m, cell);
                const int m2 = detail::classify_multiplicity(basis, b, polished, omega, sup);
                c = polished;
                if (m2 == m) break;
                m = m2;
            }
            return ZeroRecord{c, m, m % 2 == 1 ? ZeroKind::Node : ZeroKind::Antinode};
        };

        std::vector<ZeroRecord> records;
        auto classify_and_add = [&](double c0) { records.push_back(classify(c0)); };

        for (double c : exact_nodes) classify_and_add(c);
        for (int i : brackets)
            classify_and_add(detail::bisect_root(basis, b, node_x(i), node_x(i + 1),
                                                 s[static_cast<std::size_t>(i)]));
        for (int i : dips) {
            const double c = detail::golden_min_abs(basis, b, node_x(i - 1), node_x(i + 1));
            // only the true zeros survive refinement; shallow dips stay at
            // their genuine minimum value and are discarded
            if (std::abs(combination_value(basis, b, c)) <=
                detail::ZeroSearchConstants::accept_rel * sup)
                classify_and_add(c);
        }

        std::sort(records.begin(), records.end(),
                  [](const ZeroRecord& x, const ZeroRecord& y) { return x.location < y.location; });

        // merge candidates that polished to the same zero
        std::vector<ZeroRecord> merged;
        for (const auto& r : records) {
            if (!merged.empty() &&
                r.location - merged.back().location < detail::ZeroSearchConstants::merge_distance) {
                // same true zero seen twice: reclassify once from the midpoint
                merged.back() = classify(0.5 * (merged.back().location + r.location));
            } else {
                merged.push_back(r);
            }
        }

        ZeroReport report;
        for (const auto& r : merged) {
            if (r.location < 1e-8 || r.location > 1.0 - 1e-8) continue;  // endpoint exclusion
            report.records.push_back(r);
            report.total_with_multiplicity += r.multiplicity;
            if (r.kind == ZeroKind::Node) ++report.nodes;
            else ++report.antinodes;
        }
        return report;
    }
}

/// Total multiplicity bound: at most n - 1 zeros counted with multiplicity.
inline bool sturm_upper_ok(const ZeroReport& report, int n) {
    return report.total_with_multiplicity <= n - 1;
}

/// Sign-change lower bound: at least m_low - 1 nodes when the combination is
/// supported on indices m_low..n.
inline bool sign_change_lower_ok(const ZeroReport& report, int m_low) {
    return report.nodes >= m_low - 1;
}

/// Node/antinode bound: N + 2A <= n - 1.
inline bool gantmacher_krein_ok(const ZeroReport& report, int n) {
    return report.nodes + 2 * report.antinodes <= n - 1;
}

/// One step of the spectral iteration: b_k -> (lambda_1 - lambda_k)^ell b_k,
/// renormalized to the unit sphere. Raising ell drains every index below n,
/// and each application cannot decrease the zero count of the combination.
inline CoefficientVector liouville_iterate(const SpectralBasis& basis,
                                           const CoefficientVector& b, int ell) {
    detail::check_coefficients(basis, b);
    if (ell < 0) throw std::invalid_argument("iteration order must be nonnegative");
    const double lambda1 = basis[1].eigenvalue();
    CoefficientVector out(b);
    // one multiplication per round with renormalization in between, so the
    // eigenvalue powers can never overflow no matter how large ell gets
    for (int round = 0; round < std::max(ell, 1); ++round) {
        if (round < ell)
            for (int k = 1; k <= basis.size(); ++k)
                out[static_cast<std::size_t>(k - 1)] *= lambda1 - basis[k].eigenvalue();
        double norm = 0.0;
        for (double v : out) norm += v * v;
        if (norm == 0.0) throw ZeroVector("iteration annihilated the combination");
        norm = std::sqrt(norm);
        for (double& v : out) v /= norm;
    }
    return out;
}

/// Coefficients of a combination vanishing to the prescribed orders, from
/// the last-column expansion of the confluent determinant; sum k_j = n - 1.
/// Unit-normalized. NearSingular propagates from the cofactor computation.
inline CoefficientVector reconstruct_from_zeros(const SpectralBasis& basis,
                                                const NodeSpec& spec) {
    CoefficientVector b = confluent_cofactors(basis, spec);
    double norm = 0.0;
    for (double v : b) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : b) v /= norm;
    return b;
}

}  // namespace sturmslater

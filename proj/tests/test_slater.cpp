#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "sturmslater/linalg.hpp"
#include "sturmslater/rng.hpp"
#include "sturmslater/slater.hpp"

using namespace sturmslater;

namespace {

const SpectralBasis& normalized_sine_basis(int n) {
    static std::map<int, SpectralBasis> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        DirichletProblem zero{Potential::parse("0")};
        it = cache.emplace(n, sign_normalize(SpectralBasis::build(zero, n))).first;
    }
    return it->second;
}

// closed form for the normalized zero-potential basis: h_j = s_j sqrt(2) sin(j pi x)
double sine_sign(int j) { return j % 2 == 1 ? 1.0 : -1.0; }
double sine_value(int j, double x) { return sine_sign(j) * std::sqrt(2.0) * std::sin(j * M_PI * x); }
double sine_derivative(int j, int m, double x) {
    return sine_sign(j) * std::sqrt(2.0) * std::pow(j * M_PI, m) *
           std::sin(j * M_PI * x + m * M_PI / 2.0);
}

}  // namespace

TEST_CASE("normalized sine basis matches the closed form") {
    const auto& basis = normalized_sine_basis(6);
    for (int j = 1; j <= 6; ++j)
        for (double x : {0.1, 0.37, 0.5, 0.82}) {
            CHECK_THAT(basis[j].value(x), Catch::Matchers::WithinAbs(sine_value(j, x), 1e-8));
            for (int m = 1; m <= 4; ++m) {
                const double scale = std::pow(j * M_PI, m);
                CHECK_THAT(basis[j].derivative(x, m),
                           Catch::Matchers::WithinAbs(sine_derivative(j, m, x), 1e-7 * scale));
            }
        }
}

TEST_CASE("slater determinant basics") {
    const auto& basis1 = normalized_sine_basis(1);
    CHECK_THAT(slater_det(basis1, {0.42}), Catch::Matchers::WithinAbs(basis1[1].value(0.42), 1e-15));

    const auto& basis4 = normalized_sine_basis(4);
    CHECK_THAT(slater_det(basis4, {0.3, 0.3, 0.6, 0.9}), Catch::Matchers::WithinAbs(0.0, 1e-12));

    // raw basis (h'(0) > 0, i.e. plain sines): pinned closed-form value
    DirichletProblem zero{Potential::parse("0")};
    const SpectralBasis raw = SpectralBasis::build(zero, 2);
    CHECK_THAT(slater_det(raw, {0.25, 0.75}),
               Catch::Matchers::WithinAbs(-2.0 * std::sqrt(2.0), 1e-9));
    const SpectralBasis norm = sign_normalize(raw);
    CHECK_THAT(slater_det(norm, {0.25, 0.75}),
               Catch::Matchers::WithinAbs(2.0 * std::sqrt(2.0), 1e-9));
}

TEST_CASE("sign normalization") {
    const auto& basis2 = normalized_sine_basis(2);
    CHECK(slater_det(basis2, {0.3, 0.7}) > 0.0);

    // idempotence
    const SpectralBasis again = sign_normalize(basis2);
    for (double x : {0.2, 0.5, 0.9})
        for (int j = 1; j <= 2; ++j)
            CHECK(again[j].value(x) == basis2[j].value(x));

    // positivity on 100 random ordered interior tuples
    const auto& basis4 = normalized_sine_basis(4);
    SplitMix64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> pts(4);
        for (auto& p : pts) p = rng.uniform(0.01, 0.99);
        std::sort(pts.begin(), pts.end());
        if (pts[1] - pts[0] < 1e-3 || pts[2] - pts[1] < 1e-3 || pts[3] - pts[2] < 1e-3) continue;
        CHECK(slater_det(basis4, pts) > 0.0);
    }
}

TEST_CASE("cofactor coefficients") {
    const auto& basis3 = normalized_sine_basis(3);
    const CoefficientVector s = cofactor_coeffs(basis3, {0.3, 0.6});
    // expansion identity on an independent grid
    for (int i = 1; i < 10; ++i) {
        const double x = i / 10.0;
        double lhs = 0.0;
        for (int j = 1; j <= 3; ++j) lhs += s[static_cast<std::size_t>(j - 1)] * basis3[j].value(x);
        CHECK_THAT(lhs, Catch::Matchers::WithinAbs(slater_det(basis3, {0.3, 0.6, x}), 1e-9));
    }
    // the combination vanishes at the prescribed points
    for (double c : {0.3, 0.6}) {
        double v = 0.0;
        for (int j = 1; j <= 3; ++j) v += s[static_cast<std::size_t>(j - 1)] * basis3[j].value(c);
        CHECK_THAT(v, Catch::Matchers::WithinAbs(0.0, 1e-9));
    }

    // n = 2, c = 0.5: minors are single entries, s = (-h_2(1/2), h_1(1/2)) = (0, sqrt 2)
    const auto& basis2 = normalized_sine_basis(2);
    const CoefficientVector s2 = cofactor_coeffs(basis2, {0.5});
    CHECK_THAT(s2[0], Catch::Matchers::WithinAbs(0.0, 1e-9));
    CHECK_THAT(s2[1], Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-9));
}

TEST_CASE("confluent determinant with simple nodes reduces to the plain one") {
    const auto& basis4 = normalized_sine_basis(4);
    NodeSpec spec{{0.2, 0.5, 0.8}, {1, 1, 1}};
    for (double x : {0.1, 0.35, 0.65, 0.94})
        CHECK_THAT(confluent_slater(basis4, spec, x),
                   Catch::Matchers::WithinRel(slater_det(basis4, {0.2, 0.5, 0.8, x}), 1e-10));

    NodeSpec full{{0.2, 0.5, 0.8, 0.9}, {1, 1, 1, 1}};
    CHECK_THAT(confluent_matrix_det(basis4, full),
               Catch::Matchers::WithinRel(slater_det(basis4, {0.2, 0.5, 0.8, 0.9}), 1e-10));
}

TEST_CASE("confluent determinant vanishes at the prescribed order") {
    const auto& basis3 = normalized_sine_basis(3);
    NodeSpec spec{{0.5}, {2}};

    double scale = 0.0;
    for (int i = 1; i < 64; ++i)
        scale = std::max(scale, std::abs(confluent_slater(basis3, spec, i / 64.0)));

    // orders 0 and 1 vanish at the node, order 2 does not
    auto deriv_at = [&](int m) {
        const double h = 1e-4;
        if (m == 0) return confluent_slater(basis3, spec, 0.5);
        if (m == 1)
            return (confluent_slater(basis3, spec, 0.5 + h) -
                    confluent_slater(basis3, spec, 0.5 - h)) /
                   (2 * h);
        return (confluent_slater(basis3, spec, 0.5 + h) - 2 * confluent_slater(basis3, spec, 0.5) +
                confluent_slater(basis3, spec, 0.5 - h)) /
               (h * h);
    };
    CHECK(std::abs(deriv_at(0)) <= 1e-7 * scale);
    CHECK(std::abs(deriv_at(1)) <= 1e-7 * scale * 10.0);  // FD noise allowance
    CHECK(std::abs(deriv_at(2)) >= 1e-4 * scale);

    // oracle: the double-zero system over exact sines has kernel (s3, 0, s1)
    // (row S(1/2): s1 b1 = s3 b3; row S'(1/2): b2 = 0)
    const CoefficientVector b = confluent_cofactors(basis3, spec);
    const double norm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    CHECK(std::abs(b[1]) <= 1e-9 * norm);
    CHECK_THAT(std::abs(b[0] / b[2]), Catch::Matchers::WithinRel(1.0, 1e-9));
}

TEST_CASE("confluent square determinants stay away from zero") {
    const auto& basis3 = normalized_sine_basis(3);
    const double pinned = confluent_matrix_det(basis3, NodeSpec{{0.3, 0.7}, {1, 2}});
    CHECK_THAT(pinned, Catch::Matchers::WithinRel(42.083591222376633, 1e-6));

    DirichletProblem prob{Potential::parse("10*cos(4*x)")};
    const SpectralBasis coarse = sign_normalize(SpectralBasis::build(prob, 4, 2048));
    const SpectralBasis fine = sign_normalize(SpectralBasis::build(prob, 4, 4096));
    const NodeSpec spec{{0.25, 0.75}, {2, 2}};
    const double d1 = confluent_matrix_det(coarse, spec);
    const double d2 = confluent_matrix_det(fine, spec);
    CHECK(d1 != 0.0);
    CHECK_THAT(d1, Catch::Matchers::WithinRel(d2, 1e-6));
}

TEST_CASE("antisymmetry in the evaluation points") {
    const auto& basis5 = normalized_sine_basis(5);
    SplitMix64 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> pts(5);
        for (auto& p : pts) p = rng.uniform(0.02, 0.98);
        const double det = slater_det(basis5, pts);
        const auto i = static_cast<std::size_t>(rng.uniform_int(0, 4));
        auto j = static_cast<std::size_t>(rng.uniform_int(0, 4));
        if (i == j) j = (j + 1) % 5;
        std::swap(pts[i], pts[j]);
        const double swapped = slater_det(basis5, pts);
        CHECK_THAT(swapped, Catch::Matchers::WithinAbs(-det, 1e-12 * std::abs(det) + 1e-300));
    }
}

TEST_CASE("interlacing sign pattern of the cofactor combination") {
    // between consecutive prescribed points, S(x) carries the sign (-1)^{n-1-j}
    // with j points below x
    const auto& basis4 = normalized_sine_basis(4);
    SplitMix64 rng(53);
    const int n = 4;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> c(3);
        for (auto& p : c) p = rng.uniform(0.05, 0.95);
        std::sort(c.begin(), c.end());
        if (c[1] - c[0] < 0.05 || c[2] - c[1] < 0.05) continue;
        std::vector<double> edges = {0.0, c[0], c[1], c[2], 1.0};
        for (int j = 0; j <= 3; ++j) {
            const double x = 0.5 * (edges[static_cast<std::size_t>(j)] +
                                    edges[static_cast<std::size_t>(j + 1)]);
            const double v = slater_det(basis4, {c[0], c[1], c[2], x});
            const double expected_sign = ((n - 1 - j) % 2 == 0) ? 1.0 : -1.0;
            CHECK(v * expected_sign > 0.0);
        }
    }
}

TEST_CASE("determinant magnitude is reachable and stable inside the simplex") {
    SplitMix64 rng(61);
    for (int n = 2; n <= 6; ++n) {
        const auto& basis = normalized_sine_basis(n);
        bool found = false;
        for (int trial = 0; trial < 50 && !found; ++trial) {
            std::vector<double> pts(static_cast<std::size_t>(n));
            for (auto& p : pts) p = rng.uniform(0.02, 0.98);
            std::sort(pts.begin(), pts.end());
            found = std::abs(slater_det(basis, pts)) > 1e-6;
        }
        CHECK(found);
    }

    // no sign change along random segments inside the ordered simplex
    const auto& basis4 = normalized_sine_basis(4);
    for (int seg = 0; seg < 20; ++seg) {
        auto draw = [&] {
            std::vector<double> pts(4);
            double acc = rng.uniform(0.03, 0.2);
            for (auto& p : pts) {
                p = acc;
                acc += rng.uniform(0.05, 0.25);
            }
            for (auto& p : pts) p = std::min(p, 0.97);
            return pts;
        };
        const auto a = draw();
        const auto b = draw();
        int sign = 0;
        bool flipped = false;
        for (int t = 0; t <= 50; ++t) {
            std::vector<double> pts(4);
            bool ordered = true;
            for (std::size_t i = 0; i < 4; ++i) {
                pts[i] = a[i] + (b[i] - a[i]) * t / 50.0;
                if (i > 0 && pts[i] <= pts[i - 1] + 1e-4) ordered = false;
            }
            if (!ordered) continue;
            const double v = slater_det(basis4, pts);
            const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
            if (sign != 0 && s != 0 && s != sign) flipped = true;
            if (s != 0) sign = s;
        }
        CHECK_FALSE(flipped);
    }
}

TEST_CASE("node spec validation") {
    CHECK_THROWS_AS((NodeSpec{{0.5, 0.2}, {1, 1}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NodeSpec{{0.0}, {1}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NodeSpec{{0.5}, {0}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((NodeSpec{{}, {}}.validate()), std::invalid_argument);
    const auto& basis3 = normalized_sine_basis(3);
    CHECK_THROWS_AS(confluent_slater(basis3, NodeSpec{{0.5}, {1}}, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(confluent_matrix_det(basis3, NodeSpec{{0.5}, {2}}), std::invalid_argument);
}

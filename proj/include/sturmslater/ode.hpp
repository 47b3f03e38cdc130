#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "sturmslater/errors.hpp"

namespace sturmslater {

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) integration for the small systems used here
// (the scalar phase equation and the 2d linear oscillator state).
// ---------------------------------------------------------------------------

inline constexpr long kOdeMaxSteps = 1'000'000;

namespace detail {

template <std::size_t N, class F>
struct Dopri5 {
    F f;
    double rtol, atol;
    long steps_left = kOdeMaxSteps;

    using State = std::array<double, N>;

    /// One controlled step from (x, y); h is updated in place with the next
    /// proposal. k1 holds f(x, y) on entry and f(x', y') on exit (FSAL).
    bool try_step(double& x, State& y, double& h, State& k1) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        if (--steps_left < 0) throw IntegrationFailure("step budget exhausted");

        State k2, k3, k4, k5, k6, k7, yt, ynew;
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = f(x + h / 5, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(x + 3 * h / 10, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(x + 4 * h / 5, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(x + 8 * h / 9, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                a65 * k5[i]);
        k6 = f(x + h, yt);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f(x + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                  e6 * k6[i] + e7 * k7[i]);
            const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / N);

        const double factor =
            err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7;
            h *= factor;
            return true;
        }
        h *= factor;
        return false;
    }
};

}  // namespace detail

namespace detail {

/// Advances the stepper to exactly `target`, leaving the free step size `h`
/// untouched by clipped landing steps.
template <std::size_t N, class Stepper, class State>
void advance_to(Stepper& stepper, double& x, State& y, State& k1, double target, double& h) {
    while (x < target) {
        const double remaining = target - x;
        const bool clipped = h >= remaining;
        double h_local = clipped ? remaining : h;
        if (stepper.try_step(x, y, h_local, k1)) {
            if (clipped) x = target;  // land exactly, no 1-ulp shortfall
            else h = h_local;
        } else {
            h = h_local;
        }
    }
}

}  // namespace detail

/// Integrates y' = f(x, y) from x0 to x1 (x1 > x0) and returns y(x1).
template <std::size_t N, class F>
std::array<double, N> integrate_ode(F f, std::array<double, N> y, double x0, double x1,
                                    double rtol = 1e-10, double atol = 1e-12) {
    detail::Dopri5<N, F> stepper{std::move(f), rtol, atol};
    double x = x0;
    double h = (x1 - x0) / 64.0;
    auto k1 = stepper.f(x, y);
    detail::advance_to<N>(stepper, x, y, k1, x1, h);
    return y;
}

/// Integrates across [x0, x1] while forcing steps onto the cells + 1 uniform
/// nodes; emit(i, x_i, y_i) fires at every node including the first.
template <std::size_t N, class F, class Emit>
void integrate_ode_sampled(F f, std::array<double, N> y, double x0, double x1, int cells,
                           Emit&& emit, double rtol = 1e-10, double atol = 1e-12) {
    detail::Dopri5<N, F> stepper{std::move(f), rtol, atol};
    double x = x0;
    auto k1 = stepper.f(x, y);
    emit(0, x0, y);
    double h = (x1 - x0) / (4.0 * cells);
    for (int i = 1; i <= cells; ++i) {
        const double target = x0 + (x1 - x0) * static_cast<double>(i) / cells;
        detail::advance_to<N>(stepper, x, y, k1, target, h);
        emit(i, target, y);
    }
}

}  // namespace sturmslater

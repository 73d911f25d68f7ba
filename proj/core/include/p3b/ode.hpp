#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace p3b {

// Dormand-Prince 5(4) embedded Runge-Kutta pair with adaptive step control.
//
// The integrator is deliberately small and generic: the same driver serves the
// Cartesian 3-body equations, the geodesic flow in both charts, and the
// horizontal-lift transport. Callers observe accepted steps through a callback
// which may also project the state back onto its constraint manifold and stop
// the integration.

template <std::size_t N>
using OdeState = std::array<double, N>;

struct OdeStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    bool step_underflow = false;
    bool stopped_by_callback = false;
};

enum class StepControl { Continue, Stop };

namespace detail {

// Dormand-Prince coefficients.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace detail

// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0).
//
// rhs:      void(double t, const OdeState<N>& y, OdeState<N>& dydt)
// observer: StepControl(double t, OdeState<N>& y, double h_taken)
//           called after every accepted step; may mutate y (projection).
//
// tol is used as both absolute and relative tolerance per component.
// If fixed_step > 0 the controller is bypassed and steps of exactly that size
// are taken (last step shortened to hit t1).
template <std::size_t N, class Rhs, class Observer>
OdeStats integrate_ode(Rhs&& rhs, double t0, double t1, OdeState<N>& y, double tol,
                       double max_step, Observer&& observer, double fixed_step = 0.0) {
    using namespace detail;
    OdeStats stats;
    double t = t0;
    OdeState<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    rhs(t, y, k1);

    double h = fixed_step > 0 ? fixed_step : std::min(max_step, (t1 - t0) / 10.0);
    const double hmin = 1e-14 * std::max(1.0, std::abs(t1 - t0));

    while (t < t1) {
        h = std::min(h, t1 - t);
        if (fixed_step <= 0) h = std::min(h, max_step);

        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + h / 5, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + 3 * h / 10, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + 4 * h / 5, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + 8 * h / 9, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                  b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * k7[i]);
            double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / N);

        if (fixed_step > 0 || err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            ++stats.accepted;
            if (observer(t, y, h) == StepControl::Stop) {
                stats.stopped_by_callback = true;
                return stats;
            }
            // Observer may have projected y; refresh the FSAL derivative.
            rhs(t, y, k1);
            if (fixed_step <= 0) {
                double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                h *= std::clamp(fac, 0.2, 5.0);
            }
        } else {
            ++stats.rejected;
            double fac = 0.9 * std::pow(err, -0.2);
            h *= std::clamp(fac, 0.1, 1.0);
        }

        if (fixed_step <= 0 && h < hmin) {
            stats.step_underflow = true;
            return stats;
        }
    }
    return stats;
}

}  // namespace p3b

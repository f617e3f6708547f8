#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "errors.hpp"

// Embedded Dormand-Prince 5(4) with PI step control, on std::array states.

namespace cvnm {

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.01;  // in tau
    double min_step = 1e-14;
    std::size_t max_steps = 50'000'000;
};

namespace ode_detail {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
inline State<N> axpy(const State<N>& y, double h, const State<N>& d) {
    State<N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = y[i] + h * d[i];
    return r;
}

}  // namespace ode_detail

// integrate y' = f(t, y) from t0 to t1; f returns the derivative array
template <std::size_t N, class F>
std::array<double, N> integrate_ode(const F& f, std::array<double, N> y, double t0, double t1,
                                    const OdeOptions& opt = {}) {
    using ode_detail::axpy;
    using S = std::array<double, N>;

    if (t1 <= t0) return y;

    // Dormand-Prince tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    double t = t0;
    double h = std::min(opt.max_step, t1 - t0);
    double err_prev = 1.0;
    S k1 = f(t, y);
    const double t_done = opt.min_step * std::max(1.0, std::fabs(t1));

    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if (t1 - t <= t_done) return y;
        h = std::min(h, t1 - t);

        S y2{};
        for (std::size_t i = 0; i < N; ++i) y2[i] = y[i] + h * a21 * k1[i];
        S k2 = f(t + c2 * h, y2);
        S y3{};
        for (std::size_t i = 0; i < N; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        S k3 = f(t + c3 * h, y3);
        S y4{};
        for (std::size_t i = 0; i < N; ++i)
            y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        S k4 = f(t + c4 * h, y4);
        S y5{};
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        S k5 = f(t + c5 * h, y5);
        S y6{};
        for (std::size_t i = 0; i < N; ++i)
            y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        S k6 = f(t + h, y6);

        S ynew{};
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        S k7 = f(t + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err = std::max(err, std::fabs(ei) / sc);
        }

        if (err <= 1.0) {
            t += h;
            y = ynew;
            k1 = k7;  // FSAL
            const double grow =
                0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            h = std::min(opt.max_step, h * std::min(5.0, std::max(0.2, grow)));
            err_prev = std::max(err, 1e-10);
        } else {
            h *= std::max(0.1, 0.9 * std::pow(err, -1.0 / 5.0));
            if (h < opt.min_step)
                throw IntegrationError("integrate_ode: step size collapsed", t, h);
        }
    }
    throw IntegrationError("integrate_ode: step budget exhausted", t, h);
}

}  // namespace cvnm

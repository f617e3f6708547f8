#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

// Bounded Nelder-Mead for the low-dimensional refinements this library needs.
// Points are clamped into the box before every evaluation.

namespace cvnm {

template <std::size_t N>
struct NelderMeadResult {
    std::array<double, N> x{};
    double f = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

template <std::size_t N, class F>
NelderMeadResult<N> nelder_mead_minimize(const F& fn, std::array<double, N> x0,
                                         std::array<double, N> step,
                                         std::array<double, N> lo, std::array<double, N> hi,
                                         double f_tol = 1e-9, std::size_t max_iter = 400) {
    NelderMeadResult<N> out;

    auto clamp = [&](std::array<double, N> p) {
        for (std::size_t i = 0; i < N; ++i) p[i] = std::min(hi[i], std::max(lo[i], p[i]));
        return p;
    };
    auto eval = [&](const std::array<double, N>& p) {
        ++out.evaluations;
        return fn(clamp(p));
    };

    constexpr std::size_t M = N + 1;
    std::array<std::array<double, N>, M> x;
    std::array<double, M> fx;
    x[0] = clamp(x0);
    fx[0] = eval(x[0]);
    for (std::size_t i = 0; i < N; ++i) {
        x[i + 1] = x[0];
        x[i + 1][i] += (x[0][i] + step[i] <= hi[i]) ? step[i] : -step[i];
        x[i + 1] = clamp(x[i + 1]);
        fx[i + 1] = eval(x[i + 1]);
    }

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    for (std::size_t it = 0; it < max_iter; ++it) {
        // order by function value
        std::array<std::size_t, M> idx;
        for (std::size_t i = 0; i < M; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });

        if (std::fabs(fx[idx[M - 1]] - fx[idx[0]]) <= f_tol) {
            out.converged = true;
            out.x = clamp(x[idx[0]]);
            out.f = fx[idx[0]];
            return out;
        }

        std::array<double, N> centroid{};
        for (std::size_t i = 0; i + 1 < M; ++i)
            for (std::size_t j = 0; j < N; ++j) centroid[j] += x[idx[i]][j] / double(N);

        const std::size_t worst = idx[M - 1];
        std::array<double, N> xr;
        for (std::size_t j = 0; j < N; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - x[worst][j]);
        const double fr = eval(xr);

        if (fr < fx[idx[0]]) {
            std::array<double, N> xe;
            for (std::size_t j = 0; j < N; ++j) xe[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
            const double fe = eval(xe);
            if (fe < fr) {
                x[worst] = clamp(xe);
                fx[worst] = fe;
            } else {
                x[worst] = clamp(xr);
                fx[worst] = fr;
            }
            continue;
        }
        if (fr < fx[idx[M - 2]]) {
            x[worst] = clamp(xr);
            fx[worst] = fr;
            continue;
        }
        // contraction (outside toward xr if it improved on the worst, else inside)
        std::array<double, N> xc;
        const auto& target = (fr < fx[worst]) ? xr : x[worst];
        for (std::size_t j = 0; j < N; ++j) xc[j] = centroid[j] + rho * (target[j] - centroid[j]);
        const double fc = eval(xc);
        if (fc < std::min(fr, fx[worst])) {
            x[worst] = clamp(xc);
            fx[worst] = fc;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 1; i < M; ++i) {
            const std::size_t k = idx[i];
            for (std::size_t j = 0; j < N; ++j)
                x[k][j] = x[idx[0]][j] + sigma * (x[k][j] - x[idx[0]][j]);
            x[k] = clamp(x[k]);
            fx[k] = eval(x[k]);
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < M; ++i)
        if (fx[i] < fx[best]) best = i;
    out.x = clamp(x[best]);
    out.f = fx[best];
    out.converged = false;
    return out;
}

}  // namespace cvnm

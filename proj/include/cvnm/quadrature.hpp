#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"

// Adaptive Gauss-Kronrod 7/15 integration plus a half-period block scheme with
// Wynn epsilon extrapolation for semi-infinite Fourier-type integrals
// (the QAWF strategy: sum oscillation cycles, then accelerate the tail).

namespace cvnm {

namespace quad_detail {

// positive K15 abscissae with Kronrod weights; gauss[] holds the embedded G7 weights
// (zero where the node is Kronrod-only)
struct GK15Table {
    static constexpr std::array<double, 8> node = {
        0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
        0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
    static constexpr std::array<double, 8> kronrod = {
        0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
        0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
    static constexpr std::array<double, 8> gauss = {
        0.417959183673469, 0.0, 0.381830050505119, 0.0,
        0.279705391489277, 0.0, 0.129484966168870, 0.0};
};

}  // namespace quad_detail

template <std::size_t N>
using VecN = std::array<double, N>;

template <std::size_t N>
struct QuadResultN {
    VecN<N> value{};
    double error = 0.0;   // accumulated error estimate (max over components)
    bool converged = false;
    std::size_t evaluations = 0;
};

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_depth = 55;
    std::size_t max_intervals = 200000;
    bool throw_on_failure = true;
};

// one GK15 panel for a vector-valued integrand
template <std::size_t N, class F>
void gk15_panel(const F& f, double a, double b, VecN<N>& value, double& err, std::size_t& evals) {
    using quad_detail::GK15Table;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    VecN<N> k{}, g{};
    VecN<N> fm = f(mid);
    ++evals;
    for (std::size_t c = 0; c < N; ++c) {
        k[c] = GK15Table::kronrod[0] * fm[c];
        g[c] = GK15Table::gauss[0] * fm[c];
    }
    for (std::size_t i = 1; i < 8; ++i) {
        const double dx = half * GK15Table::node[i];
        VecN<N> fp = f(mid + dx);
        VecN<N> fq = f(mid - dx);
        evals += 2;
        for (std::size_t c = 0; c < N; ++c) {
            const double s = fp[c] + fq[c];
            k[c] += GK15Table::kronrod[i] * s;
            g[c] += GK15Table::gauss[i] * s;
        }
    }
    err = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
        k[c] *= half;
        g[c] *= half;
        // QUADPACK-style sharpened estimate
        const double d = std::fabs(k[c] - g[c]);
        const double e = (d > 0.0) ? std::min(d, std::pow(200.0 * d, 1.5)) : 0.0;
        err = std::max(err, e);
    }
    value = k;
}

// adaptive bisection on [a, b] with a mixed absolute/relative tolerance
template <std::size_t N, class F>
QuadResultN<N> integrate_adaptive_vec(const F& f, double a, double b, const QuadOptions& opt = {}) {
    struct Interval {
        double a, b;
        VecN<N> value;
        double err;
        int depth;
    };

    QuadResultN<N> out;
    if (a == b) {
        out.converged = true;
        return out;
    }

    std::vector<Interval> heap;
    Interval first{a, b, {}, 0.0, 0};
    gk15_panel<N>(f, a, b, first.value, first.err, out.evaluations);
    heap.push_back(first);

    auto total = [&heap]() {
        VecN<N> v{};
        double e = 0.0;
        for (const auto& iv : heap) {
            for (std::size_t c = 0; c < N; ++c) v[c] += iv.value[c];
            e += iv.err;
        }
        return std::pair<VecN<N>, double>(v, e);
    };

    while (true) {
        auto [v, e] = total();
        double scale = opt.abs_tol;
        for (std::size_t c = 0; c < N; ++c) scale = std::max(scale, opt.rel_tol * std::fabs(v[c]));
        if (e <= scale) {
            out.value = v;
            out.error = e;
            out.converged = true;
            return out;
        }
        // split the worst interval
        std::size_t worst = 0;
        for (std::size_t i = 1; i < heap.size(); ++i)
            if (heap[i].err > heap[worst].err) worst = i;

        Interval iv = heap[worst];
        if (iv.depth >= opt.max_depth || heap.size() >= opt.max_intervals) {
            out.value = v;
            out.error = e;
            out.converged = false;
            if (opt.throw_on_failure)
                throw QuadratureError("adaptive quadrature did not converge", e, scale);
            return out;
        }
        const double mid = 0.5 * (iv.a + iv.b);
        Interval left{iv.a, mid, {}, 0.0, iv.depth + 1};
        Interval right{mid, iv.b, {}, 0.0, iv.depth + 1};
        gk15_panel<N>(f, left.a, left.b, left.value, left.err, out.evaluations);
        gk15_panel<N>(f, right.a, right.b, right.value, right.err, out.evaluations);
        heap[worst] = left;
        heap.push_back(right);
    }
}

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
};

template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b, const QuadOptions& opt = {}) {
    auto wrapped = [&f](double x) { return VecN<1>{f(x)}; };
    QuadResultN<1> r = integrate_adaptive_vec<1>(wrapped, a, b, opt);
    return {r.value[0], r.error, r.converged, r.evaluations};
}

// Wynn epsilon algorithm: extrapolated limit of a sequence of partial sums.
// Returns the best even-column entry; est receives the last correction size.
inline double wynn_epsilon(const std::vector<double>& s, double& est) {
    const std::size_t n = s.size();
    est = std::numeric_limits<double>::infinity();
    if (n == 0) return 0.0;
    if (n == 1) return s[0];

    std::vector<double> prev_odd(n, 0.0);  // epsilon_{-1} column
    std::vector<double> cur = s;           // epsilon_0 column
    double best = s[n - 1];
    for (std::size_t col = 1; col < n; ++col) {
        std::vector<double> next(n - col, 0.0);
        for (std::size_t i = 0; i + col < n; ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (std::fabs(diff) < 1e-300) {
                // converged column; freeze
                next[i] = (col % 2 == 0) ? cur[i + 1] : 1e300;
            } else {
                next[i] = prev_odd[i + 1] + 1.0 / diff;
            }
        }
        prev_odd = cur;
        cur = next;
        if (col % 2 == 0 && !cur.empty()) {
            est = std::fabs(cur.back() - best);
            best = cur.back();
        }
        if (cur.size() <= 1) break;
    }
    return best;
}

enum class FourierKind { Cosine, Sine };

// integral over [0, inf) of kernel(w) * cos(w s) or kernel(w) * sin(w s), s >= 0.
//
// Strategy: integrate [0, head] adaptively (kernel structure lives there), then
// sum half-period blocks of length pi/s and extrapolate the alternating tail with
// the epsilon algorithm. The extrapolation residual is the tail estimate. For
// s = 0 the cosine case integrates the bare kernel on a tan-substituted grid,
// which requires an integrably decaying kernel. `breakpoints` lists kernel
// non-smoothness locations (e.g. interpolation knots); head panels are aligned
// to them so the adaptive rule never straddles a kink.
template <class K>
QuadResult fourier_semi_infinite(const K& kernel, double s, FourierKind kind, double head,
                                 const QuadOptions& opt = {},
                                 const std::vector<double>* breakpoints = nullptr) {
    QuadResult out;
    const double tol = opt.abs_tol;

    if (s < 0.0) throw DomainError("fourier_semi_infinite: negative oscillation parameter");

    if (s == 0.0) {
        if (kind == FourierKind::Sine) {
            out.converged = true;
            return out;  // sin(0) = 0 identically
        }
        // map w = tan(theta); integrand kernel(tan t) * sec^2 t on [0, pi/2)
        const double cut = std::atan(1e14);
        auto g = [&kernel](double t) {
            const double c = std::cos(t);
            const double w = std::tan(t);
            return kernel(w) / (c * c);
        };
        QuadOptions o2 = opt;
        o2.throw_on_failure = opt.throw_on_failure;
        QuadResult r = integrate_adaptive(g, 0.0, cut, o2);
        return r;
    }

    const double halfperiod = M_PI / s;
    QuadOptions panel_opt = opt;
    panel_opt.abs_tol = tol * 0.05;
    panel_opt.rel_tol = std::min(opt.rel_tol, 1e-12);
    panel_opt.throw_on_failure = false;

    auto f = [&](double w) {
        const double phase = w * s;
        const double t = (kind == FourierKind::Cosine) ? std::cos(phase) : std::sin(phase);
        return kernel(w) * t;
    };

    // plain sum over [0, a0] where a0 is the first block boundary at/after `head`
    double a0 = halfperiod * std::ceil(std::max(head, halfperiod) / halfperiod);
    double plain = 0.0;
    double plain_err = 0.0;
    {
        // sub-split the head region by half-periods so each panel sees at most
        // one oscillation lobe, and by the kernel's breakpoints so panels never
        // straddle a kink
        std::vector<double> bounds;
        for (double a = 0.0; a < a0; a += halfperiod) bounds.push_back(a);
        if (breakpoints) {
            for (double b : *breakpoints)
                if (b > 0.0 && b < a0) bounds.push_back(b);
        }
        bounds.push_back(a0);
        std::sort(bounds.begin(), bounds.end());
        QuadOptions head_opt = panel_opt;
        if (breakpoints) head_opt.abs_tol = panel_opt.abs_tol / std::sqrt(double(bounds.size()));
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
            if (bounds[i + 1] - bounds[i] < 1e-15) continue;
            QuadResult r = integrate_adaptive(f, bounds[i], bounds[i + 1], head_opt);
            plain += r.value;
            plain_err += r.error;
            out.evaluations += r.evaluations;
        }
    }

    // accelerated tail: partial sums of half-period blocks
    std::vector<double> partial;
    partial.reserve(64);
    double tail_sum = 0.0;
    double best = 0.0;
    double best_est = std::numeric_limits<double>::infinity();
    const std::size_t max_blocks = 96;
    double last_block = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < max_blocks; ++k) {
        const double a = a0 + k * halfperiod;
        const double b = a + halfperiod;
        QuadResult r = integrate_adaptive(f, a, b, panel_opt);
        out.evaluations += r.evaluations;
        tail_sum += r.value;
        plain_err += r.error;
        partial.push_back(tail_sum);
        last_block = std::fabs(r.value);

        if (partial.size() >= 4) {
            double est = 0.0;
            const double lim = wynn_epsilon(partial, est);
            if (est < best_est) {
                best_est = est;
                best = lim;
            }
            if (best_est < tol * 0.25 || last_block < tol * 0.25) {
                out.value = plain + ((last_block < tol * 0.25 && best_est > tol) ? tail_sum : best);
                out.error = plain_err + std::min(best_est, last_block);
                out.converged = true;
                return out;
            }
        } else if (last_block < tol * 0.25 && k >= 1) {
            out.value = plain + tail_sum;
            out.error = plain_err + last_block;
            out.converged = true;
            return out;
        }
    }

    out.value = plain + best;
    out.error = plain_err + best_est;
    out.converged = best_est < tol;
    if (!out.converged && opt.throw_on_failure)
        throw QuadratureError("oscillatory tail extrapolation did not converge", out.error, tol);
    return out;
}

}  // namespace cvnm

#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "errors.hpp"
#include "gaussian.hpp"
#include "linalg.hpp"
#include "nelder_mead.hpp"

// The three nonclassicality markers. Intensity correlations compare the
// photon-number-difference noise against the shot-noise limit; entanglement is
// the logarithmic negativity of the partial transpose; quantum correlations are
// the Gaussian discord, minimized over single-mode Gaussian measurements.
// Logs are natural throughout.

namespace cvnm {

// I_corr = 1 - Var(n1 - n2) / <n1 + n2> for a zero-mean symmetric-block state,
// expressed through covariance entries via Wick factorization:
//   Var(n1-n2) = s11^2 + s22^2 + 2 s12^2 - s13^2 - s14^2 - s23^2 - s24^2 - 1/2
//   <n1 + n2>  = s11 + s22 - 1
// Sub-shot-noise (nonclassical) region: 0 < I_corr <= 1.
inline double intensity_correlations(const CovarianceMatrix& s, double denom_eps = 1e-9) {
    const double den = s(0, 0) + s(1, 1) - 1.0;
    if (den <= denom_eps)
        throw UndefinedMarkerError("intensity_correlations: vanishing mean photon number");
    const double num = s(0, 0) * s(0, 0) + s(1, 1) * s(1, 1) + 2.0 * s(0, 1) * s(0, 1) -
                       s(0, 2) * s(0, 2) - s(0, 3) * s(0, 3) - s(1, 2) * s(1, 2) -
                       s(1, 3) * s(1, 3) - 0.5;
    return 1.0 - num / den;
}

// g2 = <n1 n2> / (<n1><n2>) - 1; photon moments by Wick factorization
inline double second_order_g2(const CovarianceMatrix& s, double eps = 1e-9) {
    const double n1 = 0.5 * (s(0, 0) + s(1, 1)) - 0.5;
    const double n2 = 0.5 * (s(2, 2) + s(3, 3)) - 0.5;
    if (n1 <= eps || n2 <= eps)
        throw UndefinedMarkerError("second_order_g2: vanishing mean photon number");
    const double cov = 0.5 * (s(0, 2) * s(0, 2) + s(0, 3) * s(0, 3) + s(1, 2) * s(1, 2) +
                              s(1, 3) * s(1, 3));
    return cov / (n1 * n2);
}

// N = max{0, -ln(2 nu_min(PT))}; positive iff the state is entangled
inline double log_negativity(const CovarianceMatrix& s) {
    const PhysicalityReport rep = validate_physical(s);
    if (!rep.ok)
        throw UnphysicalStateError("log_negativity: unphysical state", 0.0, rep.nu_minus);
    const SymplecticSpectrum nu = symplectic_eigenvalues(partial_transpose(s));
    const double two_nu = 2.0 * nu.n_minus;
    if (two_nu >= 1.0) return 0.0;
    return -std::log(two_nu);
}

// I = f(sqrt(det A)) + f(sqrt(det B)) - f(n+) - f(n-)
inline double mutual_information(const CovarianceMatrix& s) {
    const SymplecticSpectrum nu = symplectic_eigenvalues(s);
    return marginal_entropy(s.block_a()) + marginal_entropy(s.block_b()) -
           entropy_f(nu.n_plus) - entropy_f(nu.n_minus);
}

struct MeasurementParams {
    double rho = 0.0;  // measurement squeezing, >= 0
    double phi = 0.0;  // measurement angle, wrapped into [0, 2 pi)
};

// covariance of the general single-mode Gaussian measurement,
//   (cosh 2rho / 2) [[1 + tanh 2rho cos phi, -tanh 2rho sin phi], [., 1 - ...]],
// written in exponentials so the entries stay accurate at large squeezing;
// det = 1/4 always, rho = 0 is heterodyne
inline Mat2 measurement_cov(const MeasurementParams& p) {
    if (p.rho < 0.0) throw DomainError("measurement_cov: rho must be >= 0");
    const double ep = std::exp(2.0 * p.rho);
    const double em = 1.0 / ep;
    const double c = std::cos(p.phi), s = std::sin(p.phi);
    return {0.25 * (ep * (1.0 + c) + em * (1.0 - c)), -0.25 * (ep - em) * s,
            -0.25 * (ep - em) * s, 0.25 * (ep * (1.0 - c) + em * (1.0 + c))};
}

// conditional covariance of the unmeasured mode: A - C (A + sM)^-1 C^T
// (symmetric-block states, where both diagonal blocks coincide)
inline Mat2 conditional_cov(const Mat2& A, const Mat2& C, const Mat2& sigma_m) {
    const Mat2 inv = (A + sigma_m).inverse();
    Mat2 t = A - C * inv * C.transpose();
    // enforce exact symmetry against roundoff
    const double off = 0.5 * (t.a12 + t.a21);
    t.a12 = off;
    t.a21 = off;
    return t;
}

struct DiscordOptions {
    double rho_max = 6.0;
    int grid_rho = 25;
    int grid_phi = 24;
    double refine_tol = 1e-9;   // Nelder-Mead tolerance on f(sqrt(det tau))
    double clamp_tol = 1e-9;    // discord in [-clamp_tol, 0) clamps to 0
};

struct DiscordResult {
    double discord = 0.0;
    MeasurementParams argmin;
    double conditional_entropy = 0.0;  // f(sqrt(det tau)) at the minimizer
    bool boundary_hit = false;         // minimizer ended at rho_max
};

namespace marker_detail {

inline double wrap_angle(double phi) {
    const double two_pi = 2.0 * M_PI;
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

}  // namespace marker_detail

// Gaussian discord with measurement on mode 2:
//   D = f(sqrt(det A)) + min_{rho,phi} f(sqrt(det tau)) - f(n+) - f(n-)
// minimized over the measurement family by a coarse grid (quadratic rho
// spacing, heterodyne included) followed by Nelder-Mead refinement.
inline DiscordResult gaussian_discord(const CovarianceMatrix& s, const DiscordOptions& opt = {}) {
    const PhysicalityReport rep = validate_physical(s);
    if (!rep.ok)
        throw UnphysicalStateError("gaussian_discord: unphysical state", 0.0, rep.nu_minus);

    const Mat2 A = s.block_a();
    const Mat2 C = s.block_c();
    const SymplecticSpectrum nu = symplectic_eigenvalues(s);

    auto cond_entropy = [&](double rho, double phi) {
        const Mat2 t = conditional_cov(A, C, measurement_cov({rho, phi}));
        double d = t.det();
        if (d < 0.25) d = 0.25;  // measurement cannot beat the vacuum floor; roundoff guard
        return entropy_f(std::sqrt(d));
    };

    // heterodyne seed plus coarse grid
    double best_f = cond_entropy(0.0, 0.0);
    MeasurementParams best{0.0, 0.0};
    for (int i = 0; i < opt.grid_rho; ++i) {
        const double u = (opt.grid_rho > 1) ? double(i) / (opt.grid_rho - 1) : 0.0;
        const double rho = opt.rho_max * u * u;  // dense near heterodyne
        for (int j = 0; j < opt.grid_phi; ++j) {
            const double phi = 2.0 * M_PI * j / opt.grid_phi;
            const double f = cond_entropy(rho, phi);
            if (f < best_f) {
                best_f = f;
                best = {rho, phi};
            }
            if (rho == 0.0) break;  // phi is irrelevant at heterodyne
        }
    }

    // The phi direction is degenerate at heterodyne, so a minimum hiding at
    // small rho is invisible until the angle is right: probe a few small radii
    // over the full angle grid before refining.
    if (best.rho < opt.rho_max / double((opt.grid_rho - 1) * (opt.grid_rho - 1)) + 1e-12) {
        for (double rho : {1e-3, 5e-3, 2e-2}) {
            for (int j = 0; j < opt.grid_phi; ++j) {
                const double phi = 2.0 * M_PI * j / opt.grid_phi;
                const double f = cond_entropy(rho, phi);
                if (f < best_f) {
                    best_f = f;
                    best = {rho, phi};
                }
            }
        }
    }

    // local refinement around the best point; restarted once with a fresh
    // simplex, since a collapsed simplex can stall on the rho = 0 boundary
    auto objective = [&](const std::array<double, 2>& p) { return cond_entropy(p[0], p[1]); };
    const double rho_step = std::max(0.05, opt.rho_max / (2.0 * opt.grid_rho));
    std::array<double, 2> seed{best.rho, best.phi};
    double step = rho_step;
    for (int pass = 0; pass < 2; ++pass) {
        NelderMeadResult<2> nm = nelder_mead_minimize<2>(
            objective, seed, {step, M_PI / opt.grid_phi}, {0.0, -2.0 * M_PI},
            {opt.rho_max, 4.0 * M_PI}, opt.refine_tol, 600);
        if (nm.f < best_f) {
            best_f = nm.f;
            best = {nm.x[0], marker_detail::wrap_angle(nm.x[1])};
        }
        seed = nm.x;
        step = std::max(0.2 * step, 1e-3);
    }

    DiscordResult out;
    out.argmin = best;
    out.conditional_entropy = best_f;
    out.boundary_hit = best.rho > opt.rho_max - 1e-6;
    double d = marginal_entropy(A) + best_f - entropy_f(nu.n_plus) - entropy_f(nu.n_minus);
    if (d < 0.0) {
        if (d < -opt.clamp_tol)
            throw NumericalDegeneracyError("gaussian_discord: negative discord beyond tolerance");
        d = 0.0;
    }
    out.discord = d;
    return out;
}

// classical correlations restricted to Gaussian measurements: C = I - D
inline double classical_correlations(const CovarianceMatrix& s, const DiscordOptions& opt = {}) {
    return mutual_information(s) - gaussian_discord(s, opt).discord;
}

// one sweep record
struct MarkerSample {
    double tau = 0.0;
    std::optional<double> i_corr;       // missing when 0/0-undefined
    double negativity = 0.0;
    double discord = 0.0;
    double mutual_information = 0.0;
    double classical = 0.0;             // mutual_information - discord
    MeasurementParams discord_argmin;
    double nu_minus = 0.0;
    bool discord_boundary_hit = false;
};

}  // namespace cvnm

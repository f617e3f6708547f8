#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "coefficients.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "linalg.hpp"
#include "markers.hpp"
#include "ode.hpp"
#include "propagation.hpp"

// Brute-force verification routes, independent of the closed-form propagators:
// direct integration of the covariance equation of motion, photon statistics
// from Wick's theorem, and an exhaustive measurement grid for the discord.

namespace cvnm {

enum class ReservoirTopology { Independent, Common };

// Drift placement for the moment equations. The master equation's second
// moments obey sigma' = F sigma + sigma F^T + 2 D per mode with
//   D = [[0, Pi/2], [Pi/2, Delta]].
// `Secular` uses F = -gamma(t) I + omega0 J (the weak-coupling flow whose exact
// solution is e^{-Gamma/2} R(t), i.e. the dynamics the closed-form propagator
// realizes); `AsPrinted` keeps the damping on the momentum row only,
// F = [[0, omega0], [-omega0, -2 gamma]], which deviates at relative order
// gamma/omega0 over a period. See docs/model.md for the derivation.
enum class OdeDrift { Secular, AsPrinted };

struct OracleOptions {
    OdeOptions ode{};
    OdeDrift drift = OdeDrift::Secular;
    bool include_r_ren = false;  // adds the printed renormalization term to the drift
};

namespace oracle_detail {

inline Mat2 drift_matrix(const CoefficientSet& c, double omega0, double scale,
                         const OracleOptions& opt) {
    const double g = scale * c.gamma;
    Mat2 f;
    if (opt.drift == OdeDrift::Secular)
        f = {-g, omega0, -omega0, -g};
    else
        f = {0.0, omega0, -omega0, -2.0 * g};
    if (opt.include_r_ren) f.a21 += scale * c.r_ren;
    return f;
}

inline Mat2 diffusion_matrix(const CoefficientSet& c, double scale) {
    return {0.0, 0.5 * scale * c.Pi, 0.5 * scale * c.Pi, scale * c.Delta};
}

template <class FBlock, class DBlock>
std::array<double, 16> lyapunov_rhs(const std::array<double, 16>& y, const FBlock& f_of,
                                    const DBlock& d_of) {
    Mat4 s;
    s.v = y;
    const Mat4 F = Mat4::direct_sum(f_of(0), f_of(1));
    const Mat4 D = Mat4::direct_sum(d_of(0), d_of(1));
    const Mat4 r = F * s + s * F.transpose() + 2.0 * D;
    return r.v;
}

}  // namespace oracle_detail

// direct adaptive integration of the covariance equations of motion, with
// coefficient callbacks evaluated at every stage. The common topology
// integrates in the +- picture (damped (+) channel at sqrt(2)-scaled
// coefficients, free (-) channel) and transforms back.
inline CovarianceMatrix ode_covariance(const CovarianceMatrix& sigma0, double tau,
                                       const BathSpec& bath, ReservoirTopology topology,
                                       const OracleOptions& opt = {}) {
    if (tau < 0.0) throw DomainError("ode_covariance: tau must be >= 0");
    if (tau == 0.0) return sigma0;

    const double w0 = bath.omega0;
    const bool common = topology == ReservoirTopology::Common;
    const double kappa = common ? kCommonChannelScale : 1.0;

    const CovarianceMatrix start = common ? plus_minus_transform(sigma0) : sigma0;

    auto rhs = [&](double t, const std::array<double, 16>& y) {
        CoefficientSet c = master_equation_coefficients(t, bath);
        if (opt.include_r_ren && !c.r_ren_evaluated)
            c.r_ren = frequency_renormalization(t, bath);
        auto f_of = [&](int mode) {
            if (common && mode == 1) return oracle_detail::drift_matrix(CoefficientSet{}, w0, 0.0, opt);
            return oracle_detail::drift_matrix(c, w0, (common && mode == 0) ? kappa : 1.0, opt);
        };
        auto d_of = [&](int mode) {
            if (common && mode == 1) return Mat2{};
            return oracle_detail::diffusion_matrix(c, (common && mode == 0) ? kappa : 1.0);
        };
        return oracle_detail::lyapunov_rhs(y, f_of, d_of);
    };

    std::array<double, 16> y = start.m.v;
    try {
        y = integrate_ode<16>(rhs, y, 0.0, tau, opt.ode);
    } catch (const IntegrationError& e) {
        throw IntegrationError(std::string("ode_covariance: ") + e.what(), e.t, e.step);
    }

    Mat4 m;
    m.v = y;
    CovarianceMatrix out{m.symmetrized()};
    if (common) out = plus_minus_inverse(out);
    return out;
}

struct PhotonStatistics {
    double n1 = 0.0;      // <n_1>
    double n2 = 0.0;
    double var_n1 = 0.0;  // <n_1^2> - <n_1>^2
    double var_n2 = 0.0;
    double n1n2 = 0.0;    // <n_1 n_2>
};

// photon moments of a zero-mean Gaussian state from operator Wick pairing,
// with n_i = (X_i^2 + P_i^2)/2 - 1/2 and <X P> = sigma_xp + i/2:
//   <n>      = (s_xx + s_pp)/2 - 1/2
//   Var(n)   = (s_xx^2 + s_pp^2 + 2 s_xp^2)/2 - 1/4
//   Cov(n1,n2) = (s13^2 + s14^2 + s23^2 + s24^2)/2
inline PhotonStatistics photon_statistics(const CovarianceMatrix& s) {
    PhotonStatistics out;
    out.n1 = 0.5 * (s(0, 0) + s(1, 1)) - 0.5;
    out.n2 = 0.5 * (s(2, 2) + s(3, 3)) - 0.5;
    out.var_n1 = 0.5 * (s(0, 0) * s(0, 0) + s(1, 1) * s(1, 1) + 2.0 * s(0, 1) * s(0, 1)) - 0.25;
    out.var_n2 = 0.5 * (s(2, 2) * s(2, 2) + s(3, 3) * s(3, 3) + 2.0 * s(2, 3) * s(2, 3)) - 0.25;
    const double cov = 0.5 * (s(0, 2) * s(0, 2) + s(0, 3) * s(0, 3) + s(1, 2) * s(1, 2) +
                              s(1, 3) * s(1, 3));
    out.n1n2 = cov + out.n1 * out.n2;
    return out;
}

// shot-noise comparison rebuilt from the photon moments alone
inline double icorr_from_photon_statistics(const PhotonStatistics& ps, double denom_eps = 1e-9) {
    const double den = ps.n1 + ps.n2;
    if (den <= denom_eps)
        throw UndefinedMarkerError("icorr_from_photon_statistics: vanishing photon number");
    const double var_diff = ps.var_n1 + ps.var_n2 - 2.0 * (ps.n1n2 - ps.n1 * ps.n2);
    return 1.0 - var_diff / den;
}

struct GridDiscordResult {
    double discord = 0.0;
    MeasurementParams argmin;
    double resolution_bound = 0.0;  // local f-variation over one grid cell at the argmin
};

// exhaustive measurement-grid discord: no refinement, intentionally crude
inline GridDiscordResult discord_grid_scan(const CovarianceMatrix& s, int grid_rho = 200,
                                           int grid_phi = 200, double rho_max = 6.0) {
    const PhysicalityReport rep = validate_physical(s);
    if (!rep.ok)
        throw UnphysicalStateError("discord_grid_scan: unphysical state", 0.0, rep.nu_minus);

    const Mat2 A = s.block_a();
    const Mat2 C = s.block_c();
    const SymplecticSpectrum nu = symplectic_eigenvalues(s);

    auto cond_entropy = [&](double rho, double phi) {
        const Mat2 t = conditional_cov(A, C, measurement_cov({rho, phi}));
        double d = t.det();
        if (d < 0.25) d = 0.25;
        return entropy_f(std::sqrt(d));
    };

    double best = std::numeric_limits<double>::infinity();
    MeasurementParams at{};
    const double drho = rho_max / (grid_rho - 1);
    const double dphi = 2.0 * M_PI / grid_phi;
    for (int i = 0; i < grid_rho; ++i) {
        const double rho = i * drho;
        for (int j = 0; j < grid_phi; ++j) {
            const double phi = j * dphi;
            const double f = cond_entropy(rho, phi);
            if (f < best) {
                best = f;
                at = {rho, phi};
            }
            if (rho == 0.0) break;
        }
    }

    GridDiscordResult out;
    out.argmin = at;
    double bound = 0.0;
    bound = std::max(bound, std::fabs(cond_entropy(std::min(rho_max, at.rho + drho), at.phi) - best));
    bound = std::max(bound, std::fabs(cond_entropy(std::max(0.0, at.rho - drho), at.phi) - best));
    bound = std::max(bound, std::fabs(cond_entropy(at.rho, at.phi + dphi) - best));
    bound = std::max(bound, std::fabs(cond_entropy(at.rho, at.phi - dphi) - best));
    out.resolution_bound = bound;

    const double d = marginal_entropy(A) + best - entropy_f(nu.n_plus) - entropy_f(nu.n_minus);
    out.discord = std::max(0.0, d);
    return out;
}

inline double discord_grid_oracle(const CovarianceMatrix& s, int grid_rho = 200,
                                  int grid_phi = 200, double rho_max = 6.0) {
    return discord_grid_scan(s, grid_rho, grid_phi, rho_max).discord;
}

}  // namespace cvnm

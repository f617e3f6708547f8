#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "coefficients.hpp"
#include "errors.hpp"
#include "gaussian.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"

// Closed-form covariance propagation for the weak-coupling master equation.
//
// Per quadrature pair the flow is Phi(t) = e^{-Gamma(t)/2} R(t) with
// R the rotation at omega0, and the accumulated noise solves
//   2 Wbar(t) = e^{-Gamma(t)} R(t) [ Int_0^t e^{Gamma(s)} R^T(s) D(s) R(s) ds ] R^T(t) * 2,
//   D(s) = [[0, Pi/2], [Pi/2, Delta]],
// which expands into the damping exponent Gamma and five convolution integrals
// (Delta_Gamma and the four non-secular ones). The short-time mode drops the
// e^{+-Gamma} weights, after which everything integrates in closed form for the
// high-temperature Lorentz-Drude coefficients.

namespace cvnm {

enum class PropagatorMode { ShortTimeApprox, ExactWeights };

// rotation R(tau) = [[cos w0 tau, sin w0 tau], [-sin w0 tau, cos w0 tau]]
inline Mat2 rotation(double tau, double omega0) {
    if (tau < 0.0) throw DomainError("rotation: tau must be >= 0");
    const double c = std::cos(omega0 * tau);
    const double s = std::sin(omega0 * tau);
    return {c, s, -s, c};
}

inline Mat2 rotation(double tau, const BathSpec& bath) { return rotation(tau, bath.omega0); }

struct SecularIntegrals {
    double Gamma = 0.0;     // channel damping exponent (dimensionless)
    double Delta_Gamma = 0.0;
    double Delta_co = 0.0;  // non-secular
    double Delta_si = 0.0;
    double Pi_co = 0.0;
    double Pi_si = 0.0;
};

namespace prop_detail {

inline std::complex<double> cexp_int(std::complex<double> lambda, double tau) {
    // Int_0^tau e^{lambda s} ds, stable for small |lambda tau|
    const std::complex<double> z = lambda * tau;
    if (std::abs(z) < 1e-6)
        return tau * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    return (std::exp(z) - 1.0) / lambda;
}

// short-time integrals of the closed-form coefficients against 1 and
// exp(-2 i w0 s), assembled from complex exponential primitives
inline SecularIntegrals short_time_closed_form(double tau, const BathSpec& bath, double scale) {
    using C = std::complex<double>;
    const double x = bath.resonance_ratio;
    const double w0 = bath.omega0;
    const double K = coefficient_prefactor(bath);
    const double T = bath.temperature_ratio;
    const C i(0.0, 1.0);

    const C E_rot = cexp_int(C(-1.0, w0), tau);            // e^{(i w0 - 1) s}
    const C E_m2 = cexp_int(C(0.0, -2.0 * w0), tau);       // e^{-2 i w0 s}
    const C E_a = cexp_int(C(-1.0, -w0), tau);             // e^{(-1 - i w0) s}
    const C E_b = cexp_int(C(-1.0, -3.0 * w0), tau);       // e^{(-1 - 3 i w0) s}

    SecularIntegrals out;
    out.Gamma = scale * 2.0 * K * (tau - ((C(1.0, -x)) * E_rot).real());
    out.Delta_Gamma = scale * K * T * (x * tau - ((C(x, 1.0)) * E_rot).real());

    const C zd = scale * K * T * (x * E_m2 - 0.5 * (C(x, 1.0) * E_a + C(x, -1.0) * E_b));
    const C zp = scale * K * T * (E_m2 - 0.5 * (C(1.0, -x) * E_a + C(1.0, x) * E_b));
    const C phase = std::exp(C(0.0, 2.0 * w0 * tau));
    out.Delta_co = (phase * zd).real();
    out.Delta_si = (phase * zd).imag();
    out.Pi_co = (phase * zp).real();
    out.Pi_si = (phase * zp).imag();
    return out;
}

// Barycentric Chebyshev-Lobatto interpolants of the smooth coefficient
// functions on [0, tau], for baths without closed forms. The expensive double
// quadrature runs once per node; Gamma is accumulated over the same grid.
// Built locally per call, so there is no shared state.
struct CoeffTable {
    std::vector<double> node, weight, delta, pi, gamma, big_gamma;

    CoeffTable(double tau, const BathSpec& bath, int n = 25) {
        node.resize(n);
        weight.resize(n);
        delta.resize(n);
        pi.resize(n);
        gamma.resize(n);
        big_gamma.resize(n);
        // node-level quadrature tolerance sized to the interpolation error,
        // not to the final secular tolerance
        CoefficientQuadratureOptions cq;
        cq.abs_tol = 1e-8;
        cq.rel_tol = 1e-8;
        cq.inner_tol_factor = 1e-2;
        for (int k = 0; k < n; ++k) {
            const double theta = M_PI * k / (n - 1);
            node[k] = 0.5 * tau * (1.0 - std::cos(theta));
            const CoefficientSet c = coefficients_quadrature(node[k], bath, cq);
            delta[k] = c.Delta;
            pi[k] = c.Pi;
            gamma[k] = c.gamma;
            weight[k] = ((k % 2) ? -1.0 : 1.0) * ((k == 0 || k == n - 1) ? 0.5 : 1.0);
        }
        big_gamma[0] = 0.0;
        QuadOptions opt;
        opt.abs_tol = 1e-12;
        for (int k = 1; k < n; ++k) {
            auto seg = integrate_adaptive(
                [this](double s) { return 2.0 * interp(gamma, s); }, node[k - 1], node[k], opt);
            big_gamma[k] = big_gamma[k - 1] + seg.value;
        }
    }

    double interp(const std::vector<double>& value, double s) const {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < node.size(); ++k) {
            const double d = s - node[k];
            if (std::fabs(d) < 1e-13) return value[k];
            const double w = weight[k] / d;
            num += w * value[k];
            den += w;
        }
        return num / den;
    }

    CoefficientSet coefficients(double s) const {
        CoefficientSet c;
        c.Delta = interp(delta, s);
        c.Pi = interp(pi, s);
        c.gamma = interp(gamma, s);
        return c;
    }

    double damping(double s) const { return interp(big_gamma, s); }
};

}  // namespace prop_detail

// The six weighted time integrals for one dissipation channel. channel_scale
// multiplies the coefficients (and hence Gamma): 1 for an independent
// reservoir, sqrt(2) for the damped (+) channel of the common reservoir.
inline SecularIntegrals secular_integrals(double tau, const BathSpec& bath, PropagatorMode mode,
                                          double channel_scale = 1.0) {
    if (tau < 0.0) throw DomainError("secular_integrals: tau must be >= 0");
    if (tau == 0.0) return {};

    const bool closed = closed_form_valid(bath);
    if (mode == PropagatorMode::ShortTimeApprox && closed)
        return prop_detail::short_time_closed_form(tau, bath, channel_scale);

    // numeric path: shared by exact-weight evaluation and generic baths
    std::shared_ptr<prop_detail::CoeffTable> table;
    if (!closed) table = std::make_shared<prop_detail::CoeffTable>(tau, bath);

    std::function<CoefficientSet(double)> coeffs;
    if (closed)
        coeffs = [&bath](double s) { return coefficients_closed_form(s, bath); };
    else
        coeffs = [table](double s) { return table->coefficients(s); };

    std::function<double(double)> gamma_exponent;
    double Gamma_tau;
    const double true_gamma =
        channel_scale * (closed ? damping_exponent_closed_form(tau, bath) : table->damping(tau));
    if (mode == PropagatorMode::ShortTimeApprox) {
        gamma_exponent = [](double) { return 0.0; };
        Gamma_tau = 0.0;
    } else if (closed) {
        gamma_exponent = [&bath, channel_scale](double s) {
            return channel_scale * damping_exponent_closed_form(s, bath);
        };
        Gamma_tau = true_gamma;
    } else {
        gamma_exponent = [table, channel_scale](double s) {
            return channel_scale * table->damping(s);
        };
        Gamma_tau = true_gamma;
    }

    const double w0 = bath.omega0;
    auto integrand = [&](double s) -> VecN<5> {
        const CoefficientSet c = coeffs(s);
        const double w = std::exp(gamma_exponent(s)) * channel_scale;
        const double arg = 2.0 * w0 * (tau - s);
        const double co = std::cos(arg), si = std::sin(arg);
        return {w * c.Delta, w * c.Delta * co, w * c.Delta * si, w * c.Pi * co, w * c.Pi * si};
    };

    QuadOptions opt;
    opt.abs_tol = closed ? 1e-12 : 1e-10;
    opt.rel_tol = 1e-11;
    QuadResultN<5> r = integrate_adaptive_vec<5>(integrand, 0.0, tau, opt);

    const double damp = std::exp(-Gamma_tau);
    SecularIntegrals out;
    // the reported Gamma is always the true damping exponent; the short-time
    // approximation only affects the weights inside the five integrals
    out.Gamma = true_gamma;
    out.Delta_Gamma = damp * r.value[0];
    out.Delta_co = damp * r.value[1];
    out.Delta_si = damp * r.value[2];
    out.Pi_co = damp * r.value[3];
    out.Pi_si = damp * r.value[4];
    return out;
}

namespace prop_detail {

// traceless part of the accumulated noise in covariance space
inline Mat2 noise_traceless(const SecularIntegrals& si) {
    const double u = si.Delta_co - si.Pi_si;
    const double v = si.Delta_si + si.Pi_co;
    return {-u, v, v, u};
}

// R(tau) diag(1,-1) R(tau)^T = [[cos 2th, -sin 2th], [-sin 2th, -cos 2th]]
inline Mat2 rotated_z(double tau, double omega0) {
    const double c2 = std::cos(2.0 * omega0 * tau);
    const double s2 = std::sin(2.0 * omega0 * tau);
    return {c2, -s2, -s2, -c2};
}

}  // namespace prop_detail

// accumulated noise block Wbar(tau); the propagators add 2*Wbar per mode
inline Mat2 noise_block(double tau, const BathSpec& bath, PropagatorMode mode,
                        double channel_scale = 1.0) {
    const SecularIntegrals si = secular_integrals(tau, bath, mode, channel_scale);
    const Mat2 t = prop_detail::noise_traceless(si);
    return 0.5 * (Mat2::diag(si.Delta_Gamma, si.Delta_Gamma) + t);
}

inline Mat2 noise_block(const SecularIntegrals& si) {
    return 0.5 * (Mat2::diag(si.Delta_Gamma, si.Delta_Gamma) + prop_detail::noise_traceless(si));
}

// sigma(tau) = e^{-Gamma} (R + R) sigma0 (R + R)^T + 2 (Wbar + Wbar)
inline CovarianceMatrix propagate_independent(const CovarianceMatrix& sigma0, double tau,
                                              const BathSpec& bath, PropagatorMode mode) {
    if (tau < 0.0) throw DomainError("propagate_independent: tau must be >= 0");
    if (tau == 0.0) return sigma0;

    const SecularIntegrals si = secular_integrals(tau, bath, mode, 1.0);
    const Mat2 R = rotation(tau, bath.omega0);
    const Mat2 W = noise_block(si);
    const double damp = std::exp(-si.Gamma);

    const Mat4 R4 = Mat4::direct_sum(R, R);
    const Mat4 N4 = Mat4::direct_sum(2.0 * W, 2.0 * W);
    CovarianceMatrix out{(damp * congruence(R4, sigma0.m) + N4).symmetrized()};
    return out;
}

// closed-form blocks for a symmetric initial state A0 = a*I, C0 = diag(c,-c)
inline TwoModeBlocks independent_blocks(double a, double c, double tau, const BathSpec& bath,
                                        PropagatorMode mode) {
    const SecularIntegrals si = secular_integrals(tau, bath, mode, 1.0);
    const double damp = std::exp(-si.Gamma);
    const Mat2 A = Mat2::diag(a * damp + si.Delta_Gamma, a * damp + si.Delta_Gamma) +
                   prop_detail::noise_traceless(si);
    const Mat2 C = (c * damp) * prop_detail::rotated_z(tau, bath.omega0);
    return {A, C};
}

// canonical +- mode mixing: (X1,P1,X2,P2) -> (X+,P+,X-,P-); involutive
inline Mat4 plus_minus_matrix() {
    const double q = 1.0 / std::sqrt(2.0);
    const Mat2 I = Mat2::identity();
    return Mat4::from_blocks(q * I, q * I, q * I, (-q) * I);
}

inline CovarianceMatrix plus_minus_transform(const CovarianceMatrix& s) {
    return {congruence(plus_minus_matrix(), s.m)};
}

inline CovarianceMatrix plus_minus_inverse(const CovarianceMatrix& s) {
    return plus_minus_transform(s);  // the mixing matrix is its own inverse
}

inline constexpr double kCommonChannelScale = 1.4142135623730951;  // sqrt(2)

// generic common-reservoir propagation: transform to +- modes, damp the (+)
// channel (coefficients scaled by sqrt(2)), rotate the (-) channel freely,
// transform back
inline CovarianceMatrix propagate_common_generic(const CovarianceMatrix& sigma0, double tau,
                                                 const BathSpec& bath, PropagatorMode mode) {
    if (tau < 0.0) throw DomainError("propagate_common_generic: tau must be >= 0");
    if (tau == 0.0) return sigma0;

    const CovarianceMatrix tilde0 = plus_minus_transform(sigma0);
    const SecularIntegrals si = secular_integrals(tau, bath, mode, kCommonChannelScale);
    const Mat2 R = rotation(tau, bath.omega0);
    const double damp_plus = std::exp(-si.Gamma);

    const Mat2 pp = damp_plus * congruence(R, tilde0.m.block(0, 0)) + 2.0 * noise_block(si);
    const Mat2 mm = congruence(R, tilde0.m.block(2, 2));
    const Mat2 pm = std::sqrt(damp_plus) * (R * tilde0.m.block(0, 2) * R.transpose());

    const Mat4 tilde_t = Mat4::from_blocks(pp, pm, pm.transpose(), mm);
    return {congruence(plus_minus_matrix(), tilde_t).symmetrized()};
}

// closed-form blocks for a TWB-form initial state under the common reservoir:
//   A = g+ a I - g- c RZ + (Delta_Gamma I + T)/2
//   C = -g- a I + g+ c RZ + (Delta_Gamma I + T)/2
// with g+- = (1 +- e^{-Gamma_+})/2 and all integrals on the sqrt(2) channel
inline TwoModeBlocks common_blocks(double a, double c, double tau, const BathSpec& bath,
                                   PropagatorMode mode) {
    const SecularIntegrals si = secular_integrals(tau, bath, mode, kCommonChannelScale);
    const double gp = 0.5 * (1.0 + std::exp(-si.Gamma));
    const double gm = 0.5 * (1.0 - std::exp(-si.Gamma));
    const Mat2 RZ = prop_detail::rotated_z(tau, bath.omega0);
    const Mat2 noise = noise_block(si);  // (Delta_Gamma I + T)/2

    const Mat2 A = Mat2::diag(gp * a, gp * a) + (-gm * c) * RZ + noise;
    const Mat2 C = Mat2::diag(-gm * a, -gm * a) + (gp * c) * RZ + noise;
    return {A, C};
}

namespace prop_detail {

// detect A0 = a*I, C0 = diag(c,-c) with equal diagonal blocks
inline bool twb_form(const CovarianceMatrix& s, double& a, double& c) {
    const double scale = std::max(1.0, s.m.max_abs());
    const double tol = 1e-11 * scale;
    const Mat2 A = s.block_a(), B = s.block_b(), C = s.block_c();
    if ((A - B).max_abs() > tol) return false;
    if (std::fabs(A.a12) > tol || std::fabs(A.a21) > tol) return false;
    if (std::fabs(A.a11 - A.a22) > tol) return false;
    if (std::fabs(C.a12) > tol || std::fabs(C.a21) > tol) return false;
    if (std::fabs(C.a11 + C.a22) > tol) return false;
    a = A.a11;
    c = C.a11;
    return true;
}

}  // namespace prop_detail

// closed-form common-reservoir propagation; requires the TWB block form
inline CovarianceMatrix propagate_common_closed_form(const CovarianceMatrix& sigma0, double tau,
                                                     const BathSpec& bath, PropagatorMode mode) {
    double a = 0.0, c = 0.0;
    if (!prop_detail::twb_form(sigma0, a, c))
        throw UnsupportedInputError(
            "propagate_common_closed_form: initial state is not in TWB block form");
    if (tau == 0.0) return sigma0;
    return common_blocks(a, c, tau, bath, mode).assemble();
}

// common-reservoir propagation: closed form when the input has TWB block form,
// generic transform path otherwise
inline CovarianceMatrix propagate_common(const CovarianceMatrix& sigma0, double tau,
                                         const BathSpec& bath, PropagatorMode mode) {
    double a = 0.0, c = 0.0;
    if (prop_detail::twb_form(sigma0, a, c)) {
        if (tau == 0.0) return sigma0;
        return common_blocks(a, c, tau, bath, mode).assemble();
    }
    return propagate_common_generic(sigma0, tau, bath, mode);
}

}  // namespace cvnm

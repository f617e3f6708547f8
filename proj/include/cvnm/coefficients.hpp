#pragma once

#include <cmath>
#include <complex>

#include "bath.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

// Time-dependent master-equation coefficients at second order in the coupling.
//
// Double-integral definitions (scaled units, omega0 = 1/x):
//
//   Delta(tau) = alpha^2 Int_0^tau ds Int_0^inf dw J(w) W(w) cos(w s) cos(omega0 s)
//   Pi(tau)    = alpha^2 Int_0^tau ds Int_0^inf dw J(w) W(w) cos(w s) sin(omega0 s)
//   gamma(tau) = alpha^2 Int_0^tau ds Int_0^inf dw J(w)      sin(w s) sin(omega0 s)
//   r_ren(tau) = alpha^2 Int_0^tau ds Int_0^inf dw J(w)      sin(w s) cos(omega0 s)
//
// with thermal weight W(w) (see ThermalKernel). For the Lorentz-Drude density
// with the linearized high-T weight T_r/w every inner transform is elementary
// and the closed forms below are the exact outer integrals:
//
//   K          = alpha^2 x / (2 (1 + x^2))
//   Delta(tau) = K T_r { x - e^-tau [ x cos(tau/x) - sin(tau/x) ] }
//   Pi(tau)    = K T_r { 1 - e^-tau [ cos(tau/x) + x sin(tau/x) ] }
//   gamma(tau) = K     { 1 - e^-tau [ cos(tau/x) + x sin(tau/x) ] }
//
// gamma ends up temperature independent, and Pi = T_r * gamma in this branch.

namespace cvnm {

struct CoefficientSet {
    double Delta = 0.0;  // normal diffusion, units of omega_c
    double Pi = 0.0;     // anomalous diffusion
    double gamma = 0.0;  // damping
    double r_ren = 0.0;  // frequency renormalization; never enters propagation
    bool r_ren_evaluated = false;  // false when a branch reports r_ren as a 0 placeholder
};

inline double coefficient_prefactor(const BathSpec& bath) {
    const double x = bath.resonance_ratio;
    return bath.coupling * bath.coupling * x / (2.0 * (1.0 + x * x));
}

// closed forms for the Ohmic Lorentz-Drude bath in the high-temperature window
// (document threshold: temperature_ratio >= 10; validity is the caller's call)
inline CoefficientSet coefficients_closed_form(double tau, const BathSpec& bath) {
    if (bath.family != SpectralFamily::OhmicLorentzDrude)
        throw UnsupportedFamilyError("coefficients_closed_form: Ohmic Lorentz-Drude only");
    if (tau < 0.0) throw DomainError("coefficients_closed_form: tau must be >= 0");

    const double x = bath.resonance_ratio;
    const double K = coefficient_prefactor(bath);
    const double T = bath.temperature_ratio;
    const double e = std::exp(-tau);
    const double c = std::cos(tau / x);
    const double s = std::sin(tau / x);

    CoefficientSet out;
    out.Delta = K * T * (x - e * (x * c - s));
    out.Pi = K * T * (1.0 - e * (c + x * s));
    out.gamma = K * (1.0 - e * (c + x * s));
    out.r_ren = 0.0;
    out.r_ren_evaluated = false;
    return out;
}

// damping exponent Gamma(tau) = 2 Int_0^tau gamma(s) ds, closed-form branch
inline double damping_exponent_closed_form(double tau, const BathSpec& bath) {
    if (bath.family != SpectralFamily::OhmicLorentzDrude)
        throw UnsupportedFamilyError("damping_exponent_closed_form: Ohmic Lorentz-Drude only");
    const double x = bath.resonance_ratio;
    const double K = coefficient_prefactor(bath);
    const double w0 = 1.0 / x;
    // Int_0^tau e^-s [cos(w0 s) + x sin(w0 s)] ds via Re[(1 - i x) E] with
    // E = (e^{(i w0 - 1) tau} - 1) / (i w0 - 1)
    const std::complex<double> lambda(-1.0, w0);
    const std::complex<double> E = (std::exp(lambda * tau) - 1.0) / lambda;
    const double osc = ((std::complex<double>(1.0, -x)) * E).real();
    return 2.0 * K * (tau - osc);
}

struct CoefficientQuadratureOptions {
    double abs_tol = 1e-10;     // on each coefficient, scaled units
    double rel_tol = 1e-9;
    ThermalKernel kernel = ThermalKernel::Auto;
    double inner_tol_factor = 1e-3;  // inner transform tolerance = outer tol * factor
    int max_depth = 55;              // outer bisection budget
};

namespace coeff_detail {

// frequency head extent before the accelerated oscillatory tail takes over
inline double head_extent(const BathSpec& bath) {
    double head = std::max(50.0, 50.0 / bath.resonance_ratio);
    if (bath.family == SpectralFamily::Tabulated && !bath.table.omega.empty())
        head = std::max(head, bath.table.omega.back());
    return head;
}

}  // namespace coeff_detail

// generic double quadrature of the defining integrals; inner frequency
// transforms use the oscillation-aware half-period scheme, the outer time
// integral an adaptive vector rule over all four coefficients at once
inline CoefficientSet coefficients_quadrature(double tau, const BathSpec& bath,
                                              const CoefficientQuadratureOptions& opt = {}) {
    if (tau < 0.0) throw DomainError("coefficients_quadrature: tau must be >= 0");
    if (!bath.invariants_ok()) throw DomainError("coefficients_quadrature: invalid bath");

    CoefficientSet out;
    out.r_ren_evaluated = true;
    if (tau == 0.0) return out;

    const ThermalKernel kernel = resolve_kernel(opt.kernel, bath);
    const double w0 = bath.omega0;
    const double head = coeff_detail::head_extent(bath);

    QuadOptions inner_opt;
    inner_opt.abs_tol = std::max(1e-14, opt.abs_tol * opt.inner_tol_factor);
    inner_opt.rel_tol = 1e-12;
    inner_opt.throw_on_failure = true;

    auto thermal_kernel_fn = [&](double w) {
        return spectral_density(w, bath) * thermal_weight(w, bath, kernel);
    };
    auto plain_kernel_fn = [&](double w) { return spectral_density(w, bath); };

    // interpolation knots are kernel kinks; align quadrature panels to them
    const std::vector<double>* breaks =
        (bath.family == SpectralFamily::Tabulated) ? &bath.table.omega : nullptr;

    // inner transforms as functions of the time-lag s
    auto inner_cos = [&](double s) {
        return fourier_semi_infinite(thermal_kernel_fn, s, FourierKind::Cosine, head, inner_opt,
                                     breaks)
            .value;
    };
    auto inner_sin = [&](double s) {
        return fourier_semi_infinite(plain_kernel_fn, s, FourierKind::Sine, head, inner_opt, breaks)
            .value;
    };

    auto integrand = [&](double s) -> VecN<4> {
        const double ic = inner_cos(s);
        const double is = inner_sin(s);
        const double c0 = std::cos(w0 * s);
        const double s0 = std::sin(w0 * s);
        return {ic * c0, ic * s0, is * s0, is * c0};
    };

    QuadOptions outer_opt;
    outer_opt.abs_tol = opt.abs_tol;
    outer_opt.rel_tol = opt.rel_tol;
    outer_opt.max_depth = opt.max_depth;
    outer_opt.throw_on_failure = false;

    QuadResultN<4> r = integrate_adaptive_vec<4>(integrand, 0.0, tau, outer_opt);
    if (!r.converged)
        throw QuadratureError("coefficients_quadrature: outer integral did not converge",
                              r.error, outer_opt.abs_tol);

    const double a2 = bath.coupling * bath.coupling;
    out.Delta = a2 * r.value[0];
    out.Pi = a2 * r.value[1];
    out.gamma = a2 * r.value[2];
    out.r_ren = a2 * r.value[3];
    return out;
}

// dispatcher used by propagation and the ODE oracle: closed form whenever it
// is valid (Ohmic family in the high-T window), generic quadrature otherwise
inline CoefficientSet master_equation_coefficients(double tau, const BathSpec& bath) {
    if (bath.family == SpectralFamily::OhmicLorentzDrude &&
        bath.temperature_ratio >= kHighTThreshold)
        return coefficients_closed_form(tau, bath);
    return coefficients_quadrature(tau, bath);
}

inline bool closed_form_valid(const BathSpec& bath) {
    return bath.family == SpectralFamily::OhmicLorentzDrude &&
           bath.temperature_ratio >= kHighTThreshold;
}

// frequency renormalization on demand; shares the Delta inner transform
// without the thermal weight, so the linear-kernel branch has the elementary
// form K { x - e^-tau [x cos(tau/x) - sin(tau/x)] } = Delta / T_r
inline double frequency_renormalization(double tau, const BathSpec& bath) {
    if (closed_form_valid(bath)) {
        const double x = bath.resonance_ratio;
        const double K = coefficient_prefactor(bath);
        const double e = std::exp(-tau);
        return K * (x - e * (x * std::cos(tau / x) - std::sin(tau / x)));
    }
    return coefficients_quadrature(tau, bath).r_ren;
}

// Gamma(tau) for any bath; numeric fallback integrates 2*gamma
inline double damping_exponent(double tau, const BathSpec& bath) {
    if (closed_form_valid(bath)) return damping_exponent_closed_form(tau, bath);
    QuadOptions opt;
    opt.abs_tol = 1e-11;
    auto f = [&](double s) { return 2.0 * coefficients_quadrature(s, bath).gamma; };
    return integrate_adaptive(f, 0.0, tau, opt).value;
}

}  // namespace cvnm

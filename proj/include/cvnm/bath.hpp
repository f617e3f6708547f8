#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "errors.hpp"

// Bath description in scaled units: hbar = 1, omega_c = 1, time tau = omega_c * t,
// frequencies in units of omega_c. The oscillator frequency is omega0 = 1/x with
// x = omega_c / omega0 the resonance parameter.

namespace cvnm {

enum class SpectralFamily { OhmicLorentzDrude, Tabulated };

// piecewise-linear tabulated spectral density, zero outside the knot range
struct TabulatedDensity {
    std::vector<double> omega;  // strictly increasing, >= 0
    std::vector<double> value;

    double operator()(double w) const {
        if (omega.size() < 2 || w < omega.front() || w > omega.back()) return 0.0;
        auto it = std::lower_bound(omega.begin(), omega.end(), w);
        if (it == omega.begin()) return value.front();
        const std::size_t hi = static_cast<std::size_t>(it - omega.begin());
        const std::size_t lo = hi - 1;
        const double t = (w - omega[lo]) / (omega[hi] - omega[lo]);
        return value[lo] + t * (value[hi] - value[lo]);
    }
};

struct BathSpec {
    SpectralFamily family = SpectralFamily::OhmicLorentzDrude;
    double cutoff = 1.0;             // omega_c in scaled units; fixed to 1
    double resonance_ratio = 10.0;   // x = omega_c / omega0, > 0
    double coupling = 0.1;           // alpha, > 0
    double temperature_ratio = 100.0;  // k_B T / (hbar omega_c), >= 0
    double omega0 = 0.1;             // 1/x, stored redundantly
    TabulatedDensity table;          // used when family == Tabulated

    static BathSpec ohmic_lorentz_drude(double x, double alpha, double temperature_ratio) {
        if (!(x > 0.0)) throw DomainError("BathSpec: resonance ratio x must be > 0");
        // alpha = 0 is the closed-system limit, kept for oracle cross-checks
        if (!(alpha >= 0.0)) throw DomainError("BathSpec: coupling alpha must be >= 0");
        if (!(temperature_ratio >= 0.0)) throw DomainError("BathSpec: temperature ratio must be >= 0");
        BathSpec b;
        b.family = SpectralFamily::OhmicLorentzDrude;
        b.resonance_ratio = x;
        b.coupling = alpha;
        b.temperature_ratio = temperature_ratio;
        b.omega0 = 1.0 / x;
        return b;
    }

    static BathSpec tabulated(TabulatedDensity table, double x, double alpha,
                              double temperature_ratio) {
        BathSpec b = ohmic_lorentz_drude(x, alpha, temperature_ratio);
        b.family = SpectralFamily::Tabulated;
        b.table = std::move(table);
        return b;
    }

    bool invariants_ok() const {
        return resonance_ratio > 0.0 && coupling >= 0.0 && temperature_ratio >= 0.0 &&
               std::fabs(omega0 * resonance_ratio - 1.0) < 1e-14;
    }
};

// Ohmic spectral density with Lorentz-Drude rolloff, J(w) = (1/pi) w / (w^2 + 1)
// in scaled units; tabulated baths interpolate their table instead.
inline double spectral_density(double omega, const BathSpec& bath) {
    if (omega < 0.0) throw DomainError("spectral_density: omega must be >= 0");
    if (bath.family == SpectralFamily::Tabulated) return bath.table(omega);
    return (1.0 / M_PI) * omega / (omega * omega + 1.0);
}

// mean occupation N(w) = 1 / (exp(w / T_r) - 1); T_r = 0 is the vacuum bath
inline double bose_occupation(double omega, double temperature_ratio) {
    if (temperature_ratio < 0.0) throw DomainError("bose_occupation: negative temperature ratio");
    if (temperature_ratio == 0.0) {
        if (omega <= 0.0) throw DomainError("bose_occupation: omega must be > 0");
        return 0.0;
    }
    if (omega <= 0.0) throw DomainError("bose_occupation: pole at omega <= 0 for finite temperature");
    return 1.0 / std::expm1(omega / temperature_ratio);
}

// Thermal weight that multiplies J(w) inside the diffusion integrals.
//
//   Exact      : 2 N(w) + 1 = coth(w / (2 T_r)); supports T_r = 0 (weight 1).
//   HighTLinear: T_r / w, the linearized weight whose integrals the
//                high-temperature closed forms reproduce exactly.
//   Auto       : HighTLinear when T_r >= high_t_threshold, Exact otherwise.
enum class ThermalKernel { Auto, Exact, HighTLinear };

inline constexpr double kHighTThreshold = 10.0;

inline ThermalKernel resolve_kernel(ThermalKernel k, const BathSpec& bath) {
    if (k != ThermalKernel::Auto) return k;
    return bath.temperature_ratio >= kHighTThreshold ? ThermalKernel::HighTLinear
                                                     : ThermalKernel::Exact;
}

inline double thermal_weight(double omega, const BathSpec& bath, ThermalKernel kernel) {
    const ThermalKernel k = resolve_kernel(kernel, bath);
    if (k == ThermalKernel::HighTLinear) {
        if (omega <= 0.0) return 0.0;  // J(w)*T/w stays finite; weight itself unused at 0
        return bath.temperature_ratio / omega;
    }
    if (bath.temperature_ratio == 0.0) return 1.0;
    if (omega <= 0.0) return 1.0;
    return 1.0 / std::tanh(0.5 * omega / bath.temperature_ratio);
}

}  // namespace cvnm

#pragma once

#include <stdexcept>
#include <string>

namespace cvnm {

// Invalid argument outside the documented domain (negative frequency, r < 0, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Operation requested for a spectral-density family that does not support it.
struct UnsupportedFamilyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input matrix lacks the block structure a closed-form path requires.
struct UnsupportedInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature failed to reach the requested tolerance within budget.
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved_, double requested_)
        : std::runtime_error(what), achieved(achieved_), requested(requested_) {}
    double achieved;   // error estimate actually reached
    double requested;  // tolerance that was asked for
};

// Adaptive ODE integration collapsed its step size.
struct IntegrationError : std::runtime_error {
    IntegrationError(const std::string& what, double t_, double step_)
        : std::runtime_error(what), t(t_), step(step_) {}
    double t;     // time at which the failure occurred
    double step;  // last attempted step
};

// Symplectic-eigenvalue discriminant negative beyond tolerance.
struct NumericalDegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Marker is 0/0-undefined for this state (e.g. intensity correlations at vacuum).
struct UndefinedMarkerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A propagated state violated the uncertainty principle beyond tolerance.
struct UnphysicalStateError : std::runtime_error {
    UnphysicalStateError(const std::string& what, double tau_, double nu_minus_)
        : std::runtime_error(what), tau(tau_), nu_minus(nu_minus_) {}
    double tau;
    double nu_minus;
};

// Sweep configuration file could not be parsed.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, int line_) : std::runtime_error(what), line(line_) {}
    int line;
};

}  // namespace cvnm

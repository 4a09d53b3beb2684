// errors.hpp — exception types shared across the library

#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

namespace dephase {

// Invalid physical input: parameter out of its domain, negative time,
// non-physical |G|.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Malformed sweep / CLI / recipe configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Base for runtime numerical failures (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Cubic roots too close for the simple-pole residue formula.  Carries the
// roots so the caller can regroup them into a confluent cluster.
class NearDegenerateRoots : public NumericalError {
public:
    std::array<std::complex<double>, 3> roots{};
    double min_separation = 0.0;

    NearDegenerateRoots(const std::string& msg,
                        const std::array<std::complex<double>, 3>& rts,
                        double min_sep)
        : NumericalError(msg), roots(rts), min_separation(min_sep) {}
};

// The inverse-Laplace oracle could not push its internal error estimate
// below the hard ceiling.
class ConvergenceError : public NumericalError {
public:
    double error_estimate = 0.0;
    double t = 0.0;

    ConvergenceError(const std::string& msg, double est, double at_t)
        : NumericalError(msg), error_estimate(est), t(at_t) {}
};

// Spectral-QFI cross term is ill-conditioned: eigenvalues cross while the
// state still depends on the parameter.
class DegenerateSpectrumError : public NumericalError {
public:
    explicit DegenerateSpectrumError(const std::string& msg) : NumericalError(msg) {}
};

// F_phi deviates from C_l^2 beyond tolerance somewhere on a series.
class IdentityViolation : public NumericalError {
public:
    double worst_t = 0.0;
    double max_error = 0.0;

    IdentityViolation(const std::string& msg, double t, double err)
        : NumericalError(msg), worst_t(t), max_error(err) {}
};

} // namespace dephase

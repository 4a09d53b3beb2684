// params.hpp — physical parameters of the model and their validation
//
// Conventions used everywhere else: all rates are absolute inverse-time
// units; lam (the telegraph jumping rate) sets the time scale, so sweeps and
// figure recipes express kappa, nu and t as multiples of lam and 1/lam.

#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "dephase/errors.hpp"

namespace dephase {

// Nonstationary random-telegraph environment: the noise switches between
// +-nu at average rate lam, with an exponential memory kernel
// K(t) = kappa * exp(-kappa t) and initial-distribution asymmetry a.
struct NoiseParams {
    double a = 0.0;      // nonequilibrium parameter, |a| <= 1; a = 0 is the equilibrium case
    double kappa = 1.0;  // memory decay rate, >= 0 (kappa -> inf is the memoryless RTN limit)
    double lam = 1.0;    // jumping rate, > 0
    double nu = 1.0;     // noise amplitude, > 0

    bool equilibrium() const { return a == 0.0; }
};

struct QubitParams {
    double omega0 = 0.0; // intrinsic transition frequency; only rotates the coherence phase
};

// Initial pure state cos(theta/2)|e> + e^{i phi} sin(theta/2)|g>.
struct PureStateAngles {
    double theta = 0.0; // polar angle in [0, pi]
    double phi = 0.0;   // azimuthal angle in [0, 2 pi)

    // Antipodal point on the Bloch sphere.
    PureStateAngles antipode() const {
        const double pi = 3.14159265358979323846;
        double ph = phi + pi;
        if (ph >= 2.0 * pi) ph -= 2.0 * pi;
        return {pi - theta, ph};
    }
};

namespace detail {

inline std::string describe(const char* name, double value, const char* constraint) {
    std::ostringstream os;
    os << "parameter " << name << " = " << value << " violates " << constraint;
    return os.str();
}

} // namespace detail

// Checks written so that NaN fails every constraint.
inline NoiseParams validate(const NoiseParams& p) {
    if (!(std::abs(p.a) <= 1.0)) throw DomainError(detail::describe("a", p.a, "|a| <= 1"));
    if (!(p.kappa >= 0.0)) throw DomainError(detail::describe("kappa", p.kappa, "kappa >= 0"));
    if (!(p.lam > 0.0)) throw DomainError(detail::describe("lambda", p.lam, "lambda > 0"));
    if (!(p.nu > 0.0)) throw DomainError(detail::describe("nu", p.nu, "nu > 0"));
    if (!std::isfinite(p.kappa) || !std::isfinite(p.lam) || !std::isfinite(p.nu))
        throw DomainError("noise parameters must be finite");
    return p;
}

inline QubitParams validate(const QubitParams& q) {
    if (!(q.omega0 >= 0.0) || !std::isfinite(q.omega0))
        throw DomainError(detail::describe("omega0", q.omega0, "omega0 >= 0"));
    return q;
}

inline PureStateAngles validate(const PureStateAngles& s) {
    const double pi = 3.14159265358979323846;
    if (!(s.theta >= 0.0 && s.theta <= pi))
        throw DomainError(detail::describe("theta", s.theta, "0 <= theta <= pi"));
    if (!(s.phi >= 0.0 && s.phi < 2.0 * pi))
        throw DomainError(detail::describe("phi", s.phi, "0 <= phi < 2 pi"));
    return s;
}

} // namespace dephase

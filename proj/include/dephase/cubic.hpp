// cubic.hpp — roots of a monic real cubic
//
// Companion-matrix eigenvalues (Eigen) give the initial guesses; each root is
// then polished by Newton steps in long double, and the non-real pair is kept
// exactly conjugate.  Roots are ordered (Re descending, Im ascending) so that
// downstream serialization is reproducible.

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

namespace dephase {

struct CubicRoots {
    std::array<std::complex<double>, 3> roots{};
    double min_separation = 0.0; // min pairwise distance
    double max_magnitude = 0.0;  // max |root|
};

namespace detail {

using cld = std::complex<long double>;

// p(s) = s^3 + c2 s^2 + c1 s + c0, real coefficients
inline cld cubic_value(long double c2, long double c1, long double c0, cld s) {
    return ((s + c2) * s + c1) * s + c0;
}

inline cld cubic_derivative(long double c2, long double c1, cld s) {
    return (3.0L * s + 2.0L * c2) * s + c1;
}

inline cld newton_polish(long double c2, long double c1, long double c0, cld s) {
    for (int it = 0; it < 6; ++it) {
        const cld f = cubic_value(c2, c1, c0, s);
        const cld df = cubic_derivative(c2, c1, s);
        if (std::abs(df) == 0.0L) break;
        const cld step = f / df;
        s -= step;
        if (std::abs(step) <= 1e-22L * (std::abs(s) + 1e-300L)) break;
    }
    return s;
}

} // namespace detail

inline CubicRoots solve_monic_cubic(double c2, double c1, double c0) {
    Eigen::Matrix3d companion;
    companion << 0.0, 0.0, -c0,
                 1.0, 0.0, -c1,
                 0.0, 1.0, -c2;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, /*computeEigenvectors=*/false);
    const auto ev = solver.eigenvalues();

    // Real matrices yield eigenvalues that are real or exact conjugate pairs.
    std::array<detail::cld, 3> raw;
    for (int i = 0; i < 3; ++i) raw[i] = detail::cld(ev(i).real(), ev(i).imag());

    const long double l2 = c2, l1 = c1, l0 = c0;
    std::array<detail::cld, 3> polished;
    std::array<bool, 3> done{false, false, false};
    for (int i = 0; i < 3; ++i) {
        if (done[i]) continue;
        if (raw[i].imag() == 0.0L) {
            polished[i] = detail::newton_polish(l2, l1, l0, raw[i]);
            polished[i].imag(0.0L);
            done[i] = true;
            continue;
        }
        // Polish the Im > 0 member, mirror its conjugate.
        int j = -1;
        for (int k = i + 1; k < 3; ++k)
            if (!done[k] && raw[k].imag() != 0.0L) { j = k; break; }
        if (j < 0) { // unmatched non-real value cannot occur for a real matrix
            polished[i] = detail::newton_polish(l2, l1, l0, raw[i]);
            done[i] = true;
            continue;
        }
        detail::cld up = raw[i].imag() > 0.0L ? raw[i] : raw[j];
        up = detail::newton_polish(l2, l1, l0, up);
        if (up.imag() < 0.0L) up = std::conj(up); // Newton may cross the axis near a real double root
        polished[i] = up;
        polished[j] = std::conj(up);
        done[i] = done[j] = true;
    }

    CubicRoots out;
    for (int i = 0; i < 3; ++i)
        out.roots[i] = {static_cast<double>(polished[i].real()),
                        static_cast<double>(polished[i].imag())};

    std::sort(out.roots.begin(), out.roots.end(),
              [](const std::complex<double>& x, const std::complex<double>& y) {
                  if (x.real() != y.real()) return x.real() > y.real();
                  return x.imag() < y.imag();
              });

    out.min_separation = std::abs(out.roots[0] - out.roots[1]);
    out.min_separation = std::min(out.min_separation, std::abs(out.roots[0] - out.roots[2]));
    out.min_separation = std::min(out.min_separation, std::abs(out.roots[1] - out.roots[2]));
    for (const auto& r : out.roots) out.max_magnitude = std::max(out.max_magnitude, std::abs(r));
    return out;
}

} // namespace dephase

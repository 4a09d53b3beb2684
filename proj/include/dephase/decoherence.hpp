// decoherence.hpp — exact evaluation of the decoherence function G(t)
//
// The environment average G(t) = <exp(i Int_0^t xi dt')> of the nonstationary
// telegraph process has the rational Laplace transform
//
//         s^2 + (kappa + i a nu) s + kappa (2 lambda + i a nu)
// G(s) = ---------------------------------------------------------
//         s^3 + kappa s^2 + (2 kappa lambda + nu^2) s + kappa nu^2
//
// with G(0) = 1.  Inversion is the residue sum G(t) = sum_j r_j exp(s_j t)
// over the three denominator roots s_j, with r_j = N(s_j) / prod_k (s_j-s_k);
// that residue sum is the unique proper-rational inversion consistent with
// G(0) = 1.  Parameter sweeps cross surfaces where denominator roots collide,
// so near-degenerate roots are regrouped into a cluster and evaluated through
// a Taylor expansion of the partial-fraction limit around the cluster
// centroid (the confluent terms t e^{st}, t^2 e^{st} and their finite-spread
// corrections), instead of refusing.
//
// Asymptotics used as invariants: s G(s) = 1 + (i a nu)/s - nu^2/s^2 + ...,
// hence sum r_j = 1 and sum r_j s_j = i a nu.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <ostream>
#include <sstream>
#include <vector>

#include "dephase/cubic.hpp"
#include "dephase/errors.hpp"
#include "dephase/params.hpp"

namespace dephase {

// G(s) as coefficient arrays; numerator and denominator are both monic.
struct RationalTransform {
    // numer[0] s^2 + numer[1] s + numer[2]; imaginary parts vanish iff a or nu is 0
    std::array<std::complex<double>, 3> numer{};
    // denom[0] s^3 + denom[1] s^2 + denom[2] s + denom[3]; always real
    std::array<double, 4> denom{};

    std::complex<double> numer_value(std::complex<double> s) const {
        return (s + numer[1]) * s + numer[2];
    }
    std::complex<double> numer_derivative(std::complex<double> s) const {
        return 2.0 * s + numer[1];
    }
    std::complex<double> denom_value(std::complex<double> s) const {
        return ((s + denom[1]) * s + denom[2]) * s + denom[3];
    }
    std::complex<double> value(std::complex<double> s) const {
        return numer_value(s) / denom_value(s);
    }
};

inline RationalTransform build_transform(const NoiseParams& p) {
    const std::complex<double> ianu(0.0, p.a * p.nu);
    RationalTransform rt;
    rt.numer = {std::complex<double>(1.0, 0.0),
                p.kappa + ianu,
                p.kappa * (2.0 * p.lam + ianu)};
    rt.denom = {1.0, p.kappa, 2.0 * p.kappa * p.lam + p.nu * p.nu, p.kappa * p.nu * p.nu};
    return rt;
}

// Denominator roots, ordered (Re desc, Im asc).  Throws NearDegenerateRoots
// below the simple-pole separation threshold; the caller regroups.
inline std::array<std::complex<double>, 3> solve_poles(const RationalTransform& rt) {
    const CubicRoots cr = solve_monic_cubic(rt.denom[1], rt.denom[2], rt.denom[3]);
    for (const auto& s : cr.roots) {
        const double residual = std::abs(rt.denom_value(s));
        const double m = std::abs(s);
        if (!(residual <= 1e-10 * std::max(1.0, m * m * m)))
            throw NumericalError("cubic residual out of tolerance at root");
    }
    if (cr.min_separation < 1e-8 * cr.max_magnitude)
        throw NearDegenerateRoots("denominator roots nearly coincide", cr.roots,
                                  cr.min_separation);
    return cr.roots;
}

// Simple-pole residues r_j = N(s_j) / prod_{k != j} (s_j - s_k).
inline std::array<std::complex<double>, 3>
residues(const RationalTransform& rt, const std::array<std::complex<double>, 3>& poles) {
    double min_sep = std::abs(poles[0] - poles[1]);
    min_sep = std::min(min_sep, std::abs(poles[0] - poles[2]));
    min_sep = std::min(min_sep, std::abs(poles[1] - poles[2]));
    double max_mag = 0.0;
    for (const auto& s : poles) max_mag = std::max(max_mag, std::abs(s));
    if (min_sep < 1e-8 * max_mag)
        throw NearDegenerateRoots("poles too close for simple-pole residues", poles, min_sep);

    using cld = std::complex<long double>;
    const cld n1(rt.numer[1].real(), rt.numer[1].imag());
    const cld n0(rt.numer[2].real(), rt.numer[2].imag());
    std::array<std::complex<double>, 3> out;
    for (int j = 0; j < 3; ++j) {
        const cld s(poles[j].real(), poles[j].imag());
        cld denom(1.0L, 0.0L);
        for (int k = 0; k < 3; ++k) {
            if (k == j) continue;
            denom *= s - cld(poles[k].real(), poles[k].imag());
        }
        const cld r = ((s + n1) * s + n0) / denom;
        out[j] = {static_cast<double>(r.real()), static_cast<double>(r.imag())};
    }
    return out;
}

// One inversion term coeff * t^tpower * exp(pole * t); for clustered poles
// these are the partial-fraction limit coefficients.
struct InversionTerm {
    std::complex<double> pole;
    std::complex<double> coeff;
    int tpower = 0;
};

class DecoherenceFunction {
public:
    explicit DecoherenceFunction(const NoiseParams& params) : params_(validate(params)) {
        build();
    }

    const NoiseParams& params() const { return params_; }
    const RationalTransform& transform() const { return rt_; }

    // The three denominator roots (repeated for clusters), deterministic order.
    const std::array<std::complex<double>, 3>& poles() const { return poles_; }

    // Inversion terms; simple poles carry tpower 0 and coeff = residue.
    const std::array<InversionTerm, 3>& terms() const { return terms_; }

    bool confluent() const { return mode_ != Mode::Simple; }

    // Numerically verified per instance: decay, never growth.
    bool poles_stable() const {
        for (const auto& s : poles_)
            if (s.real() > 1e-10 * std::max(1.0, std::abs(s))) return false;
        return true;
    }

    // Roots u_+- of the numerator quadratic (diagnostic only; evaluation needs
    // numerator values at the poles, never u_+-).
    std::array<std::complex<double>, 2> numerator_roots() const {
        const std::complex<double> n1 = rt_.numer[1], n0 = rt_.numer[2];
        std::complex<double> w = std::sqrt(n1 * n1 - 4.0 * n0);
        if (std::real(std::conj(n1) * w) < 0.0) w = -w;
        std::array<std::complex<double>, 2> u;
        const std::complex<double> big = -(n1 + w) / 2.0;
        if (std::abs(big) > 0.0) {
            u = {big, n0 / big};
        } else {
            u = {(-n1 + w) / 2.0, (-n1 - w) / 2.0};
        }
        std::sort(u.begin(), u.end(), [](const auto& x, const auto& y) {
            if (x.real() != y.real()) return x.real() > y.real();
            return x.imag() < y.imag();
        });
        return u;
    }

    std::complex<double> eval(double t) const {
        if (!(t >= 0.0)) throw DomainError("time must be >= 0 in eval");
        switch (mode_) {
            case Mode::Simple: return eval_simple(t);
            case Mode::Pair: return eval_pair(t);
            case Mode::Triple: return eval_triple(t);
        }
        return {};
    }
    std::complex<double> operator()(double t) const { return eval(t); }

    // Debug dump: re_pole,im_pole,re_res,im_res rows in deterministic order.
    void dump_csv(std::ostream& os) const {
        os << "re_pole,im_pole,re_res,im_res\n";
        for (const auto& term : terms_) {
            os << format(term.pole.real()) << ',' << format(term.pole.imag()) << ','
               << format(term.coeff.real()) << ',' << format(term.coeff.imag()) << '\n';
        }
    }

private:
    enum class Mode { Simple, Pair, Triple };

    using cplx = std::complex<double>;
    using cld = std::complex<long double>;

    static std::string format(double x) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }

    cld numer_ld(cld s) const {
        const cld n1(rt_.numer[1].real(), rt_.numer[1].imag());
        const cld n0(rt_.numer[2].real(), rt_.numer[2].imag());
        return (s + n1) * s + n0;
    }
    cld numer_derivative_ld(cld s) const {
        const cld n1(rt_.numer[1].real(), rt_.numer[1].imag());
        return 2.0L * s + n1;
    }

    void build() {
        rt_ = build_transform(params_);
        const CubicRoots cr = solve_monic_cubic(rt_.denom[1], rt_.denom[2], rt_.denom[3]);
        const auto& roots = cr.roots;

        // Try the simple-pole representation first; oversized residues mark a
        // cluster (|r| ~ N / (separation * gap), so a bound on |r| is a
        // scale-aware separation criterion).
        std::array<cld, 3> rs;
        double max_r = 0.0;
        for (int j = 0; j < 3; ++j) {
            cld denom(1.0L, 0.0L);
            const cld sj(roots[j].real(), roots[j].imag());
            for (int k = 0; k < 3; ++k) {
                if (k == j) continue;
                denom *= sj - cld(roots[k].real(), roots[k].imag());
            }
            if (std::abs(denom) == 0.0L) {
                max_r = kResidueCeiling * 2.0;
                break;
            }
            rs[j] = numer_ld(sj) / denom;
            max_r = std::max(max_r, static_cast<double>(std::abs(rs[j])));
        }

        if (max_r <= kResidueCeiling) {
            mode_ = Mode::Simple;
            poles_ = roots;
            long double sum_re = 0.0L, sum_im = 0.0L;
            cld moment1(0.0L, 0.0L);
            for (int j = 0; j < 3; ++j) {
                terms_[j] = {roots[j],
                             cplx(static_cast<double>(rs[j].real()),
                                  static_cast<double>(rs[j].imag())),
                             0};
                sum_re += rs[j].real();
                sum_im += rs[j].imag();
                moment1 += rs[j] * cld(roots[j].real(), roots[j].imag());
            }
            const double anu = params_.a * params_.nu;
            if (std::abs(static_cast<double>(sum_re) - 1.0) > 1e-12 ||
                std::abs(static_cast<double>(sum_im)) > 1e-12)
                throw NumericalError("residues do not sum to 1");
            if (std::abs(moment1 - cld(0.0L, anu)) > 1e-8 * std::max(1.0, std::abs(anu)))
                throw NumericalError("first residue moment deviates from i*a*nu");
            return;
        }

        build_cluster(roots);
    }

    void build_cluster(const std::array<cplx, 3>& roots) {
        // Closest pair joins the cluster; the remaining root follows if its
        // own coefficient is also oversized.
        int i0 = 0, i1 = 1, i2 = 2;
        double best = std::abs(roots[0] - roots[1]);
        if (std::abs(roots[0] - roots[2]) < best) {
            best = std::abs(roots[0] - roots[2]);
            i0 = 0; i1 = 2; i2 = 1;
        }
        if (std::abs(roots[1] - roots[2]) < best) {
            i0 = 1; i1 = 2; i2 = 0;
        }
        const cplx q = roots[i2];
        const cplx p = 0.5 * (roots[i0] + roots[i1]);
        const cplx e = 0.5 * (roots[i0] - roots[i1]);
        const cplx C = rt_.numer_value(q) / ((q - p) * (q - p) - e * e);

        // The pair expansion runs in powers of e/(p-q); keep it well inside
        // its convergence disk, otherwise treat all three roots as one cluster.
        const bool pair_converges = std::abs(e) <= 0.25 * std::abs(p - q);

        if (std::abs(C) <= kResidueCeiling && pair_converges) {
            mode_ = Mode::Pair;
            pair_.p = p;
            pair_.e = e;
            pair_.q = q;
            pair_.C = C;
            const cplx B = rt_.numer_value(p) / (p - q);
            poles_ = {p, p, q};
            terms_ = {InversionTerm{p, 1.0 - C, 0}, InversionTerm{p, B, 1},
                      InversionTerm{q, C, 0}};
            sort_terms();
            return;
        }

        mode_ = Mode::Triple;
        triple_.p = cplx(-rt_.denom[1] / 3.0, 0.0);
        for (int k = 0; k < 3; ++k) triple_.e[k] = roots[k] - triple_.p;
        const cplx np = rt_.numer_value(triple_.p);
        const cplx dnp = rt_.numer_derivative(triple_.p);
        poles_ = {triple_.p, triple_.p, triple_.p};
        terms_ = {InversionTerm{triple_.p, 1.0, 0}, InversionTerm{triple_.p, dnp, 1},
                  InversionTerm{triple_.p, 0.5 * np, 2}};
    }

    void sort_terms() {
        std::sort(terms_.begin(), terms_.end(),
                  [](const InversionTerm& a, const InversionTerm& b) {
                      if (a.pole.real() != b.pole.real()) return a.pole.real() > b.pole.real();
                      if (a.pole.imag() != b.pole.imag()) return a.pole.imag() < b.pole.imag();
                      return a.tpower < b.tpower;
                  });
        std::sort(poles_.begin(), poles_.end(), [](const cplx& a, const cplx& b) {
            if (a.real() != b.real()) return a.real() > b.real();
            return a.imag() < b.imag();
        });
    }

    // Neumaier-compensated sum of the three exponential terms; kills the
    // cancellation between large opposing residues near the cluster ceiling.
    cplx eval_simple(double t) const {
        double sre = 0.0, cre = 0.0, sim = 0.0, cim = 0.0;
        for (const auto& term : terms_) {
            const cplx v = term.coeff * std::exp(term.pole * t);
            accumulate(sre, cre, v.real());
            accumulate(sim, cim, v.imag());
        }
        return {sre + cre, sim + cim};
    }

    static void accumulate(double& sum, double& comp, double x) {
        const double s = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - s) + x;
        else
            comp += (x - s) + sum;
        sum = s;
    }

    // Divided difference of N(s) e^{st} / (s - q) over the cluster {p-e, p+e},
    // as a Taylor series around the centroid p, plus the far-pole term.
    cplx eval_pair(double t) const {
        const cplx p = pair_.p, e = pair_.e, q = pair_.q;
        cplx far = pair_.C * std::exp(q * t);
        const double exponent = p.real() * t;
        if (exponent < -745.0) return far;

        const cplx inv_pq = 1.0 / (p - q);
        const cplx np = rt_.numer_value(p);
        const cplx dnp = rt_.numer_derivative(p);
        const cplx e2 = e * e;

        // tp[m] = t^m/m!, c[k] = (-1)^k / (p-q)^{k+1}
        // psi_m = sum_{i+j+k=m} {N(p),N'(p),1}_i * tp_j * c_k
        // cluster part = e^{pt} * sum_{m odd} psi_m e^{m-1}
        constexpr int kMax = 120;
        cplx acc(0.0, 0.0);
        cplx epow(1.0, 0.0); // e^{m-1} for odd m
        std::vector<cplx> tp(kMax + 1), c(kMax + 1);
        tp[0] = 1.0;
        c[0] = inv_pq;
        for (int m = 1; m <= kMax; ++m) {
            tp[m] = tp[m - 1] * (t / m);
            c[m] = -c[m - 1] * inv_pq;
        }
        int quiet = 0;
        for (int m = 1; m <= kMax; m += 2) {
            cplx psi(0.0, 0.0);
            for (int k = 0; k <= m; ++k) {
                const int left = m - k;
                cplx d = np * tp[left];
                if (left >= 1) d += dnp * tp[left - 1];
                if (left >= 2) d += tp[left - 2];
                psi += d * c[k];
            }
            const cplx term = psi * epow;
            acc += term;
            epow *= e2;
            if (std::abs(term) <= 1e-18 * (std::abs(acc) + 1e-30)) {
                if (++quiet >= 2) break;
            } else {
                quiet = 0;
            }
        }
        return far + std::exp(p * t) * acc;
    }

    // Divided difference of N(s) e^{st} over all three clustered roots;
    // h_k are complete homogeneous symmetric polynomials in the offsets.
    cplx eval_triple(double t) const {
        const cplx p = triple_.p;
        const double exponent = p.real() * t;
        if (exponent < -745.0) return {0.0, 0.0};
        const cplx np = rt_.numer_value(p);
        const cplx dnp = rt_.numer_derivative(p);
        const cplx x = triple_.e[0], y = triple_.e[1], z = triple_.e[2];

        constexpr int kMax = 120;
        std::vector<cplx> tp(kMax + 1);
        tp[0] = 1.0;
        for (int m = 1; m <= kMax; ++m) tp[m] = tp[m - 1] * (t / m);

        cplx acc(0.0, 0.0);
        cplx h2 = 1.0, h3 = 1.0; // h_0 of {y,z} and {x,y,z}
        cplx zpow = 1.0;
        int quiet = 0;
        for (int m = 2; m <= kMax; ++m) {
            const int k = m - 2;
            if (k > 0) {
                zpow *= z;
                h2 = y * h2 + zpow;
                h3 = x * h3 + h2;
            }
            cplx d = np * tp[m] + dnp * tp[m - 1] + tp[m - 2];
            const cplx term = d * h3;
            acc += term;
            if (std::abs(term) <= 1e-18 * (std::abs(acc) + 1e-30)) {
                if (++quiet >= 2) break;
            } else {
                quiet = 0;
            }
        }
        return std::exp(p * t) * acc;
    }

    static constexpr double kResidueCeiling = 1e4;

    NoiseParams params_;
    RationalTransform rt_;
    Mode mode_ = Mode::Simple;
    std::array<cplx, 3> poles_{};
    std::array<InversionTerm, 3> terms_{};
    struct { cplx p, e, q, C; } pair_{};
    struct { cplx p; std::array<cplx, 3> e; } triple_{};
};

// Free-function spelling used by the sweep and metrics layers.
inline std::complex<double> eval_G(const DecoherenceFunction& df, double t) {
    return df.eval(t);
}

} // namespace dephase

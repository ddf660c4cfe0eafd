#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "quadopo/errors.hpp"
#include "quadopo/model.hpp"

namespace quadopo {

// Classical mean amplitudes; alpha[0..3] are the pump modes 1..4,
// alpha[4..7] the low-frequency modes 5..8.
struct MeanState {
    std::array<std::complex<double>, 8> alpha{};
};

enum class Regime {
    Below,        // pumps eps/gamma, low modes empty
    Above,        // pumps clamped at kappa/(2 chi), low modes macroscopic
    AtThreshold,  // within 1e-9 relative of the critical amplitude
};

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::Below: return "below";
    case Regime::Above: return "above";
    case Regime::AtThreshold: return "at-threshold";
    }
    return "unknown";
}

struct SteadyState {
    MeanState state;
    Regime regime = Regime::Below;
};

// Time derivatives of the eight mean amplitudes:
//   d a_p/dt = eps_p - chi_p a_l1 a_l2 - gamma_p a_p        (pumps)
//   d a_l/dt = sum over the two processes of chi_p a_p a_q* - kappa_l a_l
// where (l1,l2) is pump p's low-mode pair and q the partner of l in each
// process.
inline MeanState classical_drift(const MeanState& s, const SystemParams& p) {
    const auto& a = s.alpha;
    MeanState d;
    for (int pm = 0; pm < 4; ++pm) {
        const auto [l1, l2] = CouplingTopology::pump_to_pair[pm];
        d.alpha[pm] = p.eps[pm] - p.chi[pm] * a[4 + l1] * a[4 + l2] - p.gamma[pm] * a[pm];
    }
    for (int l = 0; l < 4; ++l) {
        std::complex<double> v = -p.kappa[l] * a[4 + l];
        for (const auto [pm, q] : CouplingTopology::processes_for_low(l))
            v += p.chi[pm] * a[pm] * std::conj(a[4 + q]);
        d.alpha[4 + l] = v;
    }
    return d;
}

inline double drift_residual(const SystemParams& p, const MeanState& s) {
    const MeanState d = classical_drift(s, p);
    double r = 0.0;
    for (const auto& v : d.alpha) r = std::max(r, std::abs(v));
    return r;
}

// Closed-form stationary solutions of the symmetric system.  Below the
// critical amplitude the pumps sit at eps/gamma with empty low modes;
// above it the pumps clamp at kappa/(2 chi) and the low modes acquire
// the real positive amplitude sqrt((eps - eps_c)/chi).  That branch has a
// phase freedom; the all-positive representative is returned, and
// observables built from it should depend only on magnitudes.
inline SteadyState steady_state(const SystemParams& p) {
    validate(p);
    if (!is_symmetric(p))
        throw SymmetryError("steady-state closed forms require fully symmetric parameters; "
                            "use relax for asymmetric parameters");
    const double chi = p.chi[0], eps = p.eps[0], gamma = p.gamma[0], kappa = p.kappa[0];

    SteadyState out;
    if (chi == 0.0) {
        // No coupling: the pumps fill independently and nothing reaches
        // the low modes, for any drive.
        out.regime = Regime::Below;
        for (int i = 0; i < 4; ++i) out.state.alpha[i] = eps / gamma;
        return out;
    }

    const double ec = threshold_pump(p);
    if (std::abs(eps - ec) / ec < 1e-9) {
        out.regime = Regime::AtThreshold;
        for (int i = 0; i < 4; ++i) out.state.alpha[i] = eps / gamma;
        return out;
    }
    if (eps < ec) {
        out.regime = Regime::Below;
        for (int i = 0; i < 4; ++i) out.state.alpha[i] = eps / gamma;
        return out;
    }
    out.regime = Regime::Above;
    const double low = std::sqrt((eps - ec) / chi);
    for (int i = 0; i < 4; ++i) out.state.alpha[i] = kappa / (2.0 * chi);
    for (int i = 0; i < 4; ++i) out.state.alpha[4 + i] = low;
    return out;
}

namespace detail {

using State8 = std::array<std::complex<double>, 8>;

inline State8 axpy(const State8& y, double h, const State8& d) {
    State8 r;
    for (int i = 0; i < 8; ++i) r[i] = y[i] + h * d[i];
    return r;
}

} // namespace detail

// Integrates the classical equations from `init` with an adaptive
// Dormand-Prince 4(5) pair until the drift residual drops below `tol`.
// Throws NoConvergence if t_max is exhausted first (instability or a
// limit cycle), and returns `init` untouched when it already satisfies
// the residual bound.
inline MeanState relax(const SystemParams& p, const MeanState& init, double t_max, double tol) {
    validate(p);
    if (!(tol > 0.0)) throw DomainError("relax tolerance must be positive");
    if (!(t_max > 0.0)) throw DomainError("relax horizon must be positive");

    if (drift_residual(p, init) < tol) return init;

    using detail::State8;
    const auto f = [&p](const State8& y) {
        MeanState s;
        s.alpha = y;
        return classical_drift(s, p).alpha;
    };

    // Dormand-Prince tableau.
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                     e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                     e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    constexpr double rtol = 1e-10, atol = 1e-12;

    // Stiffest linear rate at any fixed point: gamma for the pumps,
    // kappa plus the coupling shift (at most kappa more) for the low modes.
    double stiff = 0.0;
    for (int i = 0; i < 4; ++i) stiff = std::max({stiff, p.gamma[i], 2.0 * p.kappa[i]});
    // An explicit pair must stay inside its stability region; once the
    // state is close to the fixed point the error estimate alone would let
    // h drift past the boundary and the residual would floor out above tol
    // instead of contracting.
    const double h_cap = 2.0 / stiff;

    State8 y = init.alpha;
    double t = 0.0;
    double h = std::min({0.01 / stiff, h_cap, t_max});

    for (long step = 0; step < 20'000'000; ++step) {
        if (t >= t_max) break;
        h = std::min({h, h_cap, t_max - t});

        const State8 k1 = f(y);
        const State8 k2 = f(detail::axpy(y, h * a21, k1));
        State8 tmp;
        for (int i = 0; i < 8; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const State8 k3 = f(tmp);
        for (int i = 0; i < 8; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const State8 k4 = f(tmp);
        for (int i = 0; i < 8; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const State8 k5 = f(tmp);
        for (int i = 0; i < 8; ++i)
            tmp[i] = y[i] +
                     h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const State8 k6 = f(tmp);
        State8 ynew;
        for (int i = 0; i < 8; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State8 k7 = f(ynew);

        double err = 0.0;
        for (int i = 0; i < 8; ++i) {
            const std::complex<double> e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(e) / sc);
        }

        if (err <= 1.0) {
            t += h;
            y = ynew;
            double r = 0.0;
            for (int i = 0; i < 8; ++i) r = std::max(r, std::abs(k7[i]));
            if (r < tol) {
                MeanState out;
                out.alpha = y;
                return out;
            }
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h *= fac;
        if (!(h > 0.0) || !std::isfinite(h))
            throw NoConvergence("relax step size collapsed");
    }
    throw NoConvergence("relax reached t_max with residual above tolerance");
}

} // namespace quadopo

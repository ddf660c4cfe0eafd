#pragma once

#include <array>
#include <string>
#include <utility>

#include "quadopo/errors.hpp"

namespace quadopo {

// Mode layout: four pump modes (1..4) drive four low-frequency modes
// (5..8).  Pump i down-converts into a pair of low modes, and the four
// pairs close a single ring:
//   1 -> (5,6),  2 -> (6,7),  3 -> (7,8),  4 -> (8,5).
// Indices below are 0-based: pump p in 0..3, low mode l in 0..3 standing
// for modes 5..8.
struct CouplingTopology {
    static constexpr std::array<std::pair<int, int>, 4> pump_to_pair{{
        {0, 1},
        {1, 2},
        {2, 3},
        {3, 0},
    }};

    // The two pumps touching low mode l, with the partner low mode each
    // couples it to.  Ring structure: partners are l's two neighbours.
    static constexpr std::array<std::pair<int, int>, 2> processes_for_low(int l) {
        return {{{l, (l + 1) % 4}, {(l + 3) % 4, (l + 3) % 4}}};
    }
};

// All rates are in units of the low-mode loss rate; amplitudes are
// dimensionless.  Arrays are indexed by pump (chi, eps, gamma) or by low
// mode (kappa), both 0-based.
struct SystemParams {
    std::array<double, 4> chi{};    // nonlinear coupling strengths, >= 0
    std::array<double, 4> eps{};    // classical pump drive amplitudes, >= 0
    std::array<double, 4> gamma{};  // pump-mode cavity loss rates, > 0
    std::array<double, 4> kappa{};  // low-mode cavity loss rates, > 0
};

namespace detail {
inline bool all_equal(const std::array<double, 4>& a) {
    return a[0] == a[1] && a[1] == a[2] && a[2] == a[3];
}
} // namespace detail

// True iff every parameter family is uniform across modes.  Exact
// comparison on purpose: symmetry is a structural claim about the inputs,
// not a numerical one.
inline bool is_symmetric(const SystemParams& p) {
    return detail::all_equal(p.chi) && detail::all_equal(p.eps) &&
           detail::all_equal(p.gamma) && detail::all_equal(p.kappa);
}

// Checks the domain invariants and returns the parameters unchanged.
// Throws DomainError naming the first violated invariant.
inline const SystemParams& validate(const SystemParams& p) {
    for (int i = 0; i < 4; ++i) {
        if (!(p.gamma[i] > 0.0))
            throw DomainError("pump loss rate gamma" + std::to_string(i + 1) +
                              " must be strictly positive");
        if (!(p.kappa[i] > 0.0))
            throw DomainError("low-mode loss rate kappa" + std::to_string(i + 1) +
                              " must be strictly positive");
        if (!(p.chi[i] >= 0.0))
            throw DomainError("coupling strength chi" + std::to_string(i + 1) +
                              " must be nonnegative");
        if (!(p.eps[i] >= 0.0))
            throw DomainError("pump amplitude eps" + std::to_string(i + 1) +
                              " must be nonnegative");
    }
    return p;
}

// Critical pump amplitude of the symmetric system.  The factor 1/2
// relative to the single-process parametric oscillator is because every
// pump mode feeds two down-conversion processes, so depletion sets in at
// half the usual drive:
//   eps_c = gamma * kappa / (2 * chi).
inline double threshold_pump(const SystemParams& p) {
    validate(p);
    if (!is_symmetric(p))
        throw SymmetryError("threshold closed form requires fully symmetric parameters");
    if (p.chi[0] == 0.0)
        throw DomainError("threshold undefined for zero coupling strength");
    return p.gamma[0] * p.kappa[0] / (2.0 * p.chi[0]);
}

// Convenience constructor for the symmetric system.
inline SystemParams symmetric_params(double chi, double eps, double gamma, double kappa) {
    SystemParams p;
    p.chi.fill(chi);
    p.eps.fill(eps);
    p.gamma.fill(gamma);
    p.kappa.fill(kappa);
    return p;
}

} // namespace quadopo

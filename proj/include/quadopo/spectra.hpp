#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "quadopo/entanglement.hpp"
#include "quadopo/errors.hpp"
#include "quadopo/meanfield.hpp"
#include "quadopo/model.hpp"

namespace quadopo {

using Matrix16cd = Eigen::Matrix<std::complex<double>, 16, 16>;

// Fluctuations delta z around a fixed point of the classical equations,
// ordered [da1, da1+, da2, da2+, ..., da8, da8+] (pumps first), evolve as
//   d(delta z) = driftA * delta z * dt + noise,
// with noise covariance diffusionD per unit time.  The noise enters only
// through the low-frequency modes, so diffusionD is confined to the
// lower-right 8x8 block.
struct LinearizedSystem {
    Matrix16cd driftA;
    Matrix16cd diffusionD;
};

// The classical equations carry a continuous phase symmetry on the low
// modes, so the above-threshold branch always has one exactly-zero drift
// eigenvalue (the phase mode) while being attracting transverse to it.
// is_stable therefore tolerates eigenvalues on the imaginary axis: the
// point is unstable only if some mode genuinely grows, i.e. a real part
// exceeds +1e-10.
struct StabilityResult {
    std::array<std::complex<double>, 16> eigenvalues{};  // sorted by descending real part
    double max_real = 0.0;
    bool is_stable = false;
};

struct SpectrumRow {
    double omega = 0.0;
    QuadCovariance vout;
    VlfTriple values;
    GainVector gains;
    bool stable = true;
};

using SpectrumTable = std::vector<SpectrumRow>;

struct PumpScanRow {
    double ratio = 0.0;
    VlfTriple min_values;   // each correlation minimized over the frequency grid
    GainVector gains;       // gains at the frequency minimizing the first correlation
    bool stable = true;
};

// Row/column of mode `mode` (0-based, pumps 0..3 then low 4..7) in the
// interleaved fluctuation ordering [da_1, da+_1, ..., da_8, da+_8].
inline int idx_a(int mode) { return 2 * mode; }
inline int idx_p(int mode) { return 2 * mode + 1; }

// Exact Jacobian of the deterministic mean-field equations in the doubled
// (alpha, alpha+) phase space, evaluated at `steady` (with alpha+ taken as
// conj(alpha)), together with the noise covariance at that point.
// Requires `steady` to be a fixed point to within 1e-8.
inline LinearizedSystem linearize(const SystemParams& p, const MeanState& steady) {
    validate(p);
    const double res = drift_residual(p, steady);
    if (!(res < 1e-8))
        throw NotAFixedPoint("drift residual " + std::to_string(res) +
                             " exceeds 1e-8 at the proposed operating point");

    std::array<std::complex<double>, 8> a = steady.alpha;
    std::array<std::complex<double>, 8> ap;
    for (int i = 0; i < 8; ++i) ap[i] = std::conj(a[i]);

    LinearizedSystem sys;
    sys.driftA.setZero();
    sys.diffusionD.setZero();
    Matrix16cd& A = sys.driftA;

    for (int pm = 0; pm < 4; ++pm) {
        const auto [l1, l2] = CouplingTopology::pump_to_pair[pm];
        // d a_p = eps - chi a_l1 a_l2 - gamma a_p
        A(idx_a(pm), idx_a(pm)) = -p.gamma[pm];
        A(idx_a(pm), idx_a(4 + l1)) = -p.chi[pm] * a[4 + l2];
        A(idx_a(pm), idx_a(4 + l2)) = -p.chi[pm] * a[4 + l1];
        // conjugate family: d a+_p = eps - chi a+_l1 a+_l2 - gamma a+_p
        A(idx_p(pm), idx_p(pm)) = -p.gamma[pm];
        A(idx_p(pm), idx_p(4 + l1)) = -p.chi[pm] * ap[4 + l2];
        A(idx_p(pm), idx_p(4 + l2)) = -p.chi[pm] * ap[4 + l1];
    }
    for (int l = 0; l < 4; ++l) {
        // d a_l = sum_processes chi a_p a+_q - kappa a_l
        A(idx_a(4 + l), idx_a(4 + l)) = -p.kappa[l];
        A(idx_p(4 + l), idx_p(4 + l)) = -p.kappa[l];
        for (const auto [pm, q] : CouplingTopology::processes_for_low(l)) {
            A(idx_a(4 + l), idx_a(pm)) += p.chi[pm] * ap[4 + q];
            A(idx_a(4 + l), idx_p(4 + q)) += p.chi[pm] * a[pm];
            A(idx_p(4 + l), idx_p(pm)) += p.chi[pm] * a[4 + q];
            A(idx_p(4 + l), idx_a(4 + q)) += p.chi[pm] * ap[pm];
        }
    }

    for (int pm = 0; pm < 4; ++pm) {
        const auto [l1, l2] = CouplingTopology::pump_to_pair[pm];
        const std::complex<double> da = p.chi[pm] * a[pm];
        const std::complex<double> dp = p.chi[pm] * ap[pm];
        sys.diffusionD(idx_a(4 + l1), idx_a(4 + l2)) = da;
        sys.diffusionD(idx_a(4 + l2), idx_a(4 + l1)) = da;
        sys.diffusionD(idx_p(4 + l1), idx_p(4 + l2)) = dp;
        sys.diffusionD(idx_p(4 + l2), idx_p(4 + l1)) = dp;
    }
    return sys;
}

inline StabilityResult stability(const LinearizedSystem& sys) {
    Eigen::ComplexEigenSolver<Matrix16cd> es(sys.driftA, false);
    StabilityResult r;
    for (int i = 0; i < 16; ++i) r.eigenvalues[i] = es.eigenvalues()(i);
    std::sort(r.eigenvalues.begin(), r.eigenvalues.end(),
              [](const std::complex<double>& x, const std::complex<double>& y) {
                  if (x.real() != y.real()) return x.real() > y.real();
                  return x.imag() > y.imag();
              });
    r.max_real = r.eigenvalues[0].real();
    r.is_stable = r.max_real < 1e-10;
    return r;
}

// True when the slowest mode sits on the imaginary axis to within the
// stability tolerance (the phase mode above threshold, or an operating
// point exactly at threshold).
inline bool is_marginal(const StabilityResult& st) {
    return st.is_stable && st.max_real > -1e-10;
}

// Stationary spectrum of the Ornstein-Uhlenbeck process
// dz = A z dt + B dW with BB^T = D:
//   S(omega) = (i omega I - A)^-1 D (-i omega I - A^T)^-1.
// Generic in the dimension so scalar and reduced models can reuse it.
inline Eigen::MatrixXcd ou_spectrum(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& D,
                                    double omega) {
    const auto n = A.rows();
    const std::complex<double> iw(0.0, omega);
    Eigen::MatrixXcd m1 = Eigen::MatrixXcd::Identity(n, n) * iw - A;
    const Eigen::MatrixXcd y = m1.partialPivLu().solve(D);
    // S M2 = Y with M2 = -i omega I - A^T, solved via M2^T S^T = Y^T.
    Eigen::MatrixXcd m2t = Eigen::MatrixXcd::Identity(n, n) * (-iw) - A;
    return m2t.partialPivLu().solve(y.transpose()).transpose();
}

inline Matrix16cd intracavity_spectrum(const LinearizedSystem& sys, double omega) {
    const StabilityResult st = stability(sys);
    if (!st.is_stable)
        throw Unstable("largest drift eigenvalue real part " + std::to_string(st.max_real));
    // On a marginal branch the undamped mode is noise-driven, so the raw
    // spectrum grows like 1/omega^2 and the zero-frequency matrix does not
    // exist; refuse it rather than hand back a singular solve.
    if (is_marginal(st) && std::abs(omega) < 1e-9)
        throw DomainError("intracavity spectrum diverges at zero frequency on a marginal "
                          "branch; evaluate at a nonzero frequency");
    return ou_spectrum(sys.driftA, sys.diffusionD, omega);
}

namespace detail {

// Output quadrature spectral covariance at one frequency, from an
// already-linearized system.  Steps: take the low-mode block of S(omega),
// rotate it to quadratures X = a + a+, Y = -i(a - a+), symmetrize, and
// add the vacuum through the mirror:
//   Vout_ij = delta_ij + 2 sqrt(kappa_i kappa_j) SQ_ij.
// The moments behind S are normally ordered, which is what makes the
// vacuum term exactly 1 per quadrature; the factor 2 sqrt(kappa_i kappa_j)
// is fixed by requiring the uncorrelated limit to sit at the combined
// value 4 and an ideally squeezed single quadrature to reach 0.
inline SpectrumRow output_row(const LinearizedSystem& sys, const SystemParams& p, double omega) {
    const StabilityResult st = stability(sys);
    if (!st.is_stable)
        throw Unstable("largest drift eigenvalue real part " + std::to_string(st.max_real));
    // On a marginal branch the undamped phase mode blows up the raw
    // spectrum like 1/omega^2, but the optimized correlations converge:
    // the minimizing gains come to cancel that mode exactly, so the
    // zero-frequency point is a removable limit.  It is evaluated at a
    // small offset where the limit has been reached; elsewhere the floor
    // is inactive.
    double w = omega;
    if (is_marginal(st)) {
        double kmin = p.kappa[0];
        for (int i = 1; i < 4; ++i) kmin = std::min(kmin, p.kappa[i]);
        w = std::max(std::abs(omega), 1e-2 * kmin);
    }
    const Matrix16cd s = ou_spectrum(sys.driftA, sys.diffusionD, w);
    const Eigen::Matrix<std::complex<double>, 8, 8> slow = s.bottomRightCorner<8, 8>();

    Eigen::Matrix<std::complex<double>, 8, 8> u;
    u.setZero();
    const std::complex<double> i1(0.0, 1.0);
    for (int r = 0; r < 4; ++r) {
        u(r, 2 * r) = 1.0;
        u(r, 2 * r + 1) = 1.0;
        u(4 + r, 2 * r) = -i1;
        u(4 + r, 2 * r + 1) = i1;
    }
    // The spectrum is a moment matrix of commuting variables, so the
    // rotation is bilinear (transpose, not adjoint).
    const Eigen::Matrix<std::complex<double>, 8, 8> sq = u * slow * u.transpose();

    SpectrumRow row;
    row.omega = omega;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            const double sym = 0.5 * (sq(i, j) + sq(j, i)).real();
            row.vout.m(i, j) = (i == j ? 1.0 : 0.0) +
                               2.0 * std::sqrt(p.kappa[i % 4] * p.kappa[j % 4]) * sym;
        }
    const VlfResult r = vlf_optimized(row.vout);
    row.values = r.values;
    row.gains = r.gains;
    row.stable = true;
    return row;
}

} // namespace detail

inline SpectrumRow output_vlf_spectrum(const SystemParams& p, const MeanState& steady,
                                       double omega) {
    return detail::output_row(linearize(p, steady), p, omega);
}

inline SpectrumTable scan_frequency(const SystemParams& p, const MeanState& steady,
                                    const std::vector<double>& omega_grid) {
    SpectrumTable t;
    if (omega_grid.empty()) return t;
    const LinearizedSystem sys = linearize(p, steady);
    t.reserve(omega_grid.size());
    for (double w : omega_grid) t.push_back(detail::output_row(sys, p, w));
    return t;
}

// For each drive ratio r = eps/eps_c: recompute the steady state at that
// drive, linearize, and minimize each output correlation over the grid.
// Ratios inside |r - 1| < 0.02 are rejected up front: the linearization
// is meaningless that close to threshold.  An unstable operating point is
// reported inline as a row with stable=false and NaN values.
inline std::vector<PumpScanRow> scan_pump(const SystemParams& p,
                                          const std::vector<double>& ratios,
                                          const std::vector<double>& omega_grid) {
    validate(p);
    if (!is_symmetric(p))
        throw SymmetryError("pump scan requires fully symmetric parameters");
    if (omega_grid.empty())
        throw DomainError("pump scan needs a nonempty frequency grid");
    for (double r : ratios)
        if (std::abs(r - 1.0) < 0.02)
            throw DomainError("drive ratio " + std::to_string(r) +
                              " is inside the excluded threshold band |r-1| < 0.02");

    const double ec = threshold_pump(p);
    std::vector<PumpScanRow> rows;
    rows.reserve(ratios.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();

    for (double r : ratios) {
        SystemParams pr = p;
        pr.eps.fill(r * ec);
        const SteadyState ss = steady_state(pr);
        const LinearizedSystem sys = linearize(pr, ss.state);

        PumpScanRow row;
        row.ratio = r;
        if (!stability(sys).is_stable) {
            row.stable = false;
            row.min_values = {nan, nan, nan};
            row.gains = {nan, nan, nan, nan};
            rows.push_back(row);
            continue;
        }
        VlfTriple best{std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()};
        GainVector gbest;
        for (double w : omega_grid) {
            const SpectrumRow s = detail::output_row(sys, pr, w);
            if (s.values.v56 < best.v56) {
                best.v56 = s.values.v56;
                gbest = s.gains;
            }
            best.v67 = std::min(best.v67, s.values.v67);
            best.v78 = std::min(best.v78, s.values.v78);
        }
        row.min_values = best;
        row.gains = gbest;
        rows.push_back(row);
    }
    return rows;
}

} // namespace quadopo

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "quadopo/errors.hpp"
#include "quadopo/meanfield.hpp"
#include "quadopo/model.hpp"

namespace quadopo {

// Doubled phase-space trajectory: alphaPlus is an independent field, not
// the conjugate of alpha, except in the noiseless classical limit.
// Trajectory averages of products reproduce normally ordered moments.
struct TrajectoryState {
    std::array<std::complex<double>, 8> alpha{};
    std::array<std::complex<double>, 8> alphaPlus{};
};

// Trajectories whose any field magnitude crosses this are treated as
// escaped to infinity (the doubled phase space admits such excursions).
inline constexpr double divergence_threshold = 1e8;

// Ensemble and time averages.  mean[] is in the interleaved order
// [a1, a1+, a2, a2+, ..., a8, a8+].  n_low(i,j) = <alpha+_i alpha_j> and
// m_low(i,j) = <alpha_i alpha_j> over the low modes (i, j = 0..3 for
// modes 5..8).  The *_se companions hold standard errors of the real and
// imaginary parts, packed as complex(se_re, se_im), computed from the
// across-trajectory scatter of per-trajectory time averages.
struct EnsembleMoments {
    std::array<std::complex<double>, 16> mean{};
    std::array<std::complex<double>, 16> mean_se{};
    Eigen::Matrix4cd n_low;
    Eigen::Matrix4cd n_low_se;
    Eigen::Matrix4cd m_low;
    Eigen::Matrix4cd m_low_se;
    std::size_t n_traj = 0;
    std::size_t n_diverged = 0;
};

// Noise-to-field coupling matrix B in the interleaved field ordering
// (rows) versus the 16 real noise channels (columns), at the given state.
// Each down-conversion process p feeds its low-mode pair (l1, l2) through
// one complex channel pair with coefficient c_p = sqrt(chi_p alpha_p / 2):
//   d alpha_l1 += c_p (eta_a + i eta_b),  d alpha_l2 += c_p (eta_a - i eta_b),
// and the conjugate family uses the shifted channel pair with
// sqrt(chi_p alpha+_p / 2).  By construction B B^T equals the diffusion
// matrix of the linearized system at the same state.
inline Eigen::Matrix<std::complex<double>, 16, 16> build_noise_matrix(const TrajectoryState& s,
                                                                      const SystemParams& p) {
    Eigen::Matrix<std::complex<double>, 16, 16> b;
    b.setZero();
    const std::complex<double> i1(0.0, 1.0);
    // Noise channel pairs (0-based) per process, for the alpha family;
    // the alphaPlus family uses the pair shifted by +2.
    constexpr int chan[4] = {4, 8, 0, 12};  // processes 1..4 -> (eta_a, eta_a+1)
    for (int pm = 0; pm < 4; ++pm) {
        const auto [l1, l2] = CouplingTopology::pump_to_pair[pm];
        // The +i eta branch goes to the lower-numbered mode of the pair.
        const int lo = std::min(l1, l2), hi = std::max(l1, l2);
        const std::complex<double> c =
            std::sqrt(std::complex<double>(p.chi[pm]) * s.alpha[pm] / 2.0);
        const std::complex<double> cp =
            std::sqrt(std::complex<double>(p.chi[pm]) * s.alphaPlus[pm] / 2.0);
        const int k = chan[pm];
        b(2 * (4 + lo), k) += c;
        b(2 * (4 + lo), k + 1) += c * i1;
        b(2 * (4 + hi), k) += c;
        b(2 * (4 + hi), k + 1) += -c * i1;
        b(2 * (4 + lo) + 1, k + 2) += cp;
        b(2 * (4 + lo) + 1, k + 3) += cp * i1;
        b(2 * (4 + hi) + 1, k + 2) += cp;
        b(2 * (4 + hi) + 1, k + 3) += -cp * i1;
    }
    return b;
}

// One Euler-Maruyama step.  `noises` must already be scaled by sqrt(dt)
// by the caller; the deterministic terms are scaled by dt here.  Complex
// square roots take the principal branch; either branch yields the same
// noise distribution.
inline TrajectoryState step_ito(const TrajectoryState& s, const SystemParams& p, double dt,
                                const std::array<double, 16>& noises) {
    const auto& a = s.alpha;
    const auto& b = s.alphaPlus;
    TrajectoryState out;

    for (int pm = 0; pm < 4; ++pm) {
        const auto [l1, l2] = CouplingTopology::pump_to_pair[pm];
        out.alpha[pm] =
            a[pm] + dt * (p.eps[pm] - p.chi[pm] * a[4 + l1] * a[4 + l2] - p.gamma[pm] * a[pm]);
        out.alphaPlus[pm] =
            b[pm] + dt * (p.eps[pm] - p.chi[pm] * b[4 + l1] * b[4 + l2] - p.gamma[pm] * b[pm]);
    }

    constexpr int chan[4] = {4, 8, 0, 12};
    const std::complex<double> i1(0.0, 1.0);
    for (int l = 0; l < 4; ++l) {
        std::complex<double> da = -p.kappa[l] * a[4 + l];
        std::complex<double> db = -p.kappa[l] * b[4 + l];
        for (const auto [pm, q] : CouplingTopology::processes_for_low(l)) {
            da += p.chi[pm] * a[pm] * b[4 + q];
            db += p.chi[pm] * b[pm] * a[4 + q];
        }
        std::complex<double> na(0.0, 0.0), nb(0.0, 0.0);
        for (const auto [pm, q] : CouplingTopology::processes_for_low(l)) {
            const int k = chan[pm];
            const std::complex<double> c =
                std::sqrt(std::complex<double>(p.chi[pm]) * a[pm] / 2.0);
            const std::complex<double> cp =
                std::sqrt(std::complex<double>(p.chi[pm]) * b[pm] / 2.0);
            // The lower-numbered mode of the pair takes (eta_a + i eta_b),
            // its partner (eta_a - i eta_b); that sign split is what makes
            // the cross moment <d alpha_l1 d alpha_l2> = chi alpha dt while
            // keeping the squared moments zero.
            const double sign = (l < q) ? 1.0 : -1.0;
            na += c * (noises[k] + sign * i1 * noises[k + 1]);
            nb += cp * (noises[k + 2] + sign * i1 * noises[k + 3]);
        }
        out.alpha[4 + l] = a[4 + l] + dt * da + na;
        out.alphaPlus[4 + l] = b[4 + l] + dt * db + nb;
    }

    for (int i = 0; i < 8; ++i)
        if (std::abs(out.alpha[i]) > divergence_threshold ||
            std::abs(out.alphaPlus[i]) > divergence_threshold)
            throw Diverged("field magnitude exceeded divergence threshold");
    return out;
}

namespace detail {

// Counter-style generator used solely to spread one master seed into
// per-trajectory seeds that are independent of execution order.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 sm{master + (index + 1) * 0x9E3779B97F4A7C15ull};
    return sm.next();
}

// Standard normal pairs via Box-Muller on mt19937_64.  The uniform is
// mapped into (0, 1] so the logarithm is always finite.
class NormalSource {
  public:
    explicit NormalSource(std::uint64_t seed) : eng_(seed) {}

    void fill(std::array<double, 16>& out, double scale) {
        for (int i = 0; i < 16; i += 2) {
            const double u1 = ((eng_() >> 11) + 1) * (1.0 / 9007199254740992.0);
            const double u2 = (eng_() >> 11) * (1.0 / 9007199254740992.0);
            const double r = std::sqrt(-2.0 * std::log(u1)) * scale;
            const double th = 6.283185307179586476925286766559 * u2;
            out[i] = r * std::cos(th);
            out[i + 1] = r * std::sin(th);
        }
    }

  private:
    std::mt19937_64 eng_;
};

// Per-trajectory time averages over the retained window.
struct TrajRecord {
    bool ok = false;
    std::array<std::complex<double>, 16> mean{};
    std::array<std::complex<double>, 16> n{};  // <alpha+_i alpha_j>, row-major 4x4
    std::array<std::complex<double>, 16> m{};  // <alpha_i alpha_j>, row-major 4x4
};

inline TrajRecord run_one(const SystemParams& p, const TrajectoryState& init, long n_steps,
                          long first_kept, double dt, std::uint64_t seed) {
    TrajRecord rec;
    NormalSource rng(seed);
    const double sqdt = std::sqrt(dt);
    TrajectoryState s = init;
    std::array<double, 16> eta{};
    long kept = 0;
    try {
        for (long k = 1; k <= n_steps; ++k) {
            rng.fill(eta, sqdt);
            s = step_ito(s, p, dt, eta);
            if (k < first_kept) continue;
            ++kept;
            for (int i = 0; i < 8; ++i) {
                rec.mean[2 * i] += s.alpha[i];
                rec.mean[2 * i + 1] += s.alphaPlus[i];
            }
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    rec.n[4 * i + j] += s.alphaPlus[4 + i] * s.alpha[4 + j];
                    rec.m[4 * i + j] += s.alpha[4 + i] * s.alpha[4 + j];
                }
        }
    } catch (const Diverged&) {
        return rec;  // ok stays false
    }
    const double inv = 1.0 / static_cast<double>(kept);
    for (auto& v : rec.mean) v *= inv;
    for (auto& v : rec.n) v *= inv;
    for (auto& v : rec.m) v *= inv;
    rec.ok = true;
    return rec;
}

// Fixed-shape pairwise reduction over trajectory index: the result is
// identical for every thread count and schedule.
struct Accum {
    std::array<std::complex<double>, 48> sum{};    // mean, n, m concatenated
    std::array<std::complex<double>, 48> sumsq{};  // componentwise re^2, im^2
    long count = 0;
};

inline Accum reduce(const std::vector<TrajRecord>& recs, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
        Accum a;
        const TrajRecord& r = recs[lo];
        if (!r.ok) return a;
        a.count = 1;
        for (int i = 0; i < 16; ++i) a.sum[i] = r.mean[i];
        for (int i = 0; i < 16; ++i) a.sum[16 + i] = r.n[i];
        for (int i = 0; i < 16; ++i) a.sum[32 + i] = r.m[i];
        for (int i = 0; i < 48; ++i)
            a.sumsq[i] = {a.sum[i].real() * a.sum[i].real(), a.sum[i].imag() * a.sum[i].imag()};
        return a;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    Accum a = reduce(recs, lo, mid);
    const Accum b = reduce(recs, mid, hi);
    for (int i = 0; i < 48; ++i) {
        a.sum[i] += b.sum[i];
        a.sumsq[i] += b.sumsq[i];
    }
    a.count += b.count;
    return a;
}

inline unsigned resolve_threads(std::size_t n_traj) {
    unsigned n = 0;
    if (const char* env = std::getenv("QUADOPO_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 0) n = static_cast<unsigned>(v);
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, n_traj));
}

} // namespace detail

// Integrates `n_traj` independent trajectories and returns ensemble
// statistics of per-trajectory time averages over t >= t_final/2.
// Deterministic for a fixed seed regardless of thread count: every
// trajectory's noise stream depends only on (seed, trajectory index) and
// the reduction order is fixed.  When `initial` is omitted the classical
// steady state is used (the doubled-space vacuum is the zero field, so no
// fluctuations are seeded).
inline EnsembleMoments run_ensemble(const SystemParams& p, std::size_t n_traj, double t_final,
                                    double dt, std::uint64_t seed,
                                    const std::optional<TrajectoryState>& initial = {}) {
    validate(p);
    if (n_traj < 2) throw DomainError("ensemble needs at least 2 trajectories");
    double maxrate = 0.0;
    for (int i = 0; i < 4; ++i) maxrate = std::max({maxrate, p.gamma[i], p.kappa[i]});
    if (!(dt > 0.0) || dt > 0.05 / maxrate * (1.0 + 1e-12))
        throw DomainError("dt must lie in (0, 0.05/max(gamma, kappa)]");
    const long n_steps = std::lround(t_final / dt);
    if (n_steps < 2) throw DomainError("t_final must cover at least two steps");
    const long first_kept = (n_steps + 1) / 2;  // first retained sample has t >= t_final/2

    TrajectoryState init;
    if (initial) {
        init = *initial;
    } else {
        const SteadyState ss = steady_state(p);  // SymmetryError for asymmetric parameters
        init.alpha = ss.state.alpha;
        for (int i = 0; i < 8; ++i) init.alphaPlus[i] = std::conj(init.alpha[i]);
    }

    std::vector<detail::TrajRecord> recs(n_traj);
    const unsigned n_threads = detail::resolve_threads(n_traj);
    const auto worker = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx)
            recs[idx] = detail::run_one(p, init, n_steps, first_kept, dt,
                                        detail::trajectory_seed(seed, idx));
    };
    if (n_threads <= 1) {
        worker(0, n_traj);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        const std::size_t chunk = (n_traj + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const std::size_t lo = std::min<std::size_t>(t * chunk, n_traj);
            const std::size_t hi = std::min<std::size_t>(lo + chunk, n_traj);
            if (lo < hi) pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    const detail::Accum acc = detail::reduce(recs, 0, n_traj);
    EnsembleMoments out;
    out.n_traj = n_traj;
    out.n_diverged = n_traj - static_cast<std::size_t>(acc.count);
    if (out.n_diverged * 100 > n_traj)
        throw TooManyDivergences(std::to_string(out.n_diverged) + " of " +
                                 std::to_string(n_traj) + " trajectories diverged");

    const double n = static_cast<double>(acc.count);
    const auto stats = [&](int k, std::complex<double>& mean, std::complex<double>& se) {
        mean = acc.sum[k] / n;
        const double vr =
            std::max(0.0, (acc.sumsq[k].real() - acc.sum[k].real() * acc.sum[k].real() / n) /
                              (n - 1.0));
        const double vi =
            std::max(0.0, (acc.sumsq[k].imag() - acc.sum[k].imag() * acc.sum[k].imag() / n) /
                              (n - 1.0));
        se = {std::sqrt(vr / n), std::sqrt(vi / n)};
    };
    for (int i = 0; i < 16; ++i) stats(i, out.mean[i], out.mean_se[i]);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            stats(16 + 4 * i + j, out.n_low(i, j), out.n_low_se(i, j));
            stats(32 + 4 * i + j, out.m_low(i, j), out.m_low_se(i, j));
        }
    return out;
}

} // namespace quadopo

#pragma once

// Independent numerical oracles for the tests.  Each one recomputes a
// quantity the library produces, by a deliberately different route, so
// agreement between the two is evidence rather than tautology.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

// Gauss-Legendre nodes and weights on [-1, 1]: Newton iteration on the
// Legendre polynomial from the three-term recurrence.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(n), 0.0);
    w.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = -z;
        x[static_cast<std::size_t>(n - 1 - i)] = z;
        w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(n - 1 - i)] =
            2.0 / ((1.0 - z * z) * pp * pp);
    }
}

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
double gauss_segment(F&& f, double a, double b, int n) {
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        s += w[static_cast<std::size_t>(i)] * f(mid + half * x[static_cast<std::size_t>(i)]);
    return s * half;
}

// Stationary covariance of dz = A z dt + noise with diffusion D:
// solves A C + C A^T + D = 0 by vectorization,
// (I (x) A + A (x) I) vec(C) = -vec(D), column-major vec.
inline Eigen::MatrixXcd lyapunov_covariance(const Eigen::MatrixXcd& a,
                                            const Eigen::MatrixXcd& d) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (int k = 0; k < n; ++k) big.block(k * n, k * n, n, n) += a;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) big(j * n + k, i * n + k) += a(j, i);
    Eigen::VectorXcd rhs(n * n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) rhs(c * n + r) = -d(r, c);
    const Eigen::VectorXcd v = big.partialPivLu().solve(rhs);
    Eigen::MatrixXcd out(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) out(r, c) = v(c * n + r);
    return out;
}

// Brute-force 2D minimizer on a uniform grid; f(ga, gb) -> value.
struct GridMin {
    double ga = 0.0, gb = 0.0, value = 0.0;
};

template <class F>
GridMin grid_search_2d(F&& f, double lo, double hi, double step) {
    GridMin best;
    bool first = true;
    for (double ga = lo; ga <= hi + 0.5 * step; ga += step)
        for (double gb = lo; gb <= hi + 0.5 * step; gb += step) {
            const double v = f(ga, gb);
            if (first || v < best.value) {
                best = {ga, gb, v};
                first = false;
            }
        }
    return best;
}

// Matrix exponential by scaling-and-squaring on a plain Taylor series;
// independent of any eigendecomposition.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& m) {
    const int n = static_cast<int>(m.rows());
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(m(i, j));
        nrm = std::max(nrm, row);
    }
    int s = 0;
    while (nrm > 0.5) {
        nrm *= 0.5;
        ++s;
    }
    const Eigen::MatrixXd x = m / std::ldexp(1.0, s);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

} // namespace oracle

#pragma once

#include <cmath>

#include "quadopo/analytic.hpp"
#include "quadopo/errors.hpp"

namespace quadopo {

// Real weights attached to the Y quadratures in the three combined-
// variance inequalities below.
struct GainVector {
    double g5 = 0.0;
    double g6 = 0.0;
    double g7 = 0.0;
    double g8 = 0.0;
};

// Left-hand sides of the three quadripartite inequalities; all three
// below 4 simultaneously certifies quadripartite entanglement.
struct VlfTriple {
    double v56 = 0.0;
    double v67 = 0.0;
    double v78 = 0.0;
};

struct VlfResult {
    VlfTriple values;
    GainVector gains;
};

namespace detail {

// Quadratic form u^T B u over the Y block B of an (X,Y) covariance.
inline double yform(const Matrix8d& m, double u5, double u6, double u7, double u8) {
    const double u[4] = {u5, u6, u7, u8};
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            s += u[i] * u[j] * m(4 + i, 4 + j);
    return s;
}

} // namespace detail

// Gains minimizing the first and third combined variances.  (g7, g8)
// minimize V(Y5+Y6+g7 Y7+g8 Y8) and (g5, g6) minimize
// V(g5 Y5+g6 Y6+Y7+Y8); the middle inequality reuses g5 and g8 and is
// not separately optimized.  All moments are read from the Y block.
inline GainVector optimal_gains(const QuadCovariance& cov) {
    const Matrix8d& m = cov.m;
    const double v5 = m(4, 4), v6 = m(5, 5), v7 = m(6, 6), v8 = m(7, 7);
    const double v56 = m(4, 5), v57 = m(4, 6), v58 = m(4, 7);
    const double v67 = m(5, 6), v68 = m(5, 7), v78 = m(6, 7);

    const double den56 = v56 * v56 - v5 * v6;
    const double den78 = v78 * v78 - v7 * v8;
    if (std::abs(den56) < 1e-12 || std::abs(den78) < 1e-12)
        throw DegenerateCovariance("gain optimization denominator below 1e-12");

    GainVector g;
    g.g5 = (v6 * (v57 + v58) - v56 * (v67 + v68)) / den56;
    g.g6 = (v5 * (v67 + v68) - v56 * (v57 + v58)) / den56;
    g.g7 = (v8 * (v57 + v67) - v78 * (v58 + v68)) / den78;
    g.g8 = (v7 * (v58 + v68) - v78 * (v57 + v67)) / den78;
    return g;
}

// The three combined variances
//   V56 = V(X5-X6) + V(Y5+Y6+g7 Y7+g8 Y8)
//   V67 = V(X6-X7) + V(g5 Y5+Y6+Y7+g8 Y8)
//   V78 = V(X7-X8) + V(g5 Y5+g6 Y6+Y7+Y8)
// evaluated on the given covariance with the given gains.
inline VlfTriple vlf_correlations(const QuadCovariance& cov, const GainVector& g) {
    const Matrix8d& m = cov.m;
    VlfTriple v;
    v.v56 = m(0, 0) + m(1, 1) - 2.0 * m(0, 1) +
            detail::yform(m, 1.0, 1.0, g.g7, g.g8);
    v.v67 = m(1, 1) + m(2, 2) - 2.0 * m(1, 2) +
            detail::yform(m, g.g5, 1.0, 1.0, g.g8);
    v.v78 = m(2, 2) + m(3, 3) - 2.0 * m(2, 3) +
            detail::yform(m, g.g5, g.g6, 1.0, 1.0);
    return v;
}

inline VlfResult vlf_optimized(const QuadCovariance& cov) {
    VlfResult r;
    r.gains = optimal_gains(cov);
    r.values = vlf_correlations(cov, r.gains);
    return r;
}

} // namespace quadopo

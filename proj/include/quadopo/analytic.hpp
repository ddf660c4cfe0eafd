#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "quadopo/errors.hpp"

namespace quadopo {

using Matrix8d = Eigen::Matrix<double, 8, 8>;

// Effective couplings xi_i = chi_i * <a_i(0)> of the undepleted-pump
// picture, real and nonnegative.  xi[0] couples modes (5,6), xi[1] (6,7),
// xi[2] (7,8), xi[3] (8,5).
struct EffectiveCouplings {
    std::array<double, 4> xi{};
};

enum class Method {
    General,       // eigendecomposition of the coupling matrix; any xi
    ClosedEqual,   // closed form, requires all xi equal
    ClosedPaired,  // closed form, requires xi = (a, a, b, b)
};

// X and Y quadrature propagators over modes 5..8:
//   X(t) = mX * X(0),  Y(t) = mY * Y(0),  with mY(t) = mX(-t).
// Moment preservation requires mX * mY^T = I.
struct PropagatorPair {
    Eigen::Matrix4d mX;
    Eigen::Matrix4d mY;
};

// Symmetric second moments over the basis (X5..X8, Y5..Y8) with the
// vacuum normalized to the identity.
struct QuadCovariance {
    Matrix8d m;
};

inline const EffectiveCouplings& validate(const EffectiveCouplings& c) {
    for (int i = 0; i < 4; ++i)
        if (!(c.xi[i] >= 0.0))
            throw DomainError("effective coupling xi" + std::to_string(i + 1) +
                              " must be nonnegative");
    return c;
}

// Ring coupling matrix K over modes 5..8 (0-based 0..3):
// K[0,1]=xi1, K[1,2]=xi2, K[2,3]=xi3, K[3,0]=xi4, symmetric, zero
// elsewhere.  The quadrature equations of motion are dX/dt = K X and
// dY/dt = -K Y.
inline Eigen::Matrix4d coupling_matrix(const EffectiveCouplings& c) {
    validate(c);
    Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
    k(0, 1) = k(1, 0) = c.xi[0];
    k(1, 2) = k(2, 1) = c.xi[1];
    k(2, 3) = k(3, 2) = c.xi[2];
    k(3, 0) = k(0, 3) = c.xi[3];
    return k;
}

namespace detail {

inline PropagatorPair propagator_general(const EffectiveCouplings& c, double t) {
    const Eigen::Matrix4d k = coupling_matrix(c);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(k);
    const Eigen::Vector4d lam = es.eigenvalues();
    const Eigen::Matrix4d v = es.eigenvectors();
    PropagatorPair p;
    p.mX = v * (lam * t).array().exp().matrix().asDiagonal() * v.transpose();
    p.mY = v * (lam * -t).array().exp().matrix().asDiagonal() * v.transpose();
    return p;
}

inline PropagatorPair propagator_equal(double xi, double t) {
    const double a = std::cosh(xi * t) * std::cosh(xi * t);
    const double b = 0.5 * std::sinh(2.0 * xi * t);
    const double cc = std::sinh(xi * t) * std::sinh(xi * t);
    PropagatorPair p;
    // a and cc are even in t, b is odd; the Y propagator is the X
    // propagator at -t.
    p.mX << a, b, cc, b,
            b, a, b, cc,
            cc, b, a, b,
            b, cc, b, a;
    p.mY << a, -b, cc, -b,
            -b, a, -b, cc,
            cc, -b, a, -b,
            -b, cc, -b, a;
    return p;
}

inline PropagatorPair propagator_paired(double a, double b, double t) {
    const double om = std::hypot(a, b);
    if (om == 0.0) {
        PropagatorPair p;
        p.mX.setIdentity();
        p.mY.setIdentity();
        return p;
    }
    const double s2 = std::sqrt(2.0);
    const double w = s2 * om * t;
    const double ch = std::cosh(w);
    const double sh = std::sinh(w);
    // (ch - 1)/2 == sinh^2(om t / sqrt(2)), kept in this form so the
    // even/odd split in t is explicit.
    const double d = (ch + 1.0) / 2.0;        // diagonal, rows 5 and 7
    const double e = a * sh / (s2 * om);      // ring couplings touching mode 6
    const double f = (ch - 1.0) / 2.0;        // opposite pair 5-7
    const double g = b * sh / (s2 * om);      // ring couplings touching mode 8
    const double h = (b * b + a * a * ch) / (om * om);  // diagonal, row 6
    const double i = a * b * (ch - 1.0) / (om * om);    // opposite pair 6-8
    const double j = (a * a + b * b * ch) / (om * om);  // diagonal, row 8
    PropagatorPair p;
    // e and g are odd in t (they carry the ring couplings, whose slope at
    // t=0 is a resp. b); d, f, h, i, j are even.
    p.mX << d, e, f, g,
            e, h, e, i,
            f, e, d, g,
            g, i, g, j;
    p.mY << d, -e, f, -g,
            -e, h, -e, i,
            f, -e, d, -g,
            -g, i, -g, j;
    return p;
}

} // namespace detail

inline PropagatorPair propagator(const EffectiveCouplings& c, double t, Method method) {
    validate(c);
    switch (method) {
    case Method::General:
        return detail::propagator_general(c, t);
    case Method::ClosedEqual:
        if (!(c.xi[0] == c.xi[1] && c.xi[1] == c.xi[2] && c.xi[2] == c.xi[3]))
            throw MethodMismatch("ClosedEqual requires all four couplings equal");
        return detail::propagator_equal(c.xi[0], t);
    case Method::ClosedPaired:
        if (!(c.xi[0] == c.xi[1] && c.xi[2] == c.xi[3]))
            throw MethodMismatch("ClosedPaired requires couplings (a, a, b, b)");
        return detail::propagator_paired(c.xi[0], c.xi[2], t);
    }
    throw DomainError("unknown propagator method");
}

// Second moments evolved from the vacuum, <X_i(0)X_j(0)> = <Y_i(0)Y_j(0)>
// = delta_ij.  The dynamics never couple X to Y and the initial state has
// no X-Y correlations, so the cross block stays zero.
inline QuadCovariance quad_covariance(const PropagatorPair& p) {
    QuadCovariance cov;
    cov.m.setZero();
    cov.m.topLeftCorner<4, 4>() = p.mX * p.mX.transpose();
    cov.m.bottomRightCorner<4, 4>() = p.mY * p.mY.transpose();
    return cov;
}

// Literal transcription of a closed-form expression for the optimized
// equal-coupling correlation V3.  It is dimensionally inhomogeneous
// (square roots of second moments mixed with quadratic terms) and does
// not agree with the covariance pipeline away from t = 0; the pipeline
// (quad_covariance + vlf_optimized) is the authoritative route.  Shipped
// only so both values can be emitted side by side.
inline double v3_closed_form(double xi, double t) {
    const double a = std::cosh(xi * t) * std::cosh(xi * t);
    const double b = 0.5 * std::sinh(2.0 * xi * t);
    const double c = std::sinh(xi * t) * std::sinh(xi * t);
    const double sq2b = std::sqrt(2.0 * b);
    const double sqb = std::sqrt(b);
    const double num = b * b - 4.0 * std::pow(b, 1.5) * c * std::sqrt(2.0) +
                       12.0 * b * c * c - 8.0 * c * c * c * sq2b + 4.0 * std::pow(c, 4);
    const double den = a * a - 2.0 * a * sqb + b - c * sq2b + c * c;
    return 4.0 * a * a - 4.0 * a * sq2b + 4.0 * (sq2b - c) * c + 2.0 * num / den;
}

} // namespace quadopo

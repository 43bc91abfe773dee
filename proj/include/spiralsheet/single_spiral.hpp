#pragma once

#include <cmath>
#include <complex>

#include "spiralsheet/conformal.hpp"
#include "spiralsheet/constants.hpp"
#include "spiralsheet/geometry.hpp"

namespace spiralsheet {

namespace detail {

/// Winding data for evaluating a field next to Sigma_{theta_k}; refuses points whose
/// strip image is closer than the exclusion distance to either edge.
inline Winding field_winding(const PolarPoint& z, double a, double theta_k, int spiral_index = 0) {
    if (!(z.r > 0.0)) {
        throw OriginError("field evaluated at the spiral center");
    }
    Winding w{};
    try {
        w = winding(z.r, z.theta - theta_k, a);
    } catch (const OnSpiralError&) {
        throw OnSpiralError("point lies on spiral " + std::to_string(spiral_index), spiral_index);
    }
    const double zone = tolerance::field_exclusion * (1.0 + a * a);
    if (w.margin < zone || two_pi * a - w.margin < zone) {
        throw OnSpiralError("point within the exclusion zone of spiral " + std::to_string(spiral_index),
                            spiral_index);
    }
    return w;
}

/// exp(iA(ln r + i(theta - 2 pi J(r, theta, k)))) e^{theta_k A}, the mode shared by the
/// potential and the velocity of the spiral with base angle theta_k.
inline complex spiral_mode(const PolarPoint& z, const SpectralConstant& A, double a, double theta_k,
                           int spiral_index = 0) {
    const Winding w = field_winding(z, a, theta_k, spiral_index);
    const double turn_angle = z.theta - theta_k - two_pi * static_cast<double>(w.j);
    const double log_r = std::log(z.r);
    // iA ln r - A turn_angle with iA = -Im A + i Re A
    const double re = -A.im * log_r - A.re * turn_angle;
    const double im = A.re * log_r - A.im * turn_angle;
    return std::polar(std::exp(re), im);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Spiral frame

/// w(z) = e^{i theta} 2ag/(r(a-i)) ( r^{2a/(a+i)} e^{-A theta} e^{2 pi J A}/(1 - e^{2 pi A}) )^*,
/// generalized to a base angle theta0 through J(r, theta, theta0) and e^{theta0 A}.
inline complex profile_velocity(const PolarPoint& z, const SpiralParams& p) {
    const SpectralConstant A = spectral_constant(p.a);
    const complex mode = detail::spiral_mode(z, A, p.a, p.theta0);
    const complex denom = 1.0 - exp_A(A, two_pi);
    return std::polar(1.0, z.theta) * (2.0 * p.a * p.g) / (z.r * complex(p.a, -1.0)) *
           std::conj(mode / denom);
}

/// Phi(z) = g/(1 - e^{2 pi A}) e^{iA(ln r + i(theta - 2 pi J))}; w^* = Phi'.
inline complex complex_potential(const PolarPoint& z, const SpiralParams& p) {
    const SpectralConstant A = spectral_constant(p.a);
    const complex mode = detail::spiral_mode(z, A, p.a, p.theta0);
    return p.g / (1.0 - exp_A(A, two_pi)) * mode;
}

/// v(z, t) = t^mu w(z / t^mu).
inline complex self_similar_velocity(complex z, double t, const SpiralParams& p) {
    if (!(t > 0.0)) {
        throw InvalidArgumentError("self_similar_velocity: t must be positive");
    }
    const double scale = std::pow(t, p.mu);
    const complex zeta = z / scale;
    if (zeta == complex(0.0, 0.0)) {
        throw OriginError("self_similar_velocity: spiral center");
    }
    return scale * profile_velocity(PolarPoint::from_complex(zeta), p);
}

// ---------------------------------------------------------------------------
// Strip frame, C_a route

/// w~_1 = mu (C_a sin 2ax + cos 2ax) e^{2ay}, w~_2 = mu (sin 2ax - C_a cos 2ax) e^{2ay};
/// returned as w~_1 + i w~_2.
inline complex strip_velocity(const StripPoint& z, double a, double mu) {
    const double c = resonance_constant(a);
    const double s2 = std::sin(2.0 * a * z.x);
    const double c2 = std::cos(2.0 * a * z.x);
    const double amp = mu * std::exp(2.0 * a * z.y);
    return {amp * (c * s2 + c2), amp * (s2 - c * c2)};
}

/// Phi~(z) = (mu/2a) (e^{-4a pi/(1+a^2)} - e^{-4a^2 pi i/(1+a^2)}) / sin(4a^2 pi/(1+a^2)) e^{-2aiz}.
inline complex strip_potential(const StripPoint& z, double a, double mu) {
    const double s = std::sin(resonance_angle(a));
    if (std::abs(s) < tolerance::resonance) {
        throw ResonantParameterError("strip potential undefined: a^2 is in {1/3, 1, 3}");
    }
    const complex num = std::exp(-4.0 * pi * a / (1.0 + a * a)) - std::polar(1.0, -resonance_angle(a));
    return mu / (2.0 * a) * (num / s) * std::exp(complex(0.0, -2.0 * a) * z.to_complex());
}

/// Explicit h^1 = w~^* + w~ o P_+ valid when (a, mu, g) satisfy the matching condition.
inline complex h_function(const StripPoint& z, double a, double mu) {
    const double ratio = pressure_ratio(a);
    const double s2 = std::sin(2.0 * a * z.x);
    const double c2 = std::cos(2.0 * a * z.x);
    const double amp = mu * std::exp(2.0 * a * z.y);
    return {amp * (ratio * s2 + 2.0 * c2), amp * (ratio * c2 - 2.0 * s2)};
}

// ---------------------------------------------------------------------------
// Parameter matching

struct MatchingSolution {
    double mu;
    double g;
};

/// (a^2 + 1 - 2mu + 2a mu i) + 2a^2 g coth(pi A); zero iff the matching condition holds.
inline complex matching_residual(double a, double mu, double g) {
    const complex c = coth_pi_A(spectral_constant(a));
    return complex(a * a + 1.0 - 2.0 * mu, 2.0 * a * mu) + 2.0 * a * a * g * c;
}

/// 2ag sin(4 pi a^2/(1+a^2)) - mu (2cos(4 pi a^2/(1+a^2)) - e^{-4 pi a/(1+a^2)} - e^{4 pi a/(1+a^2)}).
inline double pressure_matching_residual(double a, double mu, double g) {
    const double ang = resonance_angle(a);
    const double e = 4.0 * pi * a / (1.0 + a * a);
    return 2.0 * a * g * std::sin(ang) - mu * (2.0 * std::cos(ang) - 2.0 * std::cosh(e));
}

/// Solves the real and imaginary parts of the matching condition for (mu, g).
/// The real part alone is velocity matching, the imaginary part pressure matching.
inline MatchingSolution solve_matching(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidArgumentError("solve_matching: a must be positive");
    }
    const complex c = coth_pi_A(spectral_constant(a));
    // [ -2   2a^2 Re c ] [mu]   [ -(a^2 + 1) ]
    // [ 2a   2a^2 Im c ] [g ] = [     0      ]
    const double m00 = -2.0, m01 = 2.0 * a * a * c.real();
    const double m10 = 2.0 * a, m11 = 2.0 * a * a * c.imag();
    const double det = m00 * m11 - m01 * m10;
    const double scale = (std::abs(m00) + std::abs(m01)) * (std::abs(m10) + std::abs(m11));
    if (std::abs(det) < tolerance::singular * scale) {
        throw SingularSystemError("solve_matching: 2x2 system is singular");
    }
    const double rhs0 = -(a * a + 1.0);
    return {rhs0 * m11 / det, -m10 * rhs0 / det};
}

}  // namespace spiralsheet

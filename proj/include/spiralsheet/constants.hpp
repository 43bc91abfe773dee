#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "spiralsheet/errors.hpp"

namespace spiralsheet {

using complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

namespace tolerance {
/// Relative guard used to decide that a point sits exactly on a sheet or line.
inline constexpr double on_sheet = 1e-12;
/// Normalized (strip-frame) distance below which field evaluation refuses to run.
inline constexpr double field_exclusion = 1e-9;
/// |sin(4 pi a^2/(1+a^2))| below this is treated as resonant.
inline constexpr double resonance = 1e-10;
/// Relative determinant / rank threshold for the matching solvers.
inline constexpr double singular = 1e-13;
}  // namespace tolerance

/// A = -2ai/(a+i), stored through its rationalized components.
struct SpectralConstant {
    double re;  ///< -2a/(1+a^2)
    double im;  ///< -2a^2/(1+a^2)

    complex value() const { return {re, im}; }
};

inline SpectralConstant spectral_constant(double a) {
    const double s = 1.0 + a * a;
    return {-2.0 * a / s, -2.0 * a * a / s};
}

/// exp(t * A) for real t, assembled from the components of A.
inline complex exp_A(const SpectralConstant& A, double t) {
    return std::polar(std::exp(t * A.re), t * A.im);
}

/// D_a = e^{2 pi Re A} + e^{-2 pi Re A} - 2 cos(2 pi Im A); strictly positive for a > 0.
inline double d_a(const SpectralConstant& A) {
    return 2.0 * std::cosh(two_pi * A.re) - 2.0 * std::cos(two_pi * A.im);
}

inline complex sinh_pi_A(const SpectralConstant& A) {
    return 0.5 * (exp_A(A, pi) - exp_A(A, -pi));
}

inline complex cosh_pi_A(const SpectralConstant& A) {
    return 0.5 * (exp_A(A, pi) + exp_A(A, -pi));
}

/// coth(pi A) in the rationalized form
/// (e^{2 pi ReA} - e^{-2 pi ReA} - 2i sin(2 pi ImA)) / D_a.
inline complex coth_pi_A(const SpectralConstant& A) {
    const double den = d_a(A);
    return {2.0 * std::sinh(two_pi * A.re) / den, -2.0 * std::sin(two_pi * A.im) / den};
}

/// e^{2 pi A} / (1 - e^{2 pi A}), the common prefactor of the strip coefficients.
inline complex resolvent_factor(const SpectralConstant& A) {
    const complex e = exp_A(A, two_pi);
    return e / (1.0 - e);
}

/// Angle 4 pi a^2/(1+a^2) = -2 pi Im A that appears in the single-spiral closed forms.
inline double resonance_angle(double a) {
    return 4.0 * pi * a * a / (1.0 + a * a);
}

inline bool is_resonant(double a) {
    return std::abs(std::sin(resonance_angle(a))) < tolerance::resonance;
}

/// C_a = (cos(4a^2 pi/(1+a^2)) - e^{-4 a pi/(1+a^2)}) / sin(4a^2 pi/(1+a^2)).
inline double resonance_constant(double a) {
    const double s = std::sin(resonance_angle(a));
    if (std::abs(s) < tolerance::resonance) {
        throw ResonantParameterError("C_a undefined: a^2 is in {1/3, 1, 3}");
    }
    return (std::cos(resonance_angle(a)) - std::exp(-4.0 * pi * a / (1.0 + a * a))) / s;
}

/// (2cos(4a^2 pi/(1+a^2)) - e^{-4a pi/(1+a^2)} - e^{4a pi/(1+a^2)}) / sin(4a^2 pi/(1+a^2)),
/// the prefactor shared by the pressure matching identity and the explicit h.
inline double pressure_ratio(double a) {
    const double s = std::sin(resonance_angle(a));
    if (std::abs(s) < tolerance::resonance) {
        throw ResonantParameterError("pressure ratio undefined: a^2 is in {1/3, 1, 3}");
    }
    const double e = 4.0 * pi * a / (1.0 + a * a);
    return (2.0 * std::cos(resonance_angle(a)) - 2.0 * std::cosh(e)) / s;
}

}  // namespace spiralsheet

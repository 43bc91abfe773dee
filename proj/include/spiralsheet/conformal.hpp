#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <span>

#include "spiralsheet/constants.hpp"
#include "spiralsheet/geometry.hpp"

namespace spiralsheet {

/// Which part of the closed strip a point belongs to. The right edge is Re z = 0,
/// the left edge Re z = -2 pi a/(1+a^2); both are mapped onto the spiral.
enum class StripBoundary { none, left, right };

struct StripPoint {
    double x = 0.0;
    double y = 0.0;
    StripBoundary boundary = StripBoundary::none;

    complex to_complex() const { return {x, y}; }

    static StripPoint from_complex(complex z) { return {z.real(), z.imag(), StripBoundary::none}; }
};

/// Strip S = { -2 pi a/(1+a^2) < Re z < 0 } and the shift of the periodicity relation.
struct StripGeometry {
    double a;
    double width;
    complex period_shift;

    explicit StripGeometry(double a_)
        : a(a_),
          width(two_pi * a_ / (1.0 + a_ * a_)),
          period_shift(-two_pi * a_ / (1.0 + a_ * a_), two_pi / (1.0 + a_ * a_)) {}

    double left() const { return -width; }
    double axis() const { return -0.5 * width; }
    /// Vertical period 2 pi/(1+a^2); one full turn of the spiral.
    double turn() const { return period_shift.imag(); }
    /// Re z of the line l_m = f^{-1}(Sigma_m); l_0 is the right edge, theta = 2 pi gives the left one.
    double line_x(double theta_m) const { return -a * theta_m / (1.0 + a * a); }
};

// ---------------------------------------------------------------------------
// The map f(z) = e^{(1 - ai) z} and its inverse

inline complex map_to_exterior(complex z, double a) {
    return std::exp(complex(1.0, -a) * z);
}

inline complex map_to_exterior(const StripPoint& z, double a) {
    return map_to_exterior(z.to_complex(), a);
}

/// f'(z) = (1 - ai) f(z).
inline complex map_derivative(complex z, double a) {
    return complex(1.0, -a) * map_to_exterior(z, a);
}

/// f^{-1}(r e^{i theta}); the result is interior to S for every representative theta.
inline StripPoint map_to_strip(const PolarPoint& z, double a) {
    if (!(z.r > 0.0)) {
        throw OriginError("f^{-1} is undefined at the origin");
    }
    const Winding w = winding(z.r, z.theta, a);
    const double s = 1.0 + a * a;
    const double turn_angle = z.theta - two_pi * static_cast<double>(w.j - 1);
    return {(w.margin - two_pi * a) / s, (turn_angle + a * std::log(z.r)) / s, StripBoundary::none};
}

inline StripPoint map_to_strip(complex z, double a) {
    if (z == complex(0.0, 0.0)) {
        throw OriginError("f^{-1} is undefined at the origin");
    }
    return map_to_strip(PolarPoint::from_complex(z), a);
}

/// Spiral-frame velocity pushed into the strip: w~ = w(f(z)) conj(f'(z)).
inline complex velocity_to_strip(complex w, complex z_strip, double a) {
    return w * std::conj(map_derivative(z_strip, a));
}

inline complex velocity_from_strip(complex w_strip, complex z_strip, double a) {
    return w_strip / std::conj(map_derivative(z_strip, a));
}

// ---------------------------------------------------------------------------
// Reflection-shift maps P_+ and P_-

/// P_{+/-}(z) = -conj(z) - 2 a pi/(1+a^2) +/- 2 pi i/(1+a^2).
inline StripPoint reflect_shift(const StripPoint& z, double a, int sign) {
    const StripGeometry geo(a);
    const double dy = sign >= 0 ? geo.turn() : -geo.turn();
    return {-z.x - geo.width, z.y + dy, StripBoundary::none};
}

/// The n-fold iterate of P_{sign}; the even part is applied through the closed form
/// P^{2k}(z) = z +/- 4 pi k i/(1+a^2), so the count never accumulates rounding.
inline StripPoint reflect_shift_iterate(const StripPoint& z, double a, int sign, int count) {
    if (count < 0) {
        throw InvalidArgumentError("reflect_shift_iterate: negative count");
    }
    const StripGeometry geo(a);
    const double dy = (sign >= 0 ? 1.0 : -1.0) * geo.turn() * static_cast<double>(count - count % 2);
    StripPoint out{z.x, z.y + dy, StripBoundary::none};
    if (count % 2 == 1) {
        out = reflect_shift(out, a, sign);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classification

enum class StripRegion { interior, left_boundary, right_boundary, outside, on_line };

struct StripMembership {
    StripRegion region;
    /// Index m of the cut line l_m for `on_line`, otherwise -1.
    int line = -1;
};

namespace detail {

/// Tolerance in Re z matching the on-sheet guard of `winding` after mapping through f.
inline double strip_guard(complex z, double a) {
    const double x = z.real();
    const double y = z.imag();
    return tolerance::on_sheet * (1.0 + std::abs(x + a * y) + a * std::abs(y - a * x)) / (1.0 + a * a);
}

}  // namespace detail

/// Classifies z against the strip edges and, when given, the interior lines l_1..l_{M-1}
/// built from `thetas` (thetas[0] = 0 is the right edge itself).
inline StripMembership strip_membership(complex z, double a, std::span<const double> thetas = {}) {
    const StripGeometry geo(a);
    const double x = z.real();
    const double guard = detail::strip_guard(z, a);
    if (std::abs(x) < guard) {
        return {StripRegion::right_boundary, 0};
    }
    if (std::abs(x - geo.left()) < guard) {
        return {StripRegion::left_boundary, static_cast<int>(thetas.empty() ? 1 : thetas.size())};
    }
    if (x > 0.0 || x < geo.left()) {
        return {StripRegion::outside, -1};
    }
    for (std::size_t m = 1; m < thetas.size(); ++m) {
        if (std::abs(x - geo.line_x(thetas[m])) < guard) {
            return {StripRegion::on_line, static_cast<int>(m)};
        }
    }
    return {StripRegion::interior, -1};
}

/// 1_{S_{<l}}(z): the open slab left of l_l.
inline bool left_of_line(double x, double a, double theta_l) {
    return x < -a * theta_l / (1.0 + a * a);
}

}  // namespace spiralsheet

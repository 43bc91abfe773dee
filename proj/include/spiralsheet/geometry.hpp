#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spiralsheet/constants.hpp"
#include "spiralsheet/errors.hpp"

namespace spiralsheet {

/// Constants of one logarithmic spiral sheet Z(theta, t) = t^mu e^{a(theta - theta0)} e^{i theta}
/// carrying circulation g t^{2mu-1} e^{2a(theta - theta0)}.
struct SpiralParams {
    double a = 1.0;
    double mu = 0.0;
    double g = 0.0;
    double theta0 = 0.0;

    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw InvalidArgumentError("spiral tightness a must be a finite positive number");
        }
        if (!std::isfinite(mu) || !std::isfinite(g) || !std::isfinite(theta0)) {
            throw InvalidArgumentError("spiral parameters must be finite");
        }
    }
};

/// M >= 1 concentric spirals sharing a and mu, with base angles 0 = theta_0 < ... < 2 pi.
class SpiralFamily {
public:
    SpiralFamily(double a, double mu, std::vector<double> thetas, std::vector<double> gs)
        : a_(a), mu_(mu), thetas_(std::move(thetas)), gs_(std::move(gs)) {
        if (!(a_ > 0.0) || !std::isfinite(a_)) {
            throw InvalidArgumentError("family: a must be a finite positive number");
        }
        if (thetas_.empty()) {
            throw InvalidArgumentError("family: at least one spiral is required");
        }
        if (thetas_.size() != gs_.size()) {
            throw InvalidArgumentError("family: thetas and gs must have equal length");
        }
        if (thetas_.front() != 0.0) {
            throw InvalidArgumentError("family: thetas[0] must be 0");
        }
        for (std::size_t m = 1; m < thetas_.size(); ++m) {
            if (!(thetas_[m] > thetas_[m - 1])) {
                throw InvalidArgumentError("family: thetas must be strictly increasing");
            }
        }
        if (!(thetas_.back() < two_pi)) {
            throw InvalidArgumentError("family: thetas must lie below 2 pi");
        }
    }

    /// Uniformly distributed angles 2 pi m / M with a common strength.
    static SpiralFamily uniform(double a, double mu, std::size_t count, double g) {
        std::vector<double> thetas(count);
        for (std::size_t m = 0; m < count; ++m) {
            thetas[m] = two_pi * static_cast<double>(m) / static_cast<double>(count);
        }
        return SpiralFamily(a, mu, std::move(thetas), std::vector<double>(count, g));
    }

    static SpiralFamily single(const SpiralParams& p) {
        return SpiralFamily(p.a, p.mu, {0.0}, {p.g});
    }

    double a() const noexcept { return a_; }
    double mu() const noexcept { return mu_; }
    std::size_t size() const noexcept { return thetas_.size(); }
    std::span<const double> thetas() const noexcept { return thetas_; }
    std::span<const double> gs() const noexcept { return gs_; }
    double theta(std::size_t m) const { return m == thetas_.size() ? two_pi : thetas_.at(m); }
    double g(std::size_t m) const { return gs_.at(m); }

    SpiralParams member(std::size_t m) const { return {a_, mu_, gs_.at(m), thetas_.at(m)}; }

    SpiralFamily with_strengths(double mu, std::vector<double> gs) const {
        return SpiralFamily(a_, mu, thetas_, std::move(gs));
    }

private:
    double a_;
    double mu_;
    std::vector<double> thetas_;
    std::vector<double> gs_;
};

/// A point r e^{i theta} of the plane. The angle is an arbitrary real representative.
struct PolarPoint {
    double r = 1.0;
    double theta = 0.0;

    complex to_complex() const { return std::polar(r, theta); }

    static PolarPoint from_complex(complex z) { return {std::abs(z), std::arg(z)}; }
};

using WindingNumber = std::int64_t;

/// Real dot product of two plane vectors stored as complex numbers.
inline double dot(complex u, complex v) {
    return u.real() * v.real() + u.imag() * v.imag();
}

// ---------------------------------------------------------------------------
// Spiral curve and its densities

inline complex spiral_point(double theta, double t, const SpiralParams& p) {
    return std::pow(t, p.mu) * std::exp(p.a * (theta - p.theta0)) * std::polar(1.0, theta);
}

struct TangentNormal {
    complex tangent;
    complex normal;
};

/// Unit tangent (a+i)e^{i theta}/sqrt(1+a^2) and normal (1-ia)e^{i theta}/sqrt(1+a^2) = -i tangent.
inline TangentNormal tangent_normal(double theta, double a) {
    const double s = std::sqrt(1.0 + a * a);
    const complex e = std::polar(1.0, theta);
    return {complex(a, 1.0) * e / s, complex(1.0, -a) * e / s};
}

inline double circulation(double theta, double t, const SpiralParams& p) {
    return p.g * std::pow(t, 2.0 * p.mu - 1.0) * std::exp(2.0 * p.a * (theta - p.theta0));
}

/// gamma = 2ag t^{mu-1} e^{a(theta - theta0)} / sqrt(1+a^2), the tangential jump per unit length.
inline double sheet_density(double theta, double t, const SpiralParams& p) {
    return 2.0 * p.a * p.g * std::pow(t, p.mu - 1.0) * std::exp(p.a * (theta - p.theta0)) /
           std::sqrt(1.0 + p.a * p.a);
}

// ---------------------------------------------------------------------------
// Winding numbers

/// The minimal j with a(2 pi j - theta) + ln r > 0 together with that positive margin.
/// The margin lies in (0, 2 pi a]; it is (1+a^2) times the distance of f^{-1}(z) from the
/// left strip edge.
struct Winding {
    WindingNumber j;
    double margin;
};

namespace detail {

inline double winding_expr(WindingNumber j, double log_r, double theta, double a) {
    return a * (two_pi * static_cast<double>(j) - theta) + log_r;
}

inline double on_sheet_guard(double log_r, double theta, double a) {
    return tolerance::on_sheet * (1.0 + std::abs(log_r) + a * std::abs(theta));
}

}  // namespace detail

/// Winding data for r e^{i theta}; `theta` may already include a spiral offset.
inline Winding winding(double r, double theta, double a) {
    if (!(r > 0.0)) {
        throw OriginError("winding number undefined at r <= 0");
    }
    const double log_r = std::log(r);
    auto j = static_cast<WindingNumber>(std::floor((theta - log_r / a) / two_pi)) + 1;
    // floor can land one off next to the boundary; settle against the defining inequality.
    while (detail::winding_expr(j, log_r, theta, a) <= 0.0) {
        ++j;
    }
    while (detail::winding_expr(j - 1, log_r, theta, a) > 0.0) {
        --j;
    }
    const double above = detail::winding_expr(j, log_r, theta, a);
    const double below = detail::winding_expr(j - 1, log_r, theta, a);
    const double guard = detail::on_sheet_guard(log_r, theta, a);
    if (above < guard || -below < guard) {
        throw OnSpiralError("point lies on the spiral sheet");
    }
    return {j, above};
}

/// J(r, theta) = min{ j : a(2 pi j - theta) + ln r > 0 }.
inline WindingNumber winding_number(double r, double theta, double a) {
    return winding(r, theta, a).j;
}

/// J(r, theta, k) = min{ j : a(2 pi j + theta_k - theta) + ln r > 0 }.
inline WindingNumber winding_number_offset(double r, double theta, double a, double theta_k) {
    return winding(r, theta - theta_k, a).j;
}

}  // namespace spiralsheet

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spiralsheet/conformal.hpp"
#include "spiralsheet/constants.hpp"
#include "spiralsheet/geometry.hpp"
#include "spiralsheet/single_spiral.hpp"

namespace spiralsheet {

// ---------------------------------------------------------------------------
// Coupling matrix and the discrete matching system

struct CouplingMatrix {
    /// A_{mk} = e^{A(theta_k - theta_m)} { e^{-pi A} k > m ; cosh(pi A) k = m ; e^{pi A} k < m }.
    Eigen::MatrixXcd entries;
    complex sinh_pi_a;

    /// B_{mk} = A_{mk} / sinh(pi A).
    Eigen::MatrixXcd normalized() const { return entries / sinh_pi_a; }
    Eigen::Index size() const { return entries.rows(); }
};

inline CouplingMatrix coupling_matrix(double a, std::span<const double> thetas) {
    const SpectralConstant A = spectral_constant(a);
    const auto n = static_cast<Eigen::Index>(thetas.size());
    CouplingMatrix out{Eigen::MatrixXcd(n, n), sinh_pi_A(A)};
    const complex diag = cosh_pi_A(A);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double dtheta = thetas[static_cast<std::size_t>(k)] - thetas[static_cast<std::size_t>(m)];
            if (k == m) {
                out.entries(m, k) = diag;
            } else {
                out.entries(m, k) = exp_A(A, dtheta + (k > m ? -pi : pi));
            }
        }
    }
    return out;
}

/// Row residuals sum_k B_{mk} g_k + (a^2 + 1 - 2mu + 2a mu i)/(2a^2).
inline std::vector<complex> family_matching_residual(double a, std::span<const double> thetas, double mu,
                                                     std::span<const double> gs) {
    if (thetas.size() != gs.size()) {
        throw InvalidArgumentError("family_matching_residual: thetas and gs differ in length");
    }
    const Eigen::MatrixXcd b = coupling_matrix(a, thetas).normalized();
    const complex rhs = complex(a * a + 1.0 - 2.0 * mu, 2.0 * a * mu) / (2.0 * a * a);
    std::vector<complex> out(thetas.size());
    for (Eigen::Index m = 0; m < b.rows(); ++m) {
        complex acc = rhs;
        for (Eigen::Index k = 0; k < b.cols(); ++k) {
            acc += b(m, k) * gs[static_cast<std::size_t>(k)];
        }
        out[static_cast<std::size_t>(m)] = acc;
    }
    return out;
}

inline double residual_norm(std::span<const complex> residuals) {
    double acc = 0.0;
    for (const complex& r : residuals) {
        acc += std::norm(r);
    }
    return std::sqrt(acc);
}

struct FamilyMatchingSolution {
    double mu;
    std::vector<double> gs;
    /// Euclidean norm of the 2M real residuals left by the least-squares solution.
    double residual_norm;
};

/// Least-squares solution of the 2M real equations of the discrete system in the
/// M + 1 unknowns (g_0, ..., g_{M-1}, mu). Exact solvability is reported, never assumed.
inline FamilyMatchingSolution solve_family_matching(double a, std::span<const double> thetas) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidArgumentError("solve_family_matching: a must be positive");
    }
    const Eigen::MatrixXcd b = coupling_matrix(a, thetas).normalized();
    const Eigen::Index n = b.rows();
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(2 * n, n + 1);
    Eigen::VectorXd rhs(2 * n);
    const double inv = 1.0 / (2.0 * a * a);
    for (Eigen::Index m = 0; m < n; ++m) {
        for (Eigen::Index k = 0; k < n; ++k) {
            lhs(m, k) = b(m, k).real();
            lhs(n + m, k) = b(m, k).imag();
        }
        // (a^2 + 1 - 2mu)/(2a^2) and 2a mu/(2a^2) moved to the left-hand side
        lhs(m, n) = -2.0 * inv;
        lhs(n + m, n) = 2.0 * a * inv;
        rhs(m) = -(a * a + 1.0) * inv;
        rhs(n + m) = 0.0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(lhs);
    qr.setThreshold(tolerance::singular * 10.0);
    if (qr.rank() < n + 1) {
        throw SingularSystemError("solve_family_matching: system is rank deficient");
    }
    const Eigen::VectorXd sol = qr.solve(rhs);
    FamilyMatchingSolution out{sol(n), std::vector<double>(static_cast<std::size_t>(n)), 0.0};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.gs[static_cast<std::size_t>(k)] = sol(k);
    }
    const auto res = family_matching_residual(a, thetas, out.mu, out.gs);
    out.residual_norm = residual_norm(res);
    return out;
}

// ---------------------------------------------------------------------------
// Strip ansatz

struct StripCoefficients {
    std::vector<double> a1;
    std::vector<double> a2;
    double d_a;
};

/// A_{1,m} = 2a g_m (e^{2 pi ReA} - cos 2 pi ImA)/D_a, A_{2,m} = 2a g_m sin(2 pi ImA)/D_a.
inline StripCoefficients strip_coefficients(double a, std::span<const double> gs) {
    const SpectralConstant A = spectral_constant(a);
    const double den = d_a(A);
    const double c1 = (std::exp(two_pi * A.re) - std::cos(two_pi * A.im)) / den;
    const double c2 = std::sin(two_pi * A.im) / den;
    StripCoefficients out{std::vector<double>(gs.size()), std::vector<double>(gs.size()), den};
    for (std::size_t m = 0; m < gs.size(); ++m) {
        out.a1[m] = 2.0 * a * gs[m] * c1;
        out.a2[m] = 2.0 * a * gs[m] * c2;
    }
    return out;
}

enum class Side { left, right };

namespace detail {

/// Evaluates w~_1 + i w~_2 of the ansatz with the slab offsets
/// theta_l + 2 pi (1_{S<l} - 1_{S<0}) supplied explicitly.
inline complex strip_ansatz(double x, double y, double a, const StripCoefficients& c,
                            std::span<const double> offsets) {
    const SpectralConstant A = spectral_constant(a);
    double w1 = 0.0;
    double w2 = 0.0;
    for (std::size_t l = 0; l < offsets.size(); ++l) {
        const double amp = std::exp(2.0 * a * y + offsets[l] * A.re);
        const double phase = 2.0 * a * x - offsets[l] * A.im;
        const double s = std::sin(phase);
        const double co = std::cos(phase);
        w1 += amp * (c.a1[l] * s + c.a2[l] * co);
        w2 += amp * (c.a2[l] * s - c.a1[l] * co);
    }
    return {w1, w2};
}

inline std::vector<double> slab_offsets(double x, const SpiralFamily& fam) {
    std::vector<double> off(fam.size());
    for (std::size_t l = 0; l < fam.size(); ++l) {
        // 1_{S<0} = 1 everywhere inside the strip
        const double ind = left_of_line(x, fam.a(), fam.theta(l)) ? 1.0 : 0.0;
        off[l] = fam.theta(l) + two_pi * (ind - 1.0);
    }
    return off;
}

/// Offsets of the one-sided limits on l_m: theta_l - 2 pi 1_{m<l} from the left,
/// theta_l - 2 pi 1_{m<=l} from the right.
inline std::vector<double> line_offsets(std::size_t m, Side side, const SpiralFamily& fam) {
    std::vector<double> off(fam.size());
    for (std::size_t l = 0; l < fam.size(); ++l) {
        const bool shifted = side == Side::left ? m < l : m <= l;
        off[l] = fam.theta(l) - (shifted ? two_pi : 0.0);
    }
    return off;
}

inline void require_open_slab(complex z, const SpiralFamily& fam) {
    const StripMembership where = strip_membership(z, fam.a(), fam.thetas());
    switch (where.region) {
        case StripRegion::interior:
            return;
        case StripRegion::outside:
            throw InvalidArgumentError("strip point lies outside the strip");
        default:
            throw OnCutLineError("strip point lies on cut line l_" + std::to_string(where.line), where.line);
    }
}

}  // namespace detail

inline complex family_strip_velocity(const StripPoint& z, const SpiralFamily& fam) {
    detail::require_open_slab(z.to_complex(), fam);
    const StripCoefficients c = strip_coefficients(fam.a(), fam.gs());
    return detail::strip_ansatz(z.x, z.y, fam.a(), c, detail::slab_offsets(z.x, fam));
}

/// One-sided limit of the ansatz on the line l_m, 0 <= m <= M (l_0 and l_M are the strip edges).
inline complex family_strip_velocity_on_line(std::size_t m, double y, Side side, const SpiralFamily& fam) {
    if (m > fam.size()) {
        throw InvalidArgumentError("family_strip_velocity_on_line: line index out of range");
    }
    if ((m == 0 && side == Side::right) || (m == fam.size() && side == Side::left)) {
        throw InvalidArgumentError("family_strip_velocity_on_line: side lies outside the strip");
    }
    const StripGeometry geo(fam.a());
    const StripCoefficients c = strip_coefficients(fam.a(), fam.gs());
    return detail::strip_ansatz(geo.line_x(fam.theta(m)), y, fam.a(), c, detail::line_offsets(m, side, fam));
}

/// Phi~(z) = sum_l g_l e^{2 pi A}/(1 - e^{2 pi A}) e^{-2aiz} e^{theta_l A} e^{2 pi (1_{S<l} - 1_{S<0}) A}.
inline complex family_strip_potential(const StripPoint& z, const SpiralFamily& fam) {
    detail::require_open_slab(z.to_complex(), fam);
    const SpectralConstant A = spectral_constant(fam.a());
    const complex pref = resolvent_factor(A) * std::exp(complex(0.0, -2.0 * fam.a()) * z.to_complex());
    const auto off = detail::slab_offsets(z.x, fam);
    complex acc = 0.0;
    for (std::size_t l = 0; l < fam.size(); ++l) {
        acc += fam.g(l) * exp_A(A, off[l]);
    }
    return pref * acc;
}

// ---------------------------------------------------------------------------
// Boundary conditions B1-B6

/// Left-hand minus right-hand side of each boundary condition, evaluated through the
/// one-sided limits of the ansatz and normalized by the natural scale e^{2a(y - theta_m/(1+a^2))}.
/// Line conditions (B3, B4, B6) are stored line-major: index (m - 1) * ny + iy.
struct BoundaryResiduals {
    std::vector<double> b1;
    std::vector<double> b2;
    std::vector<double> b3;
    std::vector<double> b4;
    std::vector<double> b5;
    std::vector<double> b6;
};

inline BoundaryResiduals boundary_residuals(const SpiralFamily& fam, double mu, std::span<const double> y_grid) {
    const double a = fam.a();
    const SpectralConstant A = spectral_constant(a);
    const StripGeometry geo(a);
    const std::size_t count = fam.size();
    BoundaryResiduals out;
    for (double y : y_grid) {
        const double scale = std::exp(2.0 * a * y);
        // B1: tangential velocity matching on l_0 seen from inside the strip
        const complex on_right_edge = family_strip_velocity_on_line(0, y, Side::left, fam);
        out.b1.push_back(mu - on_right_edge.real() / scale);
        // B2: the same on l_M
        const complex on_left_edge = family_strip_velocity_on_line(count, y, Side::right, fam);
        out.b2.push_back(mu * std::exp(two_pi * A.re) - on_left_edge.real() / scale);
        // B5: jump of w~_2 across the glued edges
        const complex shifted = family_strip_velocity_on_line(count, y + geo.turn(), Side::right, fam);
        out.b5.push_back(2.0 * a * fam.g(0) - (shifted.imag() - on_right_edge.imag()) / scale);
    }
    for (std::size_t m = 1; m < count; ++m) {
        for (double y : y_grid) {
            const double scale = std::exp(2.0 * a * y + fam.theta(m) * A.re);
            const complex left = family_strip_velocity_on_line(m, y, Side::left, fam);
            const complex right = family_strip_velocity_on_line(m, y, Side::right, fam);
            out.b3.push_back((left.real() - right.real()) / scale);
            out.b4.push_back(mu - left.real() / scale);
            out.b6.push_back(2.0 * a * fam.g(m) - (right.imag() - left.imag()) / scale);
        }
    }
    return out;
}

inline BoundaryResiduals boundary_residuals(const SpiralFamily& fam, std::span<const double> y_grid) {
    return boundary_residuals(fam, fam.mu(), y_grid);
}

// ---------------------------------------------------------------------------
// Spiral frame

/// Phi(z) = sum_l g_l e^{theta_l A}/(1 - e^{2 pi A}) e^{iA(ln r + i(theta - 2 pi J(r, theta, l)))}.
inline complex family_potential(const PolarPoint& z, const SpiralFamily& fam) {
    const SpectralConstant A = spectral_constant(fam.a());
    const complex denom = 1.0 - exp_A(A, two_pi);
    complex acc = 0.0;
    for (std::size_t l = 0; l < fam.size(); ++l) {
        acc += fam.g(l) * detail::spiral_mode(z, A, fam.a(), fam.theta(l), static_cast<int>(l));
    }
    return acc / denom;
}

/// w(z) = e^{i theta} sum_l 2a g_l/(r(a-i)) ( r^{2a/(a+i)} e^{A(theta_l - theta)} e^{2 pi J(r,theta,l) A}/(1 - e^{2 pi A}) )^*.
inline complex family_velocity(const PolarPoint& z, const SpiralFamily& fam) {
    const double a = fam.a();
    const SpectralConstant A = spectral_constant(a);
    const complex denom = 1.0 - exp_A(A, two_pi);
    complex acc = 0.0;
    for (std::size_t l = 0; l < fam.size(); ++l) {
        const complex mode = detail::spiral_mode(z, A, a, fam.theta(l), static_cast<int>(l));
        acc += 2.0 * a * fam.g(l) / (z.r * complex(a, -1.0)) * std::conj(mode / denom);
    }
    return std::polar(1.0, z.theta) * acc;
}

}  // namespace spiralsheet

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spiralsheet/conformal.hpp"
#include "spiralsheet/constants.hpp"
#include "spiralsheet/family.hpp"
#include "spiralsheet/geometry.hpp"
#include "spiralsheet/single_spiral.hpp"

namespace spiralsheet {

using ComplexField = std::function<complex(complex)>;

// ---------------------------------------------------------------------------
// Residual reports

struct ResidualReport {
    std::string name;
    double max_abs = 0.0;
    double rms = 0.0;
    std::size_t n_samples = 0;
    double tolerance = 0.0;
    bool pass = true;
    /// Set only for entries that were skipped or carry a remark.
    std::string note;
};

/// Collects |residual| samples and turns them into a report with pass <=> max_abs <= tolerance.
class ResidualAccumulator {
public:
    void add(double residual) {
        const double v = std::abs(residual);
        // NaN must never pass
        max_ = std::isnan(v) ? std::numeric_limits<double>::infinity() : std::max(max_, v);
        sum_sq_ += v * v;
        ++count_;
    }

    std::size_t count() const noexcept { return count_; }
    double max_abs() const noexcept { return max_; }

    ResidualReport report(std::string name, double tol) const {
        ResidualReport r;
        r.name = std::move(name);
        r.max_abs = max_;
        r.rms = count_ == 0 ? 0.0 : std::sqrt(sum_sq_ / static_cast<double>(count_));
        r.n_samples = count_;
        r.tolerance = tol;
        r.pass = max_ <= tol;
        return r;
    }

private:
    double max_ = 0.0;
    double sum_sq_ = 0.0;
    std::size_t count_ = 0;
};

inline ResidualReport skipped_report(std::string name, double tol, std::string reason) {
    ResidualReport r;
    r.name = std::move(name);
    r.tolerance = tol;
    r.note = "skipped: " + std::move(reason);
    return r;
}

// ---------------------------------------------------------------------------
// Finite differences

struct FdDerivative {
    complex derivative;  ///< estimate of df/dz
    double cr_defect;    ///< |df/dz-bar|, zero for holomorphic fields
};

/// Central differences along x and y with one Richardson step (h, h/2).
inline FdDerivative fd_derivative(const ComplexField& field, complex z, double h) {
    auto central = [&](complex dir, double step) {
        return (field(z + step * dir) - field(z - step * dir)) / (2.0 * step);
    };
    auto richardson = [&](complex dir) { return (4.0 * central(dir, 0.5 * h) - central(dir, h)) / 3.0; };
    const complex fx = richardson(complex(1.0, 0.0));
    const complex fy = richardson(complex(0.0, 1.0));
    const complex dz = 0.5 * (fx - complex(0.0, 1.0) * fy);
    const complex dzbar = 0.5 * (fx + complex(0.0, 1.0) * fy);
    return {dz, std::abs(dzbar)};
}

/// Step used for spiral-frame fields: 1e-6 |z|.
inline double fd_step_spiral(complex z) {
    return 1e-6 * std::abs(z);
}

/// Step used for strip-frame fields.
inline double fd_step_strip(complex z) {
    return 1e-6 * (1.0 + std::abs(z));
}

// ---------------------------------------------------------------------------
// Sided limits and jump probes

/// Polynomial extrapolation to eps = 0 through (eps_i, v_i) (Neville).
inline complex extrapolate_to_zero(std::span<const double> eps, std::span<const complex> values) {
    std::vector<complex> p(values.begin(), values.end());
    const std::size_t n = p.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double e0 = eps[i];
            const double e1 = eps[i + level];
            p[i] = (e0 * p[i + 1] - e1 * p[i]) / (e0 - e1);
        }
    }
    return p.front();
}

struct JumpProbe {
    double theta = 0.0;
    int spiral_index = 0;
    std::vector<double> epsilons;
    double extrapolated_normal_jump = 0.0;
    double extrapolated_tangential_jump = 0.0;
    double expected_density = 0.0;
    /// n . (w - mu Z) using the extrapolated limit from each side.
    double velocity_matching_right = 0.0;
    double velocity_matching_left = 0.0;
    /// Convergence order of the raw tangential jump sequence in eps.
    double observed_order = std::numeric_limits<double>::quiet_NaN();
};

/// Offsets { 1e-3, 1e-4, 1e-5 }; they are multiplied by the local spiral scale |Z(theta)|.
inline std::vector<double> default_epsilons() {
    return {1e-3, 1e-4, 1e-5};
}

namespace detail {

/// Normalized distance of z from Sigma_{theta_k}: distance of f^{-1} from the strip edges.
inline double sheet_distance(complex z, double a, double theta_k) {
    const PolarPoint p = PolarPoint::from_complex(z);
    const Winding w = winding(p.r, p.theta - theta_k, a);
    return std::min(w.margin, two_pi * a - w.margin) / (1.0 + a * a);
}

}  // namespace detail

/// Probes the velocity `field` across the spiral with base angle `thetas[index]` at the
/// parameter value theta. R is the side reached along +n = -i tau.
inline JumpProbe jump_probe(double theta, const ComplexField& field, double a, double mu,
                            std::span<const double> thetas, std::span<const double> gs, std::size_t index,
                            std::span<const double> epsilons) {
    if (epsilons.size() < 2) {
        throw InvalidArgumentError("jump_probe: need at least two offsets");
    }
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > tolerance::field_exclusion) || (i > 0 && !(epsilons[i] < epsilons[i - 1]))) {
            throw InvalidArgumentError("jump_probe: offsets must be strictly decreasing and above the exclusion zone");
        }
    }
    const SpiralParams member{a, mu, gs[index], thetas[index]};
    const complex z0 = spiral_point(theta, 1.0, member);
    const TangentNormal frame = tangent_normal(theta, a);
    const double scale = std::abs(z0);

    std::vector<complex> right(epsilons.size());
    std::vector<complex> left(epsilons.size());
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        const complex offset = epsilons[i] * scale * frame.normal;
        for (const complex& zp : {z0 + offset, z0 - offset}) {
            const double own = detail::sheet_distance(zp, a, thetas[index]);
            for (std::size_t l = 0; l < thetas.size(); ++l) {
                if (l == index) {
                    continue;
                }
                const double other = detail::sheet_distance(zp, a, thetas[l]);
                if (other <= own || other < tolerance::field_exclusion) {
                    throw ProbeTooCloseError("jump_probe: offset point is closer to spiral " + std::to_string(l));
                }
            }
        }
        right[i] = field(z0 + offset);
        left[i] = field(z0 - offset);
    }
    const complex w_right = extrapolate_to_zero(epsilons, right);
    const complex w_left = extrapolate_to_zero(epsilons, left);

    JumpProbe out;
    out.theta = theta;
    out.spiral_index = static_cast<int>(index);
    out.epsilons.assign(epsilons.begin(), epsilons.end());
    out.extrapolated_normal_jump = dot(w_right - w_left, frame.normal);
    out.extrapolated_tangential_jump = dot(w_right - w_left, frame.tangent);
    out.expected_density = sheet_density(theta, 1.0, member);
    out.velocity_matching_right = dot(w_right - mu * z0, frame.normal);
    out.velocity_matching_left = dot(w_left - mu * z0, frame.normal);
    if (epsilons.size() >= 3) {
        const double j0 = dot(right[0] - left[0], frame.tangent);
        const double j1 = dot(right[1] - left[1], frame.tangent);
        const double j2 = dot(right[2] - left[2], frame.tangent);
        out.observed_order = std::log(std::abs(j0 - j1) / std::abs(j1 - j2)) / std::log(epsilons[0] / epsilons[1]);
    }
    return out;
}

inline JumpProbe jump_probe(double theta, const SpiralParams& p, std::span<const double> epsilons) {
    const double thetas[] = {p.theta0};
    const double gs[] = {p.g};
    const ComplexField field = [p](complex z) { return profile_velocity(PolarPoint::from_complex(z), p); };
    return jump_probe(theta, field, p.a, p.mu, thetas, gs, 0, epsilons);
}

inline JumpProbe jump_probe(double theta, const SpiralFamily& fam, std::size_t index,
                            std::span<const double> epsilons) {
    const ComplexField field = [&fam](complex z) { return family_velocity(PolarPoint::from_complex(z), fam); };
    return jump_probe(theta, field, fam.a(), fam.mu(), fam.thetas(), fam.gs(), index, epsilons);
}

/// Velocity reconstructed from the C_a strip solution: w(z) = w~(f^{-1} z) / conj(f'(f^{-1} z)).
/// It depends on (a, mu) only; its jump equals gamma(g) exactly when g satisfies pressure matching.
inline ComplexField strip_route_velocity(double a, double mu) {
    return [a, mu](complex z) {
        const StripPoint zs = map_to_strip(z, a);
        return velocity_from_strip(strip_velocity(zs, a, mu), zs.to_complex(), a);
    };
}

// ---------------------------------------------------------------------------
// Telescoping series of the uniqueness argument

struct TelescopingResult {
    std::vector<double> terms;             ///< Im h(P_-^k z), k = 0..K
    std::vector<double> partial_from_zero; ///< sum_{k=0}^{n} terms, n = 0..K
    std::vector<double> partial_from_one;  ///< sum_{k=1}^{n} terms, n = 1..K (entry 0 is 0)
    double reference;                      ///< w~_2(z) from the closed form
};

inline TelescopingResult telescoping_check(const StripPoint& z, double a, double mu, int count) {
    if (count < 1 || count > 200) {
        throw InvalidArgumentError("telescoping_check: K must lie in [1, 200]");
    }
    TelescopingResult out;
    out.reference = strip_velocity(z, a, mu).imag();
    double from_zero = 0.0;
    double from_one = 0.0;
    for (int k = 0; k <= count; ++k) {
        const double term = h_function(reflect_shift_iterate(z, a, -1, k), a, mu).imag();
        out.terms.push_back(term);
        from_zero += term;
        if (k >= 1) {
            from_one += term;
        }
        out.partial_from_zero.push_back(from_zero);
        out.partial_from_one.push_back(from_one);
    }
    return out;
}

/// Geometric-mean ratio per term sqrt(|t_{k+2} / t_k|); consecutive terms sit at mirrored
/// abscissae, so only every second term shares the same profile factor.
inline std::vector<double> telescoping_term_ratios(std::span<const double> terms, std::size_t first) {
    std::vector<double> out;
    for (std::size_t k = first; k + 2 < terms.size(); ++k) {
        if (terms[k] == 0.0 || !std::isnormal(terms[k + 2])) {
            continue;
        }
        out.push_back(std::sqrt(std::abs(terms[k + 2] / terms[k])));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Non-uniqueness demonstration

/// p(z) = sum_k coeffs[k-1] z^k, so p(0) = 0.
inline complex perturbation_polynomial(std::span<const complex> coeffs, complex z) {
    complex acc = 0.0;
    complex power = z;
    for (const complex& c : coeffs) {
        acc += c * power;
        power *= z;
    }
    return acc;
}

struct PerturbationReports {
    /// max |jump(w + p^*) - jump(w)| / |Z| over normal and tangential jumps; tolerance 1e-8.
    ResidualReport jump_invariance;
    /// max |n . (w + p^* - mu Z)| / |Z| on the sheet; tolerance 1e-8, expected to fail unless p = 0.
    ResidualReport perturbed_matching;
};

inline PerturbationReports perturbation_demo(std::span<const double> probe_thetas, const SpiralParams& p,
                                             std::span<const complex> coeffs) {
    const std::vector<complex> poly(coeffs.begin(), coeffs.end());
    const ComplexField base = [p](complex z) { return profile_velocity(PolarPoint::from_complex(z), p); };
    const ComplexField perturbed = [p, poly](complex z) {
        return profile_velocity(PolarPoint::from_complex(z), p) + std::conj(perturbation_polynomial(poly, z));
    };
    const double thetas[] = {p.theta0};
    const double gs[] = {p.g};
    const auto eps = default_epsilons();
    ResidualAccumulator jumps;
    ResidualAccumulator matching;
    for (double theta : probe_thetas) {
        const JumpProbe ref = jump_probe(theta, base, p.a, p.mu, thetas, gs, 0, eps);
        const JumpProbe pert = jump_probe(theta, perturbed, p.a, p.mu, thetas, gs, 0, eps);
        const double scale = std::exp(p.a * (theta - p.theta0));
        jumps.add((pert.extrapolated_normal_jump - ref.extrapolated_normal_jump) / scale);
        jumps.add((pert.extrapolated_tangential_jump - ref.extrapolated_tangential_jump) / scale);
        matching.add(pert.velocity_matching_right / scale);
        matching.add(pert.velocity_matching_left / scale);
    }
    return {jumps.report("perturbation_jump_invariance", 1e-8),
            matching.report("perturbed_velocity_matching", 1e-8)};
}

// ---------------------------------------------------------------------------
// Decay at the spiral center

/// |w(z)|/|z| along the ray arg z = ray_theta. Each grid radius is widened to one winding
/// period r e^{-2 pi a s}, s in [0, 1), and the largest ratio in that window is kept.
/// Passes when no window exceeds twice the first one.
inline ResidualReport decay_check(const ComplexField& velocity, double a, double ray_theta,
                                  std::span<const double> r_grid, std::size_t window = 16,
                                  std::string name = "decay") {
    std::vector<double> ratios;
    std::size_t skipped = 0;
    for (double r : r_grid) {
        double best = 0.0;
        for (std::size_t k = 0; k < window; ++k) {
            const double radius = r * std::exp(-two_pi * a * static_cast<double>(k) / static_cast<double>(window));
            const complex z = std::polar(radius, ray_theta);
            try {
                best = std::max(best, std::abs(velocity(z)) / radius);
            } catch (const OnSpiralError&) {
                ++skipped;
            }
        }
        ratios.push_back(best);
    }
    ResidualAccumulator acc;
    for (double v : ratios) {
        acc.add(v);
    }
    ResidualReport rep = acc.report(std::move(name), ratios.empty() ? 0.0 : 2.0 * ratios.front());
    if (skipped > 0) {
        rep.note = std::to_string(skipped) + " samples skipped on the sheet";
    }
    return rep;
}

/// |w~(x + iy)| e^{-ay} along decreasing y; max_abs is the largest step ratio v_{i+1}/v_i,
/// which must stay strictly below 1.
inline ResidualReport strip_decay_check(const ComplexField& strip_velocity_field, double a, double x,
                                        std::span<const double> y_grid, std::string name = "strip_decay") {
    std::vector<double> values;
    for (double y : y_grid) {
        values.push_back(std::abs(strip_velocity_field(complex(x, y))) * std::exp(-a * y));
    }
    ResidualAccumulator acc;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        acc.add(values[i] == 0.0 ? 0.0 : values[i + 1] / values[i]);
    }
    return acc.report(std::move(name), std::nextafter(1.0, 0.0));
}

}  // namespace spiralsheet

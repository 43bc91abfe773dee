#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spiralsheet/conformal.hpp"
#include "spiralsheet/family.hpp"
#include "spiralsheet/geometry.hpp"
#include "spiralsheet/single_spiral.hpp"
#include "spiralsheet/verify.hpp"

namespace spiralsheet {

struct SuiteOptions {
    std::uint64_t seed = 1;
    std::size_t points = 200;        ///< random field points per check
    std::size_t probes = 50;         ///< jump probe angles per spiral
    std::size_t y_grid = 200;        ///< B-condition grid
    int telescoping_terms = 100;
};

namespace detail {

/// Random point of R_F that keeps a normalized distance of at least `margin` strip widths
/// from every sheet. Returned in polar form with a random angle representative.
inline PolarPoint random_exterior_point(std::mt19937_64& rng, const SpiralFamily& fam, double margin = 1e-3) {
    const StripGeometry geo(fam.a());
    std::uniform_real_distribution<double> ux(geo.left(), 0.0);
    std::uniform_real_distribution<double> uy(-3.0, 3.0);
    std::uniform_int_distribution<int> shift(-2, 2);
    for (;;) {
        const double x = ux(rng);
        const double y = uy(rng);
        const int k = shift(rng);
        bool clear = std::abs(x) > margin * geo.width && std::abs(x - geo.left()) > margin * geo.width;
        for (std::size_t m = 1; m < fam.size() && clear; ++m) {
            clear = std::abs(x - geo.line_x(fam.theta(m))) > margin * geo.width;
        }
        if (!clear) {
            continue;
        }
        const complex z = map_to_exterior(complex(x, y), fam.a());
        PolarPoint p = PolarPoint::from_complex(z);
        p.theta += two_pi * k;
        return p;
    }
}

inline std::vector<double> probe_angles(std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        // [-2 pi, 4 pi] without the endpoints, irrational stride keeps away from special angles
        out[i] = -two_pi + 3.0 * two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    }
    return out;
}

}  // namespace detail

/// Round trips of f in both directions on random points; relative in the spiral frame.
inline ResidualReport conformal_roundtrip_report(double a, std::mt19937_64& rng, std::size_t count) {
    const StripGeometry geo(a);
    std::uniform_real_distribution<double> ux(geo.left(), 0.0);
    std::uniform_real_distribution<double> uy(-5.0, 5.0);
    std::uniform_real_distribution<double> ulog(-8.0, 8.0);
    std::uniform_real_distribution<double> uang(-3.0 * pi, 3.0 * pi);
    ResidualAccumulator acc;
    std::size_t done = 0;
    while (done < count) {
        const complex w(ux(rng), uy(rng));
        const complex z = std::polar(std::exp(ulog(rng)), uang(rng));
        try {
            acc.add(std::abs(map_to_strip(map_to_exterior(w, a), a).to_complex() - w));
            acc.add(std::abs(map_to_exterior(map_to_strip(z, a), a) - z) / std::abs(z));
            ++done;
        } catch (const OnSpiralError&) {
            // measure-zero draw
        }
    }
    return acc.report("conformal_roundtrip", 1e-12);
}

/// J(r, theta, k) - J(r, theta) + 1 against 1_{S<k}(f^{-1} z); exact integer equality.
inline ResidualReport winding_lemma_report(const SpiralFamily& fam, std::mt19937_64& rng, std::size_t count) {
    ResidualAccumulator acc;
    for (std::size_t i = 0; i < count; ++i) {
        const PolarPoint p = detail::random_exterior_point(rng, fam, 1e-9);
        const StripPoint s = map_to_strip(p, fam.a());
        const WindingNumber base = winding_number(p.r, p.theta, fam.a());
        for (std::size_t k = 0; k < fam.size(); ++k) {
            const WindingNumber jk = winding_number_offset(p.r, p.theta, fam.a(), fam.theta(k));
            const WindingNumber ind = left_of_line(s.x, fam.a(), fam.theta(k)) ? 1 : 0;
            acc.add(static_cast<double>(jk - base + 1 - ind));
        }
    }
    return acc.report("winding_lemma", 0.0);
}

/// Phi' from finite differences against w^*.
inline ResidualReport potential_velocity_report(const SpiralFamily& fam, std::mt19937_64& rng, std::size_t count) {
    ResidualAccumulator acc;
    for (std::size_t i = 0; i < count; ++i) {
        const PolarPoint p = detail::random_exterior_point(rng, fam);
        const complex z = p.to_complex();
        // keep the representative fixed along the stencil so the test also covers large angles
        const double base_theta = p.theta;
        const ComplexField phi = [&fam, base_theta](complex q) {
            PolarPoint pq = PolarPoint::from_complex(q);
            pq.theta += two_pi * std::round((base_theta - pq.theta) / two_pi);
            return family_potential(pq, fam);
        };
        const FdDerivative d = fd_derivative(phi, z, fd_step_spiral(z));
        const complex w = family_velocity(p, fam);
        acc.add(std::abs(d.derivative - std::conj(w)) / std::abs(w));
    }
    return acc.report("potential_velocity_consistency", 1e-6);
}

struct JumpReports {
    ResidualReport normal;
    ResidualReport tangential;
    ResidualReport matching;
};

inline JumpReports jump_reports(const SpiralFamily& fam, const ComplexField& field, std::size_t probes,
                                const std::string& prefix) {
    ResidualAccumulator normal;
    ResidualAccumulator tangential;
    ResidualAccumulator matching;
    const auto eps = default_epsilons();
    for (std::size_t m = 0; m < fam.size(); ++m) {
        for (double theta : detail::probe_angles(probes)) {
            const JumpProbe probe =
                jump_probe(theta, field, fam.a(), fam.mu(), fam.thetas(), fam.gs(), m, eps);
            const double gamma = std::abs(probe.expected_density);
            const double scale = gamma > 0.0 ? gamma : 1.0;
            normal.add(probe.extrapolated_normal_jump / scale);
            tangential.add((probe.extrapolated_tangential_jump - probe.expected_density) / scale);
            const double z_scale = std::abs(spiral_point(theta, 1.0, fam.member(m)));
            matching.add(probe.velocity_matching_right / z_scale);
            matching.add(probe.velocity_matching_left / z_scale);
        }
    }
    return {normal.report(prefix + "normal_jump", 1e-6), tangential.report(prefix + "tangential_jump", 1e-6),
            matching.report(prefix + "velocity_matching", 1e-6)};
}

/// Phi~(f^{-1} z) against Phi(z), through the family coefficients.
inline ResidualReport frame_equivalence_report(const SpiralFamily& fam, std::mt19937_64& rng, std::size_t count) {
    ResidualAccumulator acc;
    for (std::size_t i = 0; i < count; ++i) {
        const PolarPoint p = detail::random_exterior_point(rng, fam);
        const complex phi = family_potential(p, fam);
        const complex phi_strip = family_strip_potential(map_to_strip(p, fam.a()), fam);
        acc.add(std::abs(phi_strip - phi) / (1.0 + std::abs(phi)));
    }
    return acc.report("frame_equivalence", 1e-10);
}

/// The same through the single-spiral C_a closed form; needs the matching condition.
inline ResidualReport frame_equivalence_ca_report(const SpiralParams& p, std::mt19937_64& rng, std::size_t count) {
    if (is_resonant(p.a)) {
        return skipped_report("frame_equivalence_ca", 1e-10, "resonant a, C_a route undefined");
    }
    const SpiralFamily fam = SpiralFamily::single(p);
    ResidualAccumulator acc;
    for (std::size_t i = 0; i < count; ++i) {
        const PolarPoint z = detail::random_exterior_point(rng, fam);
        const complex phi = complex_potential(z, p);
        const complex phi_strip = strip_potential(map_to_strip(z, p.a), p.a, p.mu);
        acc.add(std::abs(phi_strip - phi) / (1.0 + std::abs(phi)));
    }
    return acc.report("frame_equivalence_ca", 1e-10);
}

inline std::vector<ResidualReport> boundary_reports(const SpiralFamily& fam, std::size_t ny) {
    std::vector<double> ys(ny);
    for (std::size_t i = 0; i < ny; ++i) {
        ys[i] = -5.0 + 10.0 * static_cast<double>(i) / static_cast<double>(ny > 1 ? ny - 1 : 1);
    }
    const BoundaryResiduals res = boundary_residuals(fam, ys);
    const std::vector<double>* all[] = {&res.b1, &res.b2, &res.b3, &res.b4, &res.b5, &res.b6};
    std::vector<ResidualReport> out;
    for (std::size_t i = 0; i < 6; ++i) {
        ResidualAccumulator acc;
        for (double v : *all[i]) {
            acc.add(v);
        }
        ResidualReport rep = acc.report("B" + std::to_string(i + 1), 1e-10);
        if (all[i]->empty()) {
            rep.note = "no interior lines for M = 1";
        }
        out.push_back(std::move(rep));
    }
    return out;
}

struct TelescopingReports {
    ResidualReport convergence;
    ResidualReport ratio;
};

inline TelescopingReports telescoping_reports(const SpiralParams& p, std::mt19937_64& rng, std::size_t count,
                                              int terms) {
    if (is_resonant(p.a)) {
        return {skipped_report("telescoping", 1e-10, "resonant a, C_a route undefined"),
                skipped_report("telescoping_ratio", 0.01, "resonant a, C_a route undefined")};
    }
    const StripGeometry geo(p.a);
    std::uniform_real_distribution<double> ux(geo.left(), 0.0);
    std::uniform_real_distribution<double> uy(-1.0, 1.0);
    const double expected = std::exp(-4.0 * pi * p.a / (1.0 + p.a * p.a));
    ResidualAccumulator conv;
    ResidualAccumulator ratio;
    for (std::size_t i = 0; i < count; ++i) {
        const StripPoint z{ux(rng), uy(rng), StripBoundary::none};
        const TelescopingResult t = telescoping_check(z, p.a, p.mu, terms);
        conv.add((t.partial_from_one.back() - t.reference) / (1.0 + std::abs(t.reference)));
        for (double r : telescoping_term_ratios(t.terms, 5)) {
            ratio.add(r / expected - 1.0);
        }
    }
    return {conv.report("telescoping", 1e-10), ratio.report("telescoping_ratio", 0.01)};
}

/// Decay on 8 rays; the residual per ray is the largest window ratio over the first one.
inline ResidualReport decay_report(const SpiralFamily& fam) {
    const std::vector<double> radii = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    const ComplexField field = [&fam](complex z) { return family_velocity(PolarPoint::from_complex(z), fam); };
    ResidualAccumulator acc;
    for (int ray = 0; ray < 8; ++ray) {
        const double angle = two_pi * (ray + 0.25) / 8.0;
        const ResidualReport rep = decay_check(field, fam.a(), angle, radii);
        const double first = rep.tolerance / 2.0;
        acc.add(first > 0.0 ? rep.max_abs / first : 0.0);
    }
    return acc.report("decay", 2.0);
}

inline ResidualReport strip_decay_report(const SpiralFamily& fam) {
    const StripGeometry geo(fam.a());
    // midway between l_0 and the next line
    const double x = 0.5 * geo.line_x(fam.theta(1));
    std::vector<double> ys;
    for (int i = 0; i < 30; ++i) {
        ys.push_back(-10.5 - i);
    }
    const ComplexField field = [&fam](complex z) { return family_strip_velocity(StripPoint::from_complex(z), fam); };
    return strip_decay_check(field, fam.a(), x, ys);
}

/// The full residual suite for a family (M = 1 is the single Prandtl spiral).
inline std::vector<ResidualReport> run_default_suite(const SpiralFamily& fam, const SuiteOptions& opt = {}) {
    std::mt19937_64 rng(opt.seed);
    std::vector<ResidualReport> out;
    const double a = fam.a();

    out.push_back(conformal_roundtrip_report(a, rng, opt.points));
    out.push_back(winding_lemma_report(fam, rng, opt.points));
    out.push_back(potential_velocity_report(fam, rng, opt.points));

    const ComplexField closed_form = [&fam](complex z) { return family_velocity(PolarPoint::from_complex(z), fam); };
    const JumpReports jumps = jump_reports(fam, closed_form, opt.probes, "");
    out.push_back(jumps.normal);
    out.push_back(jumps.tangential);
    out.push_back(jumps.matching);

    {
        ResidualAccumulator acc;
        for (const complex& r : family_matching_residual(a, fam.thetas(), fam.mu(), fam.gs())) {
            acc.add(std::abs(r));
        }
        out.push_back(acc.report("family_matching_residual", 1e-10));
    }

    if (fam.size() == 1) {
        const SpiralParams p = fam.member(0);
        ResidualAccumulator eq;
        eq.add(std::abs(matching_residual(a, p.mu, p.g)));
        out.push_back(eq.report("matching_residual", 1e-12));
        ResidualAccumulator pm;
        pm.add(pressure_matching_residual(a, p.mu, p.g));
        out.push_back(pm.report("pressure_matching", 1e-12));

        if (is_resonant(a)) {
            out.push_back(skipped_report("strip_route_tangential_jump", 1e-6, "resonant a, C_a route undefined"));
        } else {
            const JumpReports strip_jumps = jump_reports(fam, strip_route_velocity(a, p.mu), opt.probes, "strip_route_");
            out.push_back(strip_jumps.tangential);
        }
        out.push_back(frame_equivalence_ca_report(p, rng, opt.points));
        const TelescopingReports tele = telescoping_reports(p, rng, 10, opt.telescoping_terms);
        out.push_back(tele.convergence);
        out.push_back(tele.ratio);
    }

    out.push_back(frame_equivalence_report(fam, rng, opt.points));
    for (ResidualReport& r : boundary_reports(fam, opt.y_grid)) {
        out.push_back(std::move(r));
    }
    out.push_back(decay_report(fam));
    out.push_back(strip_decay_report(fam));
    return out;
}

}  // namespace spiralsheet

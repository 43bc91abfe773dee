#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spiralsheet/single_spiral.hpp"
#include "spiralsheet/verify.hpp"

using namespace spiralsheet;

namespace {

const double kAs[] = {0.4, 0.8, 2.0, 5.0};

SpiralParams solved(double a) {
    const MatchingSolution s = solve_matching(a);
    return {a, s.mu, s.g, 0.0};
}

/// Random point of R at least 1e-3 strip widths away from the sheet.
PolarPoint random_exterior(oracle::Rng& rng, double a) {
    const StripGeometry geo(a);
    const complex w(rng.uniform(geo.left() * 0.999, geo.left() * 0.001), rng.uniform(-3.0, 3.0));
    PolarPoint p = PolarPoint::from_complex(map_to_exterior(w, a));
    p.theta += two_pi * rng.integer(-2, 2);
    return p;
}

StripPoint random_strip(oracle::Rng& rng, double a, double ylim = 2.0) {
    const StripGeometry geo(a);
    return {rng.uniform(geo.left() * 0.999, geo.left() * 0.001), rng.uniform(-ylim, ylim), StripBoundary::none};
}

}  // namespace

TEST(Spectral, UnitTightness) {
    const SpectralConstant A = spectral_constant(1.0);
    EXPECT_NEAR(A.re, -1.0, 1e-15);
    EXPECT_NEAR(A.im, -1.0, 1e-15);
}

TEST(Spectral, MatchesComplexDivision) {
    oracle::Rng rng(201);
    for (int i = 0; i < 500; ++i) {
        const double a = rng.log_uniform(0.01, 100.0);
        const SpectralConstant A = spectral_constant(a);
        const complex direct = oracle::spectral(a);
        EXPECT_NEAR(A.re, direct.real(), 1e-15);
        EXPECT_NEAR(A.im, direct.imag(), 1e-15);
        EXPECT_LT(A.re, 0.0);
        EXPECT_NEAR(std::abs(exp_A(A, two_pi)), std::exp(-4.0 * pi * a / (1.0 + a * a)), 1e-15);
        EXPECT_LT(std::abs(exp_A(A, two_pi)), 1.0);
    }
}

TEST(Spectral, HyperbolicsMatchComplexLibrary) {
    oracle::Rng rng(203);
    for (int i = 0; i < 300; ++i) {
        const double a = rng.log_uniform(0.05, 50.0);
        const SpectralConstant A = spectral_constant(a);
        const complex pa = pi * oracle::spectral(a);
        EXPECT_NEAR(std::abs(sinh_pi_A(A) - std::sinh(pa)), 0.0, 1e-13 * std::abs(std::sinh(pa)));
        EXPECT_NEAR(std::abs(cosh_pi_A(A) - std::cosh(pa)), 0.0, 1e-13 * std::abs(std::cosh(pa)));
        EXPECT_NEAR(std::abs(coth_pi_A(A) - oracle::coth(pa)), 0.0, 1e-12 * std::abs(oracle::coth(pa)));
    }
}

TEST(Resonance, ConstantDefinedOffResonance) {
    EXPECT_TRUE(is_resonant(1.0));
    EXPECT_TRUE(is_resonant(std::sqrt(3.0)));
    EXPECT_TRUE(is_resonant(1.0 / std::sqrt(3.0)));
    EXPECT_FALSE(is_resonant(0.8));
    EXPECT_THROW(resonance_constant(1.0), ResonantParameterError);
    const double a = 0.8;
    const double ang = 4.0 * a * a * pi / (1.0 + a * a);
    EXPECT_NEAR(resonance_constant(a), (std::cos(ang) - std::exp(-4.0 * a * pi / (1.0 + a * a))) / std::sin(ang), 1e-14);
}

TEST(ProfileVelocity, MatchesDirectFormula) {
    oracle::Rng rng(211);
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        for (int i = 0; i < 300; ++i) {
            const PolarPoint z = random_exterior(rng, a);
            const complex expected = oracle::profile_velocity(z.r, z.theta, a, p.g);
            EXPECT_NEAR(std::abs(profile_velocity(z, p) - expected), 0.0, 1e-11 * std::abs(expected));
        }
    }
}

TEST(ProfileVelocity, RepresentativeIndependent) {
    oracle::Rng rng(213);
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        for (int i = 0; i < 300; ++i) {
            const PolarPoint z = random_exterior(rng, a);
            const complex w0 = profile_velocity(z, p);
            const complex w1 = profile_velocity(PolarPoint{z.r, z.theta + two_pi}, p);
            EXPECT_NEAR(std::abs(w0 - w1), 0.0, 1e-12 * std::abs(w0));
            const complex phi0 = complex_potential(z, p);
            const complex phi1 = complex_potential(PolarPoint{z.r, z.theta - two_pi}, p);
            EXPECT_NEAR(std::abs(phi0 - phi1), 0.0, 1e-12 * std::abs(phi0));
        }
    }
}

TEST(ProfileVelocity, BoundedRatioOnRays) {
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        double hi = 0.0;
        double lo = 1e300;
        for (double r = 1e-1; r > 1e-10; r *= 0.7) {
            const double ratio = std::abs(profile_velocity(PolarPoint{r, 0.37}, p)) / r;
            hi = std::max(hi, ratio);
            lo = std::min(lo, ratio);
        }
        EXPECT_LT(hi, 1e3 * std::max(lo, 1e-300));
        EXPECT_TRUE(std::isfinite(hi));
    }
}

TEST(ProfileVelocity, ConjugateIsPotentialDerivative) {
    oracle::Rng rng(217);
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        for (int i = 0; i < 200; ++i) {
            const PolarPoint z = random_exterior(rng, a);
            const ComplexField phi = [&](complex q) { return complex_potential(PolarPoint::from_complex(q), p); };
            const complex zc = z.to_complex();
            const FdDerivative d = fd_derivative(phi, zc, fd_step_spiral(zc));
            const complex w = profile_velocity(z, p);
            EXPECT_LT(std::abs(d.derivative - std::conj(w)) / std::abs(w), 1e-6);
            EXPECT_LT(d.cr_defect / std::abs(w), 1e-6);
        }
    }
}

TEST(ProfileVelocity, Errors) {
    const SpiralParams p = solved(0.8);
    EXPECT_THROW(profile_velocity(PolarPoint{0.0, 0.0}, p), OriginError);
    EXPECT_THROW(profile_velocity(PolarPoint{std::exp(0.8 * 1.2), 1.2}, p), OnSpiralError);
    // inside the exclusion zone but not on the sheet
    const double r = std::exp(0.8 * 1.2) * (1.0 + 1e-11);
    EXPECT_THROW(profile_velocity(PolarPoint{r, 1.2}, p), OnSpiralError);
}

TEST(ComplexPotential, MatchesDirectFormulaAndVanishesWithoutCirculation) {
    oracle::Rng rng(219);
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        for (int i = 0; i < 200; ++i) {
            const PolarPoint z = random_exterior(rng, a);
            const complex expected = oracle::complex_potential(z.r, z.theta, a, p.g);
            EXPECT_NEAR(std::abs(complex_potential(z, p) - expected), 0.0, 1e-11 * std::abs(expected));
            EXPECT_EQ(complex_potential(z, {a, p.mu, 0.0, 0.0}), complex(0.0, 0.0));
        }
    }
}

TEST(SelfSimilar, Scaling) {
    const SpiralParams p{0.8, 0.35, 1.2, 0.0};
    const complex z = std::polar(0.7, 0.4);
    const complex w = profile_velocity(PolarPoint::from_complex(z), p);
    EXPECT_NEAR(std::abs(self_similar_velocity(z, 1.0, p) - w), 0.0, 1e-15);
    for (double t : {0.5, 2.0, 7.0}) {
        const double s = std::pow(t, p.mu);
        EXPECT_NEAR(std::abs(self_similar_velocity(s * z, t, p) - s * w), 0.0, 1e-13 * std::abs(s * w));
        SpiralParams steady = p;
        steady.mu = 0.0;
        EXPECT_NEAR(std::abs(self_similar_velocity(z, t, steady) - profile_velocity(PolarPoint::from_complex(z), steady)),
                    0.0, 1e-15);
    }
    EXPECT_THROW(self_similar_velocity(z, 0.0, p), InvalidArgumentError);
    EXPECT_THROW(self_similar_velocity(0.0, 1.0, p), OriginError);
}

TEST(StripVelocity, RightEdgeAndZeroExponent) {
    for (double a : kAs) {
        const double mu = 0.3;
        for (double y : {-2.0, 0.0, 1.5}) {
            EXPECT_NEAR(strip_velocity({0.0, y, StripBoundary::right}, a, mu).real(), mu * std::exp(2.0 * a * y), 1e-14);
            EXPECT_EQ(strip_velocity({-0.1, y, StripBoundary::none}, a, 0.0), complex(0.0, 0.0));
        }
    }
    EXPECT_THROW(strip_velocity({-0.1, 0.0, StripBoundary::none}, 1.0, 0.3), ResonantParameterError);
}

TEST(StripVelocity, PressureJumpAcrossGluedEdges) {
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        const StripGeometry geo(a);
        for (double y = -2.0; y <= 2.0; y += 0.5) {
            const double right = strip_velocity({0.0, y, StripBoundary::right}, a, p.mu).imag();
            const double left = strip_velocity({geo.left(), y + geo.turn(), StripBoundary::left}, a, p.mu).imag();
            const double expected = 2.0 * a * p.g * std::exp(2.0 * a * y);
            EXPECT_NEAR(left - right, expected, 1e-12 * std::abs(expected));
        }
    }
}

TEST(StripVelocity, AntiholomorphicAndHarmonic) {
    oracle::Rng rng(223);
    for (double a : kAs) {
        const double mu = solved(a).mu;
        const ComplexField conj_field = [&](complex q) { return std::conj(strip_velocity(StripPoint::from_complex(q), a, mu)); };
        for (int i = 0; i < 100; ++i) {
            const complex z = random_strip(rng, a).to_complex();
            const FdDerivative d = fd_derivative(conj_field, z, fd_step_strip(z));
            EXPECT_LT(d.cr_defect, 1e-6 * std::abs(d.derivative));
            const double h = 1e-4;
            auto u = [&](complex q) { return strip_velocity(StripPoint::from_complex(q), a, mu).real(); };
            const double lap = (u(z + h) + u(z - h) + u(z + complex(0, h)) + u(z - complex(0, h)) - 4.0 * u(z)) / (h * h);
            const double scale = 4.0 * a * a * std::abs(mu) * std::exp(2.0 * a * z.imag()) * (1.0 + std::abs(resonance_constant(a)));
            EXPECT_LT(std::abs(lap), 1e-5 * scale);
        }
    }
}

TEST(StripPotential, DerivativeAndFrameEquivalence) {
    oracle::Rng rng(227);
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        const ComplexField phi = [&](complex q) { return strip_potential(StripPoint::from_complex(q), a, p.mu); };
        for (int i = 0; i < 100; ++i) {
            const StripPoint z = random_strip(rng, a);
            const FdDerivative d = fd_derivative(phi, z.to_complex(), fd_step_strip(z.to_complex()));
            const complex w = strip_velocity(z, a, p.mu);
            EXPECT_LT(std::abs(d.derivative - std::conj(w)), 1e-6 * std::abs(w));
        }
        for (int i = 0; i < 200; ++i) {
            const PolarPoint z = random_exterior(rng, a);
            const complex reference = complex_potential(z, p);
            const complex strip = strip_potential(map_to_strip(z, a), a, p.mu);
            EXPECT_LT(std::abs(strip - reference), 1e-10 * (1.0 + std::abs(reference)));
        }
        EXPECT_EQ(strip_potential({-0.1, 0.0, StripBoundary::none}, a, 0.0), complex(0.0, 0.0));
    }
    EXPECT_THROW(strip_potential({-0.1, 0.0, StripBoundary::none}, 1.0, 0.3), ResonantParameterError);
}

TEST(StripVelocity, FrameTransport) {
    oracle::Rng rng(229);
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        for (int i = 0; i < 200; ++i) {
            const StripPoint w = random_strip(rng, a);
            const complex spiral = profile_velocity(PolarPoint::from_complex(map_to_exterior(w, a)), p);
            const complex pushed = velocity_to_strip(spiral, w.to_complex(), a);
            const complex direct = strip_velocity(w, a, p.mu);
            EXPECT_LT(std::abs(pushed - direct), 1e-10 * (1.0 + std::abs(direct)));
        }
    }
}

TEST(Matching, UnitTightness) {
    const MatchingSolution s = solve_matching(1.0);
    EXPECT_LT(std::abs(s.mu), 1e-12);
    EXPECT_NEAR(s.g, std::tanh(pi), 1e-12);
    EXPECT_NEAR(s.g, 0.9963, 1e-4);
}

TEST(Matching, AgreesWithIndependentSolve) {
    oracle::Rng rng(233);
    for (int i = 0; i < 300; ++i) {
        const double a = rng.log_uniform(0.1, 20.0);
        const MatchingSolution s = solve_matching(a);
        const auto [mu, g] = oracle::matching_2x2(a);
        EXPECT_NEAR(s.mu, mu, 1e-10 * (1.0 + std::abs(mu)));
        EXPECT_NEAR(s.g, g, 1e-10 * (1.0 + std::abs(g)));
    }
}

TEST(Matching, ResidualsVanish) {
    for (double a : {0.4, 0.8, 1.0, 2.0, 5.0, std::sqrt(3.0)}) {
        const MatchingSolution s = solve_matching(a);
        EXPECT_LT(std::abs(matching_residual(a, s.mu, s.g)), 1e-12);
        EXPECT_LT(std::abs(pressure_matching_residual(a, s.mu, s.g)), 1e-12);
        // direct substitution into the displayed pressure identity
        const double ang = 4.0 * pi * a * a / (1.0 + a * a);
        const double e = 4.0 * pi * a / (1.0 + a * a);
        EXPECT_NEAR(2.0 * a * s.g * std::sin(ang), s.mu * (2.0 * std::cos(ang) - std::exp(-e) - std::exp(e)), 1e-12);
    }
}

TEST(Matching, ReferenceValues) {
    const double table[][3] = {{0.4, -0.0401696, 3.89386}, {0.8, 0.00435739, 1.27340},
                               {2.0, 0.00960513, 0.629262}, {5.0, 0.213770, 0.438197}};
    for (const auto& row : table) {
        const MatchingSolution s = solve_matching(row[0]);
        EXPECT_NEAR(s.mu, row[1], 1e-6);
        EXPECT_NEAR(s.g, row[2], 1e-5 * row[2]);
    }
}

TEST(Matching, ResidualExamples) {
    oracle::Rng rng(239);
    for (int i = 0; i < 100; ++i) {
        const double a = rng.log_uniform(0.1, 10.0);
        const double mu = (a * a + 1.0) / 2.0;
        const complex r = matching_residual(a, mu, 0.0);
        EXPECT_NEAR(r.real(), 0.0, 1e-12 * (1.0 + a * a));
        EXPECT_NEAR(r.imag(), a * (a * a + 1.0), 1e-12 * (1.0 + a * a * a));
        const double g = rng.uniform(-2.0, 2.0);
        const double delta = rng.uniform(-0.5, 0.5);
        const complex diff = matching_residual(a, 0.1, g + delta) - matching_residual(a, 0.1, g);
        const complex expected = 2.0 * a * a * delta * oracle::coth(pi * oracle::spectral(a));
        EXPECT_NEAR(std::abs(diff - expected), 0.0, 1e-11 * (1.0 + std::abs(expected)));
    }
}

TEST(Matching, RejectsNonPositiveTightness) {
    EXPECT_THROW(solve_matching(0.0), InvalidArgumentError);
    EXPECT_THROW(solve_matching(-1.0), InvalidArgumentError);
}

TEST(HFunction, RightEdgeValue) {
    for (double a : kAs) {
        const SpiralParams p = solved(a);
        for (double y : {-1.0, 0.0, 0.8}) {
            const complex h = h_function({0.0, y, StripBoundary::right}, a, p.mu);
            const double e = std::exp(2.0 * a * y);
            const complex expected(2.0 * p.mu * e, 2.0 * a * p.g * e);
            EXPECT_NEAR(std::abs(h - expected), 0.0, 1e-12 * (1.0 + std::abs(expected)));
        }
    }
}

TEST(HFunction, HolomorphicAndReflectionIdentity) {
    oracle::Rng rng(241);
    for (double a : kAs) {
        const double mu = solved(a).mu;
        const ComplexField h = [&](complex q) { return h_function(StripPoint::from_complex(q), a, mu); };
        for (int i = 0; i < 100; ++i) {
            const StripPoint z = random_strip(rng, a);
            const FdDerivative d = fd_derivative(h, z.to_complex(), fd_step_strip(z.to_complex()));
            EXPECT_LT(d.cr_defect, 1e-6 * std::abs(d.derivative));
            const complex expected =
                std::conj(strip_velocity(z, a, mu)) + strip_velocity(reflect_shift(z, a, +1), a, mu);
            EXPECT_NEAR(std::abs(h_function(z, a, mu) - expected), 0.0, 1e-12 * (1.0 + std::abs(expected)));
        }
        EXPECT_EQ(h_function({-0.1, 0.2, StripBoundary::none}, a, 0.0), complex(0.0, 0.0));
    }
}

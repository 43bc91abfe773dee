#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "spiralsheet/conformal.hpp"

using namespace spiralsheet;

namespace {

const double kAs[] = {0.4, 0.8, 2.0, 5.0};

complex random_strip(oracle::Rng& rng, double a, double ylim = 5.0) {
    const StripGeometry geo(a);
    return {rng.uniform(geo.left() * (1.0 - 1e-6), -1e-6 * geo.width), rng.uniform(-ylim, ylim)};
}

}  // namespace

TEST(Geometry, WidthAndShift) {
    const StripGeometry geo(2.0);
    EXPECT_DOUBLE_EQ(geo.width, 4.0 * pi / 5.0);
    EXPECT_DOUBLE_EQ(geo.period_shift.real(), -4.0 * pi / 5.0);
    EXPECT_DOUBLE_EQ(geo.period_shift.imag(), 2.0 * pi / 5.0);
    EXPECT_DOUBLE_EQ(geo.line_x(two_pi), geo.left());
    EXPECT_DOUBLE_EQ(geo.line_x(0.0), 0.0);
}

TEST(MapToExterior, RightEdgeIsTheSpiral) {
    for (double a : kAs) {
        for (double y : {-3.0, 0.0, 1.0, 7.5}) {
            const complex z = map_to_exterior(complex(0.0, y), a);
            const complex expected = std::exp(a * y) * std::polar(1.0, y);
            EXPECT_NEAR(std::abs(z - expected), 0.0, 1e-13 * std::abs(expected));
        }
    }
}

TEST(MapToExterior, StripAxis) {
    for (double a : kAs) {
        const double s = 1.0 + a * a;
        const complex z = map_to_exterior(complex(-pi * a / s, 0.0), a);
        const complex expected = std::exp(-pi * a / s) * std::polar(1.0, pi * a * a / s);
        EXPECT_NEAR(std::abs(z - expected), 0.0, 1e-15);
    }
}

TEST(MapToExterior, VanishesDownTheStrip) {
    for (double a : kAs) {
        const StripGeometry geo(a);
        double prev = 1e300;
        for (double y = 0.0; y > -150.0; y -= 5.0) {
            double worst = 0.0;
            for (int i = 0; i <= 20; ++i) {
                worst = std::max(worst, std::abs(map_to_exterior(complex(geo.left() * i / 20.0, y), a)));
            }
            EXPECT_LT(worst, prev);
            prev = worst;
        }
        EXPECT_LT(prev, 1e-10);
    }
}

TEST(MapToStrip, RoundTripFromStrip) {
    oracle::Rng rng(101);
    for (double a : kAs) {
        for (int i = 0; i < 1000; ++i) {
            const complex w = random_strip(rng, a);
            const StripPoint back = map_to_strip(map_to_exterior(w, a), a);
            EXPECT_NEAR(std::abs(back.to_complex() - w), 0.0, 1e-12);
        }
    }
}

TEST(MapToStrip, RoundTripFromExterior) {
    oracle::Rng rng(103);
    for (double a : kAs) {
        for (int i = 0; i < 1000; ++i) {
            const complex z = std::polar(rng.log_uniform(1e-6, 1e6), rng.uniform(-pi, pi));
            const StripPoint w = map_to_strip(z, a);
            EXPECT_LT(w.x, 0.0);
            EXPECT_GT(w.x, StripGeometry(a).left());
            EXPECT_NEAR(std::abs(map_to_exterior(w, a) - z) / std::abs(z), 0.0, 1e-12);
        }
    }
}

TEST(MapToStrip, ImaginaryPartTendsToMinusInfinity) {
    for (double a : kAs) {
        double prev = 1e300;
        for (double r = 1e-1; r > 1e-40; r *= 1e-3) {
            const double y = map_to_strip(complex(r, 0.0) * std::polar(1.0, 0.3), a).y;
            EXPECT_LT(y, prev);
            prev = y;
        }
        EXPECT_LT(prev, -10.0);
    }
}

TEST(MapToStrip, RepresentativeIndependent) {
    oracle::Rng rng(107);
    for (double a : kAs) {
        for (int i = 0; i < 300; ++i) {
            const PolarPoint p{rng.log_uniform(1e-3, 1e3), rng.uniform(-10.0, 10.0)};
            const StripPoint s0 = map_to_strip(p, a);
            const StripPoint s1 = map_to_strip(PolarPoint{p.r, p.theta + two_pi}, a);
            EXPECT_NEAR(s0.x, s1.x, 1e-12 * (1.0 + std::abs(s0.x)));
            EXPECT_NEAR(s0.y, s1.y, 1e-12 * (1.0 + std::abs(s0.y)));
        }
    }
}

TEST(MapToStrip, Errors) {
    EXPECT_THROW(map_to_strip(complex(0.0, 0.0), 1.0), OriginError);
    EXPECT_THROW(map_to_strip(map_to_exterior(complex(0.0, 0.7), 1.3), 1.3), OnSpiralError);
}

TEST(MapToStrip, MatchesDisplayedFormula) {
    oracle::Rng rng(109);
    for (double a : kAs) {
        for (int i = 0; i < 200; ++i) {
            const double r = rng.log_uniform(1e-3, 1e3);
            const double theta = rng.uniform(-20.0, 20.0);
            const double j = static_cast<double>(oracle::winding_bisect(r, theta, a));
            const double s = 1.0 + a * a;
            const StripPoint w = map_to_strip(PolarPoint{r, theta}, a);
            EXPECT_NEAR(w.x, (std::log(r) - a * theta + 2.0 * a * pi * (j - 1.0)) / s, 1e-11);
            EXPECT_NEAR(w.y, (theta + a * std::log(r) - 2.0 * pi * (j - 1.0)) / s, 1e-11);
        }
    }
}

TEST(Conformality, JacobianIsASimilarity) {
    oracle::Rng rng(113);
    for (double a : kAs) {
        for (int i = 0; i < 200; ++i) {
            const complex z = random_strip(rng, a, 2.0);
            const double h = 1e-6;
            const complex fx = (map_to_exterior(z + h, a) - map_to_exterior(z - h, a)) / (2.0 * h);
            const complex fy = (map_to_exterior(z + complex(0.0, h), a) - map_to_exterior(z - complex(0.0, h), a)) /
                               (2.0 * h);
            const double scale = std::abs(fx);
            // [[ux, uy], [vx, vy]] with ux = vy and uy = -vx
            EXPECT_NEAR(fx.real(), fy.imag(), 1e-6 * scale);
            EXPECT_NEAR(fy.real(), -fx.imag(), 1e-6 * scale);
            EXPECT_NEAR(std::abs(fx - map_derivative(z, a)), 0.0, 1e-6 * scale);
        }
    }
}

TEST(Periodicity, RightEdgeAndShiftedEdgeCoincide) {
    for (double a : kAs) {
        const StripGeometry geo(a);
        for (double y = -4.0; y <= 4.0; y += 0.25) {
            const complex z(0.0, y);
            const complex fz = map_to_exterior(z, a);
            EXPECT_NEAR(std::abs(map_to_exterior(z + geo.period_shift, a) - fz), 0.0, 1e-12 * (1.0 + std::abs(fz)));
        }
    }
}

TEST(Lines, ImageLiesOnShiftedSpiral) {
    for (double a : kAs) {
        const StripGeometry geo(a);
        for (double theta_m : {0.5, 2.0, 4.0}) {
            for (double y = -3.0; y <= 3.0; y += 0.5) {
                const complex z = map_to_exterior(complex(geo.line_x(theta_m), y), a);
                // Sigma_m: r = e^{a(theta - theta_m)} for some representative theta
                const double theta = y + a * a * theta_m / (1.0 + a * a);
                EXPECT_NEAR(std::log(std::abs(z)), a * (theta - theta_m), 1e-12 * (1.0 + std::abs(theta)));
                EXPECT_NEAR(std::abs(std::polar(1.0, theta) - z / std::abs(z)), 0.0, 1e-12);
            }
        }
    }
}

TEST(VelocityTransport, RoundTrip) {
    const complex z(-0.3, 0.4);
    const complex w(0.7, -1.1);
    EXPECT_NEAR(std::abs(velocity_from_strip(velocity_to_strip(w, z, 0.8), z, 0.8) - w), 0.0, 1e-15);
}

TEST(ReflectShift, InverseAndSquare) {
    oracle::Rng rng(127);
    for (double a : kAs) {
        const StripGeometry geo(a);
        for (int i = 0; i < 300; ++i) {
            const complex z = random_strip(rng, a);
            const StripPoint p = StripPoint::from_complex(z);
            const StripPoint back = reflect_shift(reflect_shift(p, a, -1), a, +1);
            EXPECT_NEAR(std::abs(back.to_complex() - z), 0.0, 1e-14 * (1.0 + std::abs(z)));
            const StripPoint sq = reflect_shift(reflect_shift(p, a, -1), a, -1);
            EXPECT_NEAR(std::abs(sq.to_complex() - (z - complex(0.0, 4.0 * pi / (1.0 + a * a)))), 0.0, 1e-13);
            const StripPoint plus = reflect_shift(p, a, +1);
            EXPECT_NEAR(plus.x, -geo.width - z.real(), 1e-15);
            EXPECT_GT(plus.x, geo.left());
            EXPECT_LT(plus.x, 0.0);
        }
    }
}

TEST(ReflectShift, IterateMatchesRepeatedApplication) {
    const double a = 0.8;
    const StripPoint z{-1.1, 0.3, StripBoundary::none};
    StripPoint step = z;
    for (int n = 0; n <= 9; ++n) {
        const StripPoint closed = reflect_shift_iterate(z, a, -1, n);
        EXPECT_NEAR(closed.x, step.x, 1e-13);
        EXPECT_NEAR(closed.y, step.y, 1e-12);
        step = reflect_shift(step, a, -1);
    }
    const StripPoint far = reflect_shift_iterate(z, a, -1, 200);
    EXPECT_DOUBLE_EQ(far.x, z.x);
    EXPECT_NEAR(far.y, z.y - 200.0 * two_pi / (1.0 + a * a), 1e-12);
    EXPECT_THROW(reflect_shift_iterate(z, a, -1, -1), InvalidArgumentError);
}

TEST(Membership, Classification) {
    for (double a : kAs) {
        const StripGeometry geo(a);
        EXPECT_EQ(strip_membership(complex(geo.axis(), 0.0), a).region, StripRegion::interior);
        EXPECT_EQ(strip_membership(complex(0.0, 0.0), a).region, StripRegion::right_boundary);
        EXPECT_EQ(strip_membership(complex(geo.left(), 1.0), a).region, StripRegion::left_boundary);
        EXPECT_EQ(strip_membership(complex(0.1, 0.0), a).region, StripRegion::outside);
        EXPECT_EQ(strip_membership(complex(geo.left() - 0.1, 0.0), a).region, StripRegion::outside);
        const std::vector<double> thetas = {0.0, 2.0, 4.0};
        const StripMembership on = strip_membership(complex(-a * 2.0 / (1.0 + a * a), 3.0), a, thetas);
        EXPECT_EQ(on.region, StripRegion::on_line);
        EXPECT_EQ(on.line, 1);
        EXPECT_EQ(strip_membership(complex(-a * 4.0 / (1.0 + a * a), -2.0), a, thetas).line, 2);
        EXPECT_EQ(strip_membership(complex(-a * 3.0 / (1.0 + a * a), -2.0), a, thetas).region, StripRegion::interior);
    }
}

TEST(Membership, IndicatorIsStrict) {
    const double a = 1.5;
    const double x = -a * 2.0 / (1.0 + a * a);
    EXPECT_FALSE(left_of_line(x, a, 2.0));
    EXPECT_TRUE(left_of_line(std::nextafter(x, -10.0), a, 2.0));
    EXPECT_TRUE(left_of_line(-0.1, a, 0.0));
    EXPECT_FALSE(left_of_line(0.0, a, 0.0));
}

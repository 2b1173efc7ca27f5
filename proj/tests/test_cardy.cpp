#include "oracles.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace percsle;

namespace {

/// 2F1(1/3, 2/3; 4/3; z) from Euler's integral, by tanh-sinh quadrature.
double hyp2f1_euler(double z)
{
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double third = 1.0 / 3;
    const double integral = integrator.integrate(
        [&](double t, double tc) {
            const double one_minus_t = t < 0.5 ? 1 - t : tc;
            return std::pow(t, -third) * std::pow(one_minus_t, -third) * std::pow(1 - z * t, -third);
        },
        0.0, 1.0);
    return std::tgamma(4.0 / 3) / (std::tgamma(2.0 / 3) * std::tgamma(2.0 / 3)) * integral;
}

} // namespace

TEST(Cardy, StoredConstants)
{
    EXPECT_NEAR(cardy_const::gamma_1_3, std::tgamma(1.0 / 3), 1e-15);
    EXPECT_NEAR(cardy_const::gamma_2_3, std::tgamma(2.0 / 3), 1e-15);
    EXPECT_NEAR(cardy_const::gamma_4_3, std::tgamma(4.0 / 3), 1e-15);
    EXPECT_NEAR(cardy_const::prefactor, std::tgamma(2.0 / 3) / (std::tgamma(4.0 / 3) * std::tgamma(1.0 / 3)), 1e-15);
}

TEST(Cardy, HypergeometricEndpoints)
{
    EXPECT_EQ(hyp2f1_cardy(0), 1.0);
    const double gauss = std::tgamma(4.0 / 3) * std::tgamma(1.0 / 3) / std::tgamma(2.0 / 3);
    EXPECT_NEAR(hyp2f1_cardy(1), gauss, 1e-12);
    EXPECT_THROW(hyp2f1_cardy(1.5), DegenerateMarks);
}

TEST(Cardy, HypergeometricMatchesEulerIntegral)
{
    EXPECT_NEAR(hyp2f1_cardy(0.25), hyp2f1_euler(0.25), 1e-10);
    for (double z : {0.01, 0.1, 0.5, 0.65, 0.7, 0.75, 0.9, 0.99})
        EXPECT_NEAR(hyp2f1_cardy(z), hyp2f1_euler(z), 1e-10) << "z " << z;
}

TEST(Cardy, PhiEndpointsAndMidpoint)
{
    EXPECT_EQ(cardy_phi(0), 0.0);
    EXPECT_EQ(cardy_phi(1), 1.0);
    EXPECT_NEAR(cardy_phi(0.5), 0.5, 1e-12);
    EXPECT_THROW(cardy_phi(-0.1), DegenerateMarks);
}

TEST(Cardy, MatchesIncompleteBeta)
{
    for (int i = 1; i < 1000; ++i) {
        const double eta = i / 1000.0;
        EXPECT_NEAR(cardy_phi(eta), oracle::cardy(eta), 1e-12) << "eta " << eta;
    }
    for (double eta : {1e-8, 1e-5, 0.6, 0.6999999, 0.7, 0.7000001, 0.8, 1 - 1e-5, 1 - 1e-8})
        EXPECT_NEAR(cardy_phi(eta), oracle::cardy(eta), 1e-12) << "eta " << eta;
}

TEST(Cardy, DualityMonotonicityAndErrorBound)
{
    double previous = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double eta = i / 1000.0;
        EXPECT_NEAR(cardy_phi(eta) + cardy_phi(1 - eta), 1.0, 1e-10);
        const CardyValue v = cardy_value(std::clamp(eta, 1e-8, 1 - 1e-8));
        EXPECT_LE(v.errBound, 1e-10);
        EXPECT_GE(v.phi, 0.0);
        EXPECT_LE(v.phi, 1.0);
        EXPECT_GE(cardy_phi(eta), previous);
        previous = cardy_phi(eta);
    }
}

TEST(Cardy, BranchesAgreeInOverlapBand)
{
    for (double eta = 0.6; eta <= 0.8; eta += 0.01) {
        const double near0 = cardy_const::prefactor * std::cbrt(eta) * hyp2f1_series(1.0 / 3, 2.0 / 3, 4.0 / 3, eta).value;
        EXPECT_NEAR(near0, cardy_phi(eta), 1e-12);
    }
}

TEST(Crossing, SymmetricQuadrilateralsGiveHalf)
{
    EXPECT_NEAR(crossing_probability(rect_with_corner_marks(1.0)), 0.5, 1e-10);
    EXPECT_NEAR(crossing_probability({Shape::disc(0, 1), {0.0, 0.25, 0.5, 0.75}}), 0.5, 1e-12);
}

TEST(Crossing, RectangleAspectTwo)
{
    const double eta = oracle::rectangle_eta(2.0);
    const double golden = 0.175646893800655;
    EXPECT_NEAR(oracle::cardy(eta), golden, 1e-12);
    EXPECT_NEAR(crossing_probability(rect_with_corner_marks(2.0)), golden, 1e-9);
    // wider rectangles are harder to cross
    EXPECT_GT(crossing_probability(rect_with_corner_marks(1.5)), crossing_probability(rect_with_corner_marks(2.5)));
}

TEST(Crossing, InvariantUnderAtlasMaps)
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0, 1);
    const std::vector<Shape> shapes{Shape::half_disc(0, 1), Shape::rect(0, 2, 1), Shape::equilateral_triangle(0, 1)};
    for (const Shape& s : shapes) {
        const DiscAtlas atlas(s);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> t{u(gen), u(gen), u(gen), u(gen)};
            std::sort(t.begin(), t.end());
            if (t[1] - t[0] < 0.02 || t[2] - t[1] < 0.02 || t[3] - t[2] < 0.02 || 1 + t[0] - t[3] < 0.02)
                continue;
            const MarkedDomain md{s, t};
            MarkedDomain image{Shape::disc(0, 1), {}};
            for (double m : t)
                image.marks.push_back(wrap_unit(atlas.to_disc_angle(m) / (2 * std::numbers::pi)));
            EXPECT_NEAR(crossing_probability(md), crossing_probability(image), 1e-9);
        }
    }
}

TEST(Crossing, LipschitzUnderMarkPerturbation)
{
    const MarkedDomain base = rect_with_corner_marks(2.0);
    const double phi = crossing_probability(base);
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        for (std::size_t k = 0; k < 4; ++k) {
            MarkedDomain moved = base;
            moved.marks[k] = wrap_unit(moved.marks[k] + eps);
            EXPECT_LE(std::abs(crossing_probability(moved) - phi), 5 * eps) << "mark " << k << " eps " << eps;
        }
    }
}

TEST(HittingCdf, EndpointsAndSymmetry)
{
    const MarkedDomain md = canonical_half_disc();
    EXPECT_EQ(hitting_cdf(md, 0), 0.0);
    EXPECT_EQ(hitting_cdf(md, 1), 1.0);
    EXPECT_NEAR(hitting_cdf(md, 0.5), 0.5, 1e-12);
    // a at the top of the arc, target the diameter
    const double per = std::numbers::pi + 2;
    const MarkedDomain top{Shape::half_disc(0, 1), {0.5 * std::numbers::pi / per, std::numbers::pi / per, 0.0}};
    EXPECT_NEAR(hitting_cdf(top, 0.5), 0.5, 1e-12);
    EXPECT_NEAR(hitting_cdf(top, 0.3) + hitting_cdf(top, 0.7), 1.0, 1e-12);
}

TEST(HittingCdf, MonotoneAndContinuous)
{
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0, 1);
    const std::vector<Shape> shapes{Shape::disc(0, 1), Shape::half_disc(0, 1), Shape::rect(0, 2, 1)};
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> t{u(gen), u(gen), u(gen)};
        std::sort(t.begin(), t.end());
        if (t[1] - t[0] < 0.05 || t[2] - t[1] < 0.05 || 1 + t[0] - t[2] < 0.05)
            continue;
        const HittingCdf F({shapes[trial % shapes.size()], t});
        double previous = 0, coarseJump = 0, fineJump = 0;
        for (int i = 1; i <= 1000; ++i) {
            const double v = F(i / 1000.0);
            EXPECT_GE(v, previous - 1e-13);
            coarseJump = std::max(coarseJump, v - previous);
            previous = v;
        }
        previous = 0;
        for (int i = 1; i <= 8000; ++i) {
            const double v = F(i / 8000.0);
            fineJump = std::max(fineJump, v - previous);
            previous = v;
        }
        EXPECT_LT(fineJump, coarseJump);
        EXPECT_LT(coarseJump, 0.2);
    }
}

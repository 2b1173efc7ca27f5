#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace percsle;

namespace {

constexpr double kPi = std::numbers::pi;

MarkedDomain disc_with_angles(const std::vector<double>& angles)
{
    MarkedDomain md{Shape::disc(0, 1), {}};
    for (double t : angles)
        md.marks.push_back(wrap_unit(t / (2 * kPi)));
    return md;
}

/// Four increasing angles spread around the circle.
std::vector<double> random_quadruple(std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> gaps(4);
    double total = 0;
    for (double& g : gaps)
        total += g = u(gen);
    std::vector<double> out;
    double acc = std::uniform_real_distribution<double>(0, 2 * kPi)(gen);
    for (double g : gaps) {
        out.push_back(acc);
        acc += 2 * kPi * g / total;
    }
    return out;
}

} // namespace

TEST(Mobius, MarkedHalfPlaneMapNormalization)
{
    const MobiusMap psi = halfplane_to_disc_marked(cplx(0, -1), cplx(0, 1));
    EXPECT_NEAR(std::abs(psi(cplx(0, 0)) - cplx(0, -1)), 0, 1e-12);
    const XPoint inf = psi(XPoint::infinity());
    ASSERT_FALSE(inf.inf);
    EXPECT_NEAR(std::abs(inf.z - cplx(0, 1)), 0, 1e-12);
    EXPECT_LT(std::abs(psi(cplx(0, 1))), 1.0);
}

TEST(Mobius, RealAxisGoesToCircleAndInverseRoundTrips)
{
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> ang(-kPi, kPi), x(-50, 50), y(0, 10);
    for (int trial = 0; trial < 20; ++trial) {
        const cplx A = std::polar(1.0, ang(gen)), B = std::polar(1.0, ang(gen));
        const MobiusMap psi = halfplane_to_disc_marked(A, B);
        EXPECT_NEAR(std::abs(psi(cplx(0, 0)) - A), 0, 1e-12);
        EXPECT_NEAR(std::abs(psi(XPoint::infinity()).z - B), 0, 1e-12);
        const MobiusMap inv = psi.inverse();
        for (int i = 0; i < 100; ++i) {
            EXPECT_NEAR(std::abs(psi(cplx(x(gen), 0))), 1.0, 1e-12);
            const cplx z(x(gen), y(gen));
            EXPECT_LT(std::abs(psi(z)), 1.0 + 1e-12);
            EXPECT_NEAR(std::abs(inv(psi(z)) - z), 0, 1e-12 * std::max(1.0, std::abs(z)));
        }
    }
    EXPECT_THROW(halfplane_to_disc_marked(cplx(1, 0), cplx(1, 0)), DegenerateMarks);
}

TEST(Mobius, ThreePointMapAndComposition)
{
    const MobiusMap m = MobiusMap::three_point(1, 2, 3, cplx(0, 1), -1, cplx(0, -1));
    EXPECT_NEAR(std::abs(m(cplx(1)) - cplx(0, 1)), 0, 1e-12);
    EXPECT_NEAR(std::abs(m(cplx(2)) + 1.0), 0, 1e-12);
    EXPECT_NEAR(std::abs(m(cplx(3)) - cplx(0, -1)), 0, 1e-12);
    const MobiusMap c = MobiusMap::cayley();
    const cplx z(0.3, 0.7);
    EXPECT_NEAR(std::abs((c * m)(z) - c(m(z))), 0, 1e-12);
    EXPECT_THROW(MobiusMap(1, 1, 1, 1), DegenerateMarks);
}

TEST(CrossRatio, SquareIsSelfDual)
{
    EXPECT_NEAR(quad_cross_ratio(rect_with_corner_marks(1.0)), 0.5, 1e-10);
    EXPECT_NEAR(quad_cross_ratio(disc_with_angles({0, kPi / 2, kPi, 3 * kPi / 2})), 0.5, 1e-12);
}

TEST(CrossRatio, RectangleMatchesEllipticOracle)
{
    EXPECT_NEAR(quad_cross_ratio(rect_with_corner_marks(2.0)), 17 - 12 * std::sqrt(2.0), 1e-9);
    for (double aspect : {0.4, 0.75, 1.3, 2.0, 3.0, 5.0})
        EXPECT_NEAR(quad_cross_ratio(rect_with_corner_marks(aspect)), oracle::rectangle_eta(aspect), 1e-9)
            << "aspect " << aspect;
}

TEST(CrossRatio, HalfPlaneMarksDegenerate)
{
    double previous = 1;
    for (double k : {0.5, 0.9, 0.99, 0.999}) {
        const MarkedDomain md{Shape::half_plane(), {-1 / k, -1, 1, 1 / k}};
        const double eta = quad_cross_ratio(md);
        EXPECT_LT(eta, previous);
        previous = eta;
    }
    EXPECT_LT(previous, 1e-6);
}

TEST(CrossRatio, MobiusInvariance)
{
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> ang(0, 2 * kPi), rad(0, 0.9);
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = random_quadruple(gen);
        const double eta = quad_cross_ratio(disc_with_angles(t));
        // z -> e^{i phi} (z - w) / (1 - conj(w) z)
        const cplx w = std::polar(rad(gen), ang(gen));
        const cplx rot = std::polar(1.0, ang(gen));
        std::vector<double> moved;
        for (double s : t) {
            const cplx z = std::polar(1.0, s);
            moved.push_back(std::arg(rot * (z - w) / (1.0 - std::conj(w) * z)));
        }
        EXPECT_NEAR(quad_cross_ratio(disc_with_angles(moved)), eta, 1e-10);
    }
}

TEST(CrossRatio, ComplementaryIdentity)
{
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 200; ++trial) {
        auto t = random_quadruple(gen);
        const double eta = quad_cross_ratio(disc_with_angles(t));
        std::rotate(t.begin(), t.begin() + 1, t.end());
        EXPECT_NEAR(eta + quad_cross_ratio(disc_with_angles(t)), 1.0, 1e-10);
    }
}

TEST(SchwarzChristoffel, RectanglePrevertexSymmetry)
{
    // Prevertices are fixed only up to a disc automorphism. In the half-plane
    // normalization they sit at -1/k, -1, 1, 1/k with 2 K(k) / K(k') = aspect, so
    // their cross-ratio must match that configuration. The first side of rect()
    // is the one of length `aspect`, which swaps the roles of the two pairs.
    for (double aspect : {0.5, 1.0, 2.0, 4.0}) {
        const MarkedDomain md = rect_with_corner_marks(aspect);
        const DiscAtlas atlas(md.shape);
        ASSERT_NE(atlas.sc(), nullptr);
        EXPECT_LE(atlas.sc()->side_error(), 1e-9);
        std::vector<double> t;
        for (std::size_t k = 0; k < 4; ++k)
            t.push_back(atlas.sc()->theta()[k]);
        const double eta = oracle::rectangle_eta(aspect);
        const double root = std::sqrt(eta);
        const double k = (1 - root) / (1 + root);
        const double expected = cross_ratio(-1 / k, -1, 1, 1 / k).real();
        EXPECT_NEAR(circle_cross_ratio(t[0], t[1], t[2], t[3]), 1 - expected, 1e-9) << "aspect " << aspect;
    }
}

TEST(SchwarzChristoffel, VerticesLandOnPrevertices)
{
    const std::vector<Shape> shapes{Shape::equilateral_triangle(0, 1), Shape::rect(0, 2, 1),
                                    Shape::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}),
                                    Shape::polygon({{0, 0}, {3, 0}, {2, 1}, {0, 1}})};
    for (const Shape& s : shapes) {
        const DiscAtlas atlas(s);
        ASSERT_NE(atlas.sc(), nullptr);
        EXPECT_LE(atlas.sc()->side_error(), 1e-9);
        std::mt19937_64 gen(4);
        std::uniform_real_distribution<double> u(0, 1);
        for (int i = 0; i < 200; ++i) {
            const double t = u(gen);
            // near a corner of angle alpha pi the boundary moves like (angle)^alpha,
            // which double precision angles cannot resolve much below 1e-3
            double corner = 1e300;
            for (cplx v : s.vertices())
                corner = std::min(corner, std::abs(v - s.boundary_point(t)));
            if (corner < 0.01)
                continue;
            const double back = atlas.from_disc_angle(atlas.to_disc_angle(t));
            EXPECT_NEAR(std::abs(s.boundary_point(back) - s.boundary_point(t)), 0, 1e-8);
        }
    }
}

TEST(DiscAtlas, RoundTripsOnSmoothShapes)
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (const Shape& s : {Shape::disc(cplx(1, 2), 3), Shape::half_disc(0, 1), Shape::half_disc(cplx(-1, 0), 2)}) {
        const DiscAtlas atlas(s);
        for (int i = 0; i < 200; ++i) {
            const double t = u(gen);
            EXPECT_NEAR(std::abs(s.boundary_point(atlas.from_disc_angle(atlas.to_disc_angle(t))) - s.boundary_point(t)),
                        0, 1e-10);
        }
    }
    const DiscAtlas plane(Shape::half_plane());
    for (double x : {-10.0, -1.0, 0.0, 0.5, 7.0})
        EXPECT_NEAR(plane.from_disc_angle(plane.to_disc_angle(x)), x, 1e-10);
}

TEST(DiscAtlas, HalfDiscMapIsConformalOntoDisc)
{
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> r(0.01, 0.99), a(0.01, kPi - 0.01);
    for (int i = 0; i < 500; ++i) {
        const cplx z = std::polar(r(gen), a(gen));
        const cplx w = DiscAtlas::half_disc_to_disc(z);
        EXPECT_LT(std::abs(w), 1.0);
        EXPECT_NEAR(std::abs(DiscAtlas::disc_to_half_disc(w) - z), 0, 1e-10);
        // boundary of the half-disc goes to the circle
        EXPECT_NEAR(std::abs(DiscAtlas::half_disc_to_disc(std::polar(1.0, a(gen)))), 1.0, 1e-12);
        EXPECT_NEAR(std::abs(DiscAtlas::half_disc_to_disc(cplx(2 * r(gen) - 1, 0))), 1.0, 1e-12);
    }
}

TEST(SemiBall, ImagesUnderSimpleMaps)
{
    const double eps = 0.3;
    const auto id = semiball_image([](cplx z) { return z; }, eps);
    EXPECT_GE(id.size(), 64u);
    for (cplx p : id) {
        EXPECT_NEAR(std::abs(p), eps, 1e-15);
        EXPECT_GE(p.imag(), -1e-15);
    }
    EXPECT_NEAR(std::abs(id.front() - cplx(eps, 0)), 0, 1e-15);
    EXPECT_NEAR(std::abs(id.back() - cplx(-eps, 0)), 0, 1e-15);
    for (cplx p : semiball_image([](cplx z) { return 2.0 * z; }, eps))
        EXPECT_NEAR(std::abs(p), 2 * eps, 1e-15);
    const MobiusMap c = MobiusMap::cayley();
    const auto img = semiball_image([&](cplx z) { return c(z); }, eps, 101);
    for (int i = 0; i < 101; ++i) {
        const cplx z = eps * std::exp(cplx(0, kPi * i / 100.0));
        EXPECT_NEAR(std::abs(img[i] - (z - cplx(0, 1)) / (z + cplx(0, 1))), 0, 1e-10);
    }
    EXPECT_NEAR(std::abs(img.front()), 1.0, 1e-8);
    EXPECT_NEAR(std::abs(img.back()), 1.0, 1e-8);
}

TEST(Shapes, MarksValidation)
{
    EXPECT_NO_THROW((MarkedDomain{Shape::disc(0, 1), {0.1, 0.5, 0.9}}.validate()));
    EXPECT_NO_THROW((MarkedDomain{Shape::disc(0, 1), {0.9, 0.1, 0.5}}.validate()));
    EXPECT_THROW((MarkedDomain{Shape::disc(0, 1), {0.1, 0.9, 0.5}}.validate()), DegenerateMarks);
    EXPECT_THROW((MarkedDomain{Shape::disc(0, 1), {0.1, 0.1}}.validate()), DegenerateMarks);
    EXPECT_THROW((MarkedDomain{Shape::disc(0, 1), {0.1}}.validate()), DegenerateMarks);
    EXPECT_THROW((MarkedDomain{Shape::half_plane(), {1, 0, 2}}.validate()), DegenerateMarks);
}

TEST(Shapes, BoundaryParametrizationRoundTrip)
{
    const std::vector<Shape> shapes{Shape::disc(0, 2), Shape::half_disc(cplx(1, 1), 1), Shape::rect(cplx(-1, 0), 2, 1),
                                    Shape::equilateral_triangle(0, 1)};
    for (const Shape& s : shapes)
        for (int i = 0; i < 97; ++i) {
            const double t = (i + 0.5) / 97;
            EXPECT_NEAR(s.boundary_param(s.boundary_point(t)), t, 1e-12) << to_string(s.kind());
            EXPECT_TRUE(s.contains(s.boundary_point(t), 1e-9));
        }
}

TEST(Shapes, ArcFraction)
{
    EXPECT_DOUBLE_EQ(arc_fraction(0.2, 0.6, 0.4), 0.5);
    EXPECT_DOUBLE_EQ(arc_fraction(0.8, 0.2, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(arc_fraction(0.2, 0.6, 0.65), 1.0);
    EXPECT_DOUBLE_EQ(arc_fraction(0.2, 0.6, 0.15), 0.0);
}

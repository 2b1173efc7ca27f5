#pragma once

// Cardy's crossing formula
//   Phi(eta) = Gamma(2/3) / (Gamma(4/3) Gamma(1/3)) * eta^(1/3) * 2F1(1/3, 2/3; 4/3; eta)
// and the hitting distributions it determines.

#include "percsle/conformal.hpp"
#include "percsle/errors.hpp"
#include "percsle/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace percsle {

namespace cardy_const {
inline constexpr double gamma_1_3 = 2.67893853470774763365569294097;
inline constexpr double gamma_2_3 = 1.35411793942640041694528802815;
inline constexpr double gamma_4_3 = 0.892979511569249211218564313658;
/// Gamma(2/3) / (Gamma(4/3) Gamma(1/3))
inline constexpr double prefactor = 0.566046680363159700449670550463;
/// 3 Gamma(2/3) / Gamma(1/3)^2, the coefficient of the expansion at eta = 1
inline constexpr double tail_coefficient = 3 * gamma_2_3 / (gamma_1_3 * gamma_1_3);
/// Branch switch between the series at 0 and the expansion at 1.
inline constexpr double switch_eta = 0.7;
} // namespace cardy_const

struct CardyValue {
    double eta = 0;
    double phi = 0;
    double errBound = 0;
};

struct SeriesValue {
    double value = 0;
    double errBound = 0;
};

/// Power series of 2F1(a, b; c; z) for 0 <= z < 1, assuming the term ratio
/// (a+n)(b+n)/((c+n)(n+1)) never exceeds 1 so the tail is bounded geometrically.
inline SeriesValue hyp2f1_series(double a, double b, double c, double z)
{
    double term = 1, sum = 1;
    int n = 0;
    for (; n < 100000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z;
        sum += term;
        if (term * z / (1 - z) < 1e-18 * sum)
            break;
    }
    const double tail = term * z / (1 - z);
    return {sum, tail + 4 * (n + 1) * std::numeric_limits<double>::epsilon() * sum};
}

namespace detail {

inline CardyValue phi_near_zero(double eta)
{
    const SeriesValue f = hyp2f1_series(1.0 / 3, 2.0 / 3, 4.0 / 3, eta);
    const double pre = cardy_const::prefactor * std::cbrt(eta);
    return {eta, pre * f.value, pre * f.errBound + 1e-16};
}

inline CardyValue phi_near_one(double eta)
{
    const double z = 1 - eta;
    const SeriesValue g = hyp2f1_series(1.0, 2.0 / 3, 4.0 / 3, z);
    const double pre = cardy_const::tail_coefficient * std::cbrt(eta * z);
    return {eta, 1 - pre * g.value, pre * g.errBound + 1e-16};
}

} // namespace detail

inline CardyValue cardy_value(double eta)
{
    if (!(eta >= 0 && eta <= 1))
        throw DegenerateMarks("cross-ratio outside [0, 1]");
    if (eta == 0)
        return {0, 0, 0};
    if (eta == 1)
        return {1, 1, 0};
    CardyValue v = eta <= cardy_const::switch_eta ? detail::phi_near_zero(eta) : detail::phi_near_one(eta);
    v.phi = std::clamp(v.phi, 0.0, 1.0);
    return v;
}

inline double cardy_phi(double eta) { return cardy_value(eta).phi; }

/// 2F1(1/3, 2/3; 4/3; eta) on [0, 1].
inline double hyp2f1_cardy(double eta)
{
    if (!(eta >= 0 && eta <= 1))
        throw DegenerateMarks("argument outside [0, 1]");
    if (eta == 0)
        return 1;
    if (eta <= cardy_const::switch_eta)
        return hyp2f1_series(1.0 / 3, 2.0 / 3, 4.0 / 3, eta).value;
    return detail::phi_near_one(eta).phi / (cardy_const::prefactor * std::cbrt(eta));
}

/// Cardy's formula for a four-marked domain: probability of a blue crossing
/// between the arcs (z1 z2) and (z3 z4).
inline double crossing_probability(const MarkedDomain& md) { return cardy_phi(quad_cross_ratio(md)); }

inline double crossing_probability(const MarkedDomain& md, const DiscAtlas& atlas)
{
    return cardy_phi(quad_cross_ratio(md, atlas));
}

/// Distribution of the first hit of the counterclockwise arc cd by the
/// exploration from a. Marks are (a, c, d); s is the arc-length fraction along cd.
/// The value at s is Phi of the quadrilateral (c, x(s), d, a).
class HittingCdf {
public:
    explicit HittingCdf(const MarkedDomain& md) : md_(md), atlas_(md.shape)
    {
        if (md.marks.size() != 3)
            throw DegenerateMarks("hitting distribution needs marks a, c, d");
        md.validate();
        const auto t = mark_angles(md, atlas_);
        ta_ = t[0];
        tc_ = t[1];
        td_ = t[2];
    }

    /// Boundary coordinate of the point at arc fraction s along cd.
    double arc_point(double s) const
    {
        const double c = md_.marks[1], d = md_.marks[2];
        if (md_.shape.kind() == ShapeKind::half_plane) {
            if (!(d > c))
                throw UnsupportedDomain("half-plane target arc through infinity");
            return c + s * (d - c);
        }
        return wrap_unit(c + s * wrap_unit(d - c));
    }

    double operator()(double s) const
    {
        if (s <= 0)
            return 0;
        if (s >= 1)
            return 1;
        const double tx = atlas_.to_disc_angle(arc_point(s));
        const double eta = std::clamp(circle_cross_ratio(tc_, tx, td_, ta_), 0.0, 1.0);
        return cardy_phi(eta);
    }

    const DiscAtlas& atlas() const { return atlas_; }
    const MarkedDomain& domain() const { return md_; }

private:
    MarkedDomain md_;
    DiscAtlas atlas_;
    double ta_ = 0, tc_ = 0, td_ = 0;
};

inline double hitting_cdf(const MarkedDomain& md, double s) { return HittingCdf(md)(s); }

} // namespace percsle

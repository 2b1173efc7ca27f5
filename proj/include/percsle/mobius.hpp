#pragma once

// Moebius maps on the Riemann sphere.

#include "percsle/errors.hpp"
#include "percsle/hex.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace percsle {

/// A point of the extended plane; `inf` marks the point at infinity.
struct XPoint {
    cplx z{};
    bool inf = false;

    static XPoint infinity() { return {{}, true}; }
};

class MobiusMap {
public:
    MobiusMap() = default;
    MobiusMap(cplx a, cplx b, cplx c, cplx d) : a_(a), b_(b), c_(c), d_(d)
    {
        if (std::abs(det()) == 0)
            throw DegenerateMarks("Moebius determinant vanishes");
    }

    static MobiusMap identity() { return {}; }

    /// Sends z1, z2, z3 (finite, distinct) to 0, 1, infinity.
    static MobiusMap to_zero_one_inf(cplx z1, cplx z2, cplx z3)
    {
        if (z1 == z2 || z2 == z3 || z1 == z3)
            throw DegenerateMarks("three-point map needs distinct points");
        return {z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1)};
    }

    /// The unique map sending (z1, z2, z3) to (w1, w2, w3).
    static MobiusMap three_point(cplx z1, cplx z2, cplx z3, cplx w1, cplx w2, cplx w3)
    {
        return to_zero_one_inf(w1, w2, w3).inverse() * to_zero_one_inf(z1, z2, z3);
    }

    /// Cayley map of the upper half-plane onto the unit disc, z -> (z - i)/(z + i).
    static MobiusMap cayley() { return {1.0, cplx(0, -1), 1.0, cplx(0, 1)}; }

    cplx det() const { return a_ * d_ - b_ * c_; }

    cplx operator()(cplx z) const { return (a_ * z + b_) / (c_ * z + d_); }

    XPoint operator()(XPoint p) const
    {
        if (p.inf) {
            if (c_ == cplx(0))
                return XPoint::infinity();
            return {a_ / c_, false};
        }
        const cplx den = c_ * p.z + d_;
        if (den == cplx(0))
            return XPoint::infinity();
        return {(a_ * p.z + b_) / den, false};
    }

    MobiusMap inverse() const { return {d_, -b_, -c_, a_}; }

    /// Composition: (f * g)(z) = f(g(z)).
    friend MobiusMap operator*(const MobiusMap& f, const MobiusMap& g)
    {
        return {f.a_ * g.a_ + f.b_ * g.c_, f.a_ * g.b_ + f.b_ * g.d_, f.c_ * g.a_ + f.d_ * g.c_,
                f.c_ * g.b_ + f.d_ * g.d_};
    }

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    cplx c() const { return c_; }
    cplx d() const { return d_; }

private:
    cplx a_{1}, b_{0}, c_{0}, d_{1};
};

/// Map of the closed upper half-plane onto the closed unit disc with 0 -> A and
/// infinity -> B, for A, B on the unit circle. It has the form
///   psi(z) = B ((z + 1) - z0) / ((z + 1) - conj(z0)),
/// with z0 - 1 on the unit circle in the upper half-plane.
inline MobiusMap halfplane_to_disc_marked(cplx A, cplx B)
{
    if (std::abs(std::abs(A) - 1) > 1e-12 || std::abs(std::abs(B) - 1) > 1e-12)
        throw DegenerateMarks("disc marks must lie on the unit circle");
    if (std::abs(A - B) < 1e-14)
        throw DegenerateMarks("disc marks coincide");
    // psi(0) = B p / conj(p) with p = z0 - 1, so arg p = arg(A / B) / 2 modulo pi
    cplx p = std::polar(1.0, 0.5 * std::arg(A / B));
    if (p.imag() < 0)
        p = -p;
    const cplx z0 = p + 1.0;
    // psi(z) = B (z + 1 - z0) / (z + 1 - conj z0)
    return {B, B * (1.0 - z0), 1.0, 1.0 - std::conj(z0)};
}

} // namespace percsle

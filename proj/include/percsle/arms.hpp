#pragma once

// Arm counts in annuli by tracing color interfaces.
//
// Lengths are in units of the distance between neighbouring hexagon centers.
// An annulus keeps the hexagons whose centers lie at distance [rInner, rOuter]
// from the center; the half version also requires r >= center.r.

#include "percsle/hex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace percsle {

inline constexpr double kUnitDelta = 0.5773502691896257645091487805; // 1 / sqrt(3)

enum class AnnulusKind { full, half };

struct ArmCount {
    int armCount = 0;
    /// Color ('B' or 'Y') on the right of each crossing strand, traced outward,
    /// ordered by angle.
    std::string colorPattern;
    int strands = 0;
};

class Annulus {
public:
    Annulus(Hex center, double rInner, double rOuter, AnnulusKind kind = AnnulusKind::full)
        : center_(center), c_(hex_center(center, kUnitDelta)), rIn_(rInner), rOut_(rOuter), kind_(kind)
    {
        const int R = static_cast<int>(std::ceil(1.2 * rOut_)) + 2;
        for (int r = center_.r - R; r <= center_.r + R; ++r)
            for (int q = center_.q - 2 * R; q <= center_.q + 2 * R; ++q)
                if (contains({q, r}))
                    hexes_.push_back({q, r});
    }

    enum class Place { inside, inner, outer, side };

    Place place(Hex h) const
    {
        if (kind_ == AnnulusKind::half && h.r < center_.r)
            return Place::side;
        const double d = std::abs(hex_center(h, kUnitDelta) - c_);
        if (d < rIn_)
            return Place::inner;
        if (d > rOut_)
            return Place::outer;
        return Place::inside;
    }

    bool contains(Hex h) const { return place(h) == Place::inside; }

    /// Hexagons of the annulus.
    const std::vector<Hex>& hexes() const { return hexes_; }

    cplx center_point() const { return c_; }
    AnnulusKind kind() const { return kind_; }

private:
    Hex center_;
    cplx c_;
    double rIn_, rOut_;
    AnnulusKind kind_;
    std::vector<Hex> hexes_;
};

namespace detail {

/// Whether a monochromatic path of annulus hexagons joins the inner and the
/// outer boundary.
template <class Color>
bool has_monochromatic_crossing(const Annulus& a, const std::vector<Hex>& cells, const Color& blue)
{
    std::unordered_set<Hex, HexHash> seen;
    for (bool color : {true, false}) {
        seen.clear();
        std::deque<Hex> queue;
        for (Hex h : cells) {
            if (blue(h) != color)
                continue;
            bool touchesInner = false;
            for (Hex n : neighbors(h))
                touchesInner = touchesInner || a.place(n) == Annulus::Place::inner;
            if (touchesInner && seen.insert(h).second)
                queue.push_back(h);
        }
        while (!queue.empty()) {
            const Hex h = queue.front();
            queue.pop_front();
            for (Hex n : neighbors(h)) {
                const auto p = a.place(n);
                if (p == Annulus::Place::outer)
                    return true;
                if (p == Annulus::Place::inside && blue(n) == color && seen.insert(n).second)
                    queue.push_back(n);
            }
        }
    }
    return false;
}

} // namespace detail

/// Number of interface strands crossing the annulus. In a full annulus this is
/// the number of disjoint monochromatic crossings of alternating colors. In the
/// half annulus k > 0 strands separate k + 1 such crossings, and with no strand
/// the count is 1 or 0 depending on whether a monochromatic crossing exists.
template <class Color>
ArmCount annulus_arm_count(const Color& blue, const Annulus& a)
{
    const std::vector<Hex>& cells = a.hexes();
    std::vector<std::pair<double, char>> crossings;
    int strands = 0;
    for (Hex h : cells) {
        for (int k = 0; k < 6; ++k) {
            const Hex n = neighbor(h, k);
            if (!a.contains(n) || blue(h) == blue(n))
                continue;
            DirEdge e{h, n};
            if (a.place(e.behind()) != Annulus::Place::inner)
                continue;
            const bool rightBlue = blue(h);
            const cplx start = vertex_position(e.tail(), kUnitDelta) - a.center_point();
            Annulus::Place end;
            for (;;) {
                const Hex xi = e.ahead();
                end = a.place(xi);
                if (end != Annulus::Place::inside)
                    break;
                e = e.turn(blue(xi) == blue(e.right));
            }
            ++strands;
            if (end == Annulus::Place::outer)
                crossings.push_back({std::arg(start), rightBlue ? 'B' : 'Y'});
        }
    }
    std::sort(crossings.begin(), crossings.end());
    ArmCount out;
    out.strands = strands;
    for (const auto& c : crossings)
        out.colorPattern.push_back(c.second);
    const int k = static_cast<int>(crossings.size());
    if (a.kind() == AnnulusKind::full)
        out.armCount = k;
    else
        out.armCount = k > 0 ? k + 1 : (detail::has_monochromatic_crossing(a, cells, blue) ? 1 : 0);
    return out;
}

template <class Color>
ArmCount annulus_arm_count(const Color& blue, Hex center, double rInner, double rOuter,
                           AnnulusKind kind = AnnulusKind::full)
{
    return annulus_arm_count(blue, Annulus(center, rInner, rOuter, kind));
}

} // namespace percsle

#pragma once

// Distances between curves, point sets and points of the Riemann sphere.

#include "percsle/errors.hpp"
#include "percsle/hex.hpp"
#include "percsle/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace percsle {

using Polyline = std::vector<cplx>;

/// Drops consecutive duplicate points.
inline Polyline collapse_duplicates(const Polyline& p)
{
    Polyline out;
    for (cplx z : p)
        if (out.empty() || out.back() != z)
            out.push_back(z);
    return out;
}

/// Discrete Frechet distance (Eiter-Mannila dynamic program, O(nm) time, O(m) memory).
/// It bounds the continuous curve distance from above and converges to it as
/// the sampling is refined.
inline double curve_distance(const Polyline& a, const Polyline& b)
{
    if (a.empty() || b.empty())
        throw EmptySet("curve_distance needs nonempty polylines");
    const std::size_t m = b.size();
    std::vector<double> prev(m), cur(m);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = std::abs(a[i] - b[j]);
            double best;
            if (i == 0 && j == 0)
                best = d;
            else if (i == 0)
                best = std::max(cur[j - 1], d);
            else if (j == 0)
                best = std::max(prev[0], d);
            else
                best = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
            cur[j] = best;
        }
        std::swap(prev, cur);
    }
    return prev[m - 1];
}

/// Symmetric Hausdorff distance between finite point sets.
inline double hausdorff_points(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    if (a.empty() || b.empty())
        throw EmptySet("hausdorff_points needs nonempty sets");
    auto directed = [](const std::vector<cplx>& from, const std::vector<cplx>& to) {
        double worst = 0;
        for (cplx p : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (cplx q : to) {
                nearest = std::min(nearest, std::abs(p - q));
                if (nearest <= worst)
                    break;
            }
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

/// Hausdorff distance between finite families of curves, with curve_distance
/// as the base metric.
inline double hausdorff_curvesets(const std::vector<Polyline>& f, const std::vector<Polyline>& g)
{
    if (f.empty() || g.empty())
        throw EmptySet("hausdorff_curvesets needs nonempty families");
    std::vector<std::vector<double>> d(f.size(), std::vector<double>(g.size()));
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            d[i][j] = curve_distance(f[i], g[j]);
    double worst = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, *std::min_element(d[i].begin(), d[i].end()));
    for (std::size_t j = 0; j < g.size(); ++j) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < f.size(); ++i)
            nearest = std::min(nearest, d[i][j]);
        worst = std::max(worst, nearest);
    }
    return worst;
}

/// Geodesic distance for the metric |dz| / (1 + |z|^2). Under stereographic
/// projection this is half the angle between the sphere points, so
///   Delta(u, v) = atan(|u - v| / |1 + conj(u) v|),  Delta(u, inf) = atan(1 / |u|).
inline double sphere_distance(XPoint u, XPoint v)
{
    if (u.inf && v.inf)
        return 0;
    if (u.inf)
        std::swap(u, v);
    if (v.inf)
        return std::atan2(1.0, std::abs(u.z));
    return std::atan2(std::abs(u.z - v.z), std::abs(1.0 + std::conj(u.z) * v.z));
}

inline double sphere_distance(cplx u, cplx v) { return sphere_distance(XPoint{u}, XPoint{v}); }

} // namespace percsle

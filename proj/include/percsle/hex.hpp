#pragma once

// Hexagonal tiling in axial coordinates.
//
// Hexagons are pointy-top with circumradius delta. Site (q, r) has center
//   delta * (sqrt(3) * (q + r / 2), 1.5 * r)
// so adjacent centers are sqrt(3) * delta apart. Direction k (k = 0..5) points
// at angle 60k degrees; corner c of a hexagon sits at angle 30 + 60c degrees.
//
// A lattice vertex is the top corner T(q, r) or the bottom corner B(q, r) of
// some hexagon; every vertex has exactly one such name.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>

namespace percsle {

using cplx = std::complex<double>;

struct Hex {
    int q = 0;
    int r = 0;

    friend constexpr bool operator==(Hex, Hex) = default;
    friend constexpr Hex operator+(Hex a, Hex b) { return {a.q + b.q, a.r + b.r}; }
    friend constexpr Hex operator-(Hex a, Hex b) { return {a.q - b.q, a.r - b.r}; }
};

inline constexpr std::array<Hex, 6> kHexDirections{{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}};

constexpr int mod6(int k) { return ((k % 6) + 6) % 6; }

constexpr Hex neighbor(Hex h, int k) { return h + kHexDirections[mod6(k)]; }

inline std::array<Hex, 6> neighbors(Hex h)
{
    std::array<Hex, 6> out{};
    for (int k = 0; k < 6; ++k)
        out[k] = neighbor(h, k);
    return out;
}

/// Direction index k with b == neighbor(a, k), or -1 if not adjacent.
constexpr int direction_to(Hex a, Hex b)
{
    const Hex d = b - a;
    for (int k = 0; k < 6; ++k)
        if (kHexDirections[k] == d)
            return k;
    return -1;
}

constexpr bool adjacent(Hex a, Hex b) { return direction_to(a, b) >= 0; }

inline cplx hex_center(Hex h, double delta)
{
    return {delta * std::sqrt(3.0) * (h.q + 0.5 * h.r), delta * 1.5 * h.r};
}

/// Hexagon whose center is nearest to p (cube rounding).
inline Hex nearest_hex(cplx p, double delta)
{
    const double rf = p.imag() / (1.5 * delta);
    const double qf = p.real() / (std::sqrt(3.0) * delta) - 0.5 * rf;
    const double sf = -qf - rf;
    double q = std::round(qf), r = std::round(rf), s = std::round(sf);
    const double dq = std::abs(q - qf), dr = std::abs(r - rf), ds = std::abs(s - sf);
    if (dq > dr && dq > ds)
        q = -r - s;
    else if (dr > ds)
        r = -q - s;
    return {static_cast<int>(q), static_cast<int>(r)};
}

/// Number of steps between two hexagons.
constexpr int hex_distance(Hex a, Hex b)
{
    const int dq = a.q - b.q, dr = a.r - b.r;
    const int ds = -dq - dr;
    const int aq = dq < 0 ? -dq : dq, ar = dr < 0 ? -dr : dr, as = ds < 0 ? -ds : ds;
    return (aq + ar + as) / 2;
}

struct Vertex {
    int q = 0;
    int r = 0;
    bool top = false;

    friend constexpr bool operator==(Vertex, Vertex) = default;
};

/// Corner c of hexagon h in canonical form.
constexpr Vertex corner(Hex h, int c)
{
    switch (mod6(c)) {
    case 0: return {h.q, h.r + 1, false};
    case 1: return {h.q, h.r, true};
    case 2: return {h.q - 1, h.r + 1, false};
    case 3: return {h.q, h.r - 1, true};
    case 4: return {h.q, h.r, false};
    default: return {h.q + 1, h.r - 1, true};
    }
}

/// The three hexagons meeting at v.
constexpr std::array<Hex, 3> vertex_hexes(Vertex v)
{
    if (v.top)
        return {Hex{v.q, v.r}, Hex{v.q, v.r + 1}, Hex{v.q - 1, v.r + 1}};
    return {Hex{v.q, v.r}, Hex{v.q, v.r - 1}, Hex{v.q + 1, v.r - 1}};
}

inline cplx vertex_position(Vertex v, double delta)
{
    return hex_center({v.q, v.r}, delta) + cplx(0.0, v.top ? delta : -delta);
}

/// Directed lattice edge separating `right` from `left` (left = right + dir[k]).
/// Walking along it, `right` is on the right-hand side.
struct DirEdge {
    Hex right;
    Hex left;

    friend constexpr bool operator==(DirEdge, DirEdge) = default;

    constexpr int dir() const { return direction_to(right, left); }
    /// The third hexagon at the head vertex.
    constexpr Hex ahead() const { return neighbor(right, dir() - 1); }
    /// The third hexagon at the tail vertex.
    constexpr Hex behind() const { return neighbor(right, dir() + 1); }
    constexpr Vertex head() const { return corner(right, dir() - 1); }
    constexpr Vertex tail() const { return corner(right, dir()); }
    constexpr DirEdge reversed() const { return {left, right}; }
    /// Successor when the ahead hexagon counts as right-side (blue) or left-side (yellow).
    constexpr DirEdge turn(bool aheadIsRightSide) const
    {
        const Hex xi = ahead();
        return aheadIsRightSide ? DirEdge{xi, left} : DirEdge{right, xi};
    }
};

inline cplx edge_midpoint(DirEdge e, double delta)
{
    return 0.5 * (vertex_position(e.head(), delta) + vertex_position(e.tail(), delta));
}

struct HexHash {
    std::size_t operator()(Hex h) const noexcept
    {
        const std::uint64_t k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(h.q)) << 32) ^
                                static_cast<std::uint32_t>(h.r);
        return std::hash<std::uint64_t>{}(k * 0x9E3779B97F4A7C15ull);
    }
};

struct VertexHash {
    std::size_t operator()(Vertex v) const noexcept
    {
        return HexHash{}({v.q, 2 * v.r + (v.top ? 1 : 0)});
    }
};

struct EdgeHash {
    std::size_t operator()(DirEdge e) const noexcept
    {
        return HexHash{}(e.right) * 31 + HexHash{}(e.left);
    }
};

} // namespace percsle

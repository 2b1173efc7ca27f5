#pragma once

// The percolation exploration process on a lattice Jordan set.
//
// A coloring is any callable Hex -> bool (true = blue). Colors are queried
// lazily, the first time the exploration meets a hexagon.

#include "percsle/errors.hpp"
#include "percsle/hex.hpp"
#include "percsle/lattice.hpp"
#include "percsle/rng.hpp"

#include <deque>
#include <functional>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace percsle {

/// Site colors as a pure function of (seed, site). Sites are grouped in blocks
/// of 128 consecutive r values; one Philox call colors a whole block.
class SeededColoring {
public:
    explicit SeededColoring(std::uint64_t seed) : seed_(seed) {}

    bool operator()(Hex h) const
    {
        const int block = h.r >> 7;
        if (!valid_ || h.q != cq_ || block != cblock_) {
            bits_ = philox4x32({static_cast<std::uint32_t>(h.q), static_cast<std::uint32_t>(block), 0xC0102u, 0u}, seed_);
            cq_ = h.q;
            cblock_ = block;
            valid_ = true;
        }
        const int bit = h.r & 127;
        return (bits_[bit >> 5] >> (bit & 31)) & 1u;
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    mutable Counter bits_{};
    mutable int cq_ = 0, cblock_ = 0;
    mutable bool valid_ = false;
};

/// Explicit assignment; querying a missing site throws IncompleteColoring.
class ExplicitColoring {
public:
    ExplicitColoring() = default;
    explicit ExplicitColoring(std::unordered_map<Hex, bool, HexHash> colors) : colors_(std::move(colors)) {}

    void set(Hex h, bool blue) { colors_[h] = blue; }
    bool operator()(Hex h) const
    {
        const auto it = colors_.find(h);
        if (it == colors_.end())
            throw IncompleteColoring("no color for site (" + std::to_string(h.q) + "," + std::to_string(h.r) + ")");
        return it->second;
    }

private:
    std::unordered_map<Hex, bool, HexHash> colors_;
};

struct ConstantColoring {
    bool blue = true;
    bool operator()(Hex) const { return blue; }
};

enum class EndState { ReachedTarget, ReachedArc, Truncated };

struct ExplorationPath {
    std::vector<DirEdge> edges;
    /// Interior sites explored, in the order first met (Gamma_B and Gamma_Y).
    std::vector<Hex> exploredBlue;
    std::vector<Hex> exploredYellow;
    EVertex start;
    EVertex target;
    EndState end = EndState::ReachedTarget;

    Vertex tip() const { return edges.back().head(); }
};

/// A set of boundary vertices (an arc of the domain boundary) with a position
/// in [0, 1] attached to each vertex.
struct ArcTarget {
    std::vector<Vertex> vertices;
    std::vector<double> fractions;
    std::unordered_map<Vertex, std::size_t, VertexHash> index;

    std::optional<double> fraction_of(Vertex v) const
    {
        const auto it = index.find(v);
        if (it == index.end())
            return std::nullopt;
        return fractions[it->second];
    }
    bool contains(Vertex v) const { return index.count(v) != 0; }
};

/// Arc of boundary vertices counterclockwise from `from` to `to` (both included).
/// Positions default to lattice arc length; `position` may supply its own.
inline ArcTarget make_arc_target(const LatticeDomain& d, const EVertex& from, const EVertex& to,
                                 const std::function<double(Vertex)>& position = {})
{
    ArcTarget t;
    t.vertices = d.arc_vertices(from, to);
    const std::size_t n = t.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        t.fractions.push_back(position ? position(t.vertices[i]) : (n > 1 ? double(i) / double(n - 1) : 0.0));
        t.index.emplace(t.vertices[i], i);
    }
    return t;
}

/// Arc target from an explicit vertex list (positions by list order).
inline ArcTarget make_vertex_target(const std::vector<Vertex>& vertices)
{
    ArcTarget t;
    for (Vertex v : vertices) {
        if (t.index.count(v))
            continue;
        t.index.emplace(v, t.vertices.size());
        t.vertices.push_back(v);
    }
    const std::size_t n = t.vertices.size();
    for (std::size_t i = 0; i < n; ++i)
        t.fractions.push_back(n > 1 ? double(i) / double(n - 1) : 0.0);
    return t;
}

struct ArcHit {
    ExplorationPath path;
    Vertex hit;
    double fraction = 0;
};

/// Exploration from x to y on a fixed domain; reusable across colorings.
class Explorer {
public:
    static constexpr std::int8_t kInside = 0;
    static constexpr std::int8_t kRight = 1;
    static constexpr std::int8_t kLeft = 2;
    static constexpr std::int8_t kFar = 3;

    Explorer(const LatticeDomain& d, const EVertex& x, const EVertex& y) : d_(&d), x_(x), y_(y)
    {
        if (x.v == y.v)
            throw SameVertex("exploration endpoints coincide");
        const auto& g = d.grid();
        side_ = HexGrid<std::int8_t>(g.q0(), g.r0(), g.q1(), g.r1(), kFar);
        for (Hex h : d.interior())
            side_[h] = kInside;
        const auto& walk = d.walk();
        for (std::size_t i = 0; i < walk.size(); ++i)
            side_[walk[i].right] = kLeft;
        for (std::size_t i : d.arc_steps(x, y))
            side_[walk[i].right] = kRight;
        state_ = HexGrid<std::int8_t>(g.q0(), g.r0(), g.q1(), g.r1(), 0);
        budget_ = 10 * d.size() + 10;
    }

    const LatticeDomain& domain() const { return *d_; }
    const EVertex& from() const { return x_; }
    const EVertex& to() const { return y_; }
    std::int8_t side(Hex h) const { return side_.get(h, kFar); }

    /// Runs the exploration. With a target, stops at the first head vertex in it.
    /// `maxSteps` > 0 truncates the path.
    template <class Color>
    ExplorationPath run(Color&& color, const ArcTarget* target = nullptr, std::size_t maxSteps = 0)
    {
        std::fill(state_.raw().begin(), state_.raw().end(), std::int8_t{0});
        ExplorationPath p;
        p.start = x_;
        p.target = y_;
        DirEdge e = d_->entry_edge(x_);
        p.edges.push_back(e);
        for (;;) {
            const Vertex head = e.head();
            if (target && target->contains(head)) {
                p.end = EndState::ReachedArc;
                return p;
            }
            if (head == y_.v) {
                p.end = EndState::ReachedTarget;
                return p;
            }
            if (maxSteps && p.edges.size() >= maxSteps) {
                p.end = EndState::Truncated;
                return p;
            }
            if (p.edges.size() > budget_)
                throw StepBudgetExceeded("exploration exceeded " + std::to_string(budget_) + " edges");
            const Hex xi = e.ahead();
            bool blue = false;
            switch (side_.get(xi, kFar)) {
            case kInside: {
                std::int8_t& s = state_[xi];
                if (s == 0) {
                    blue = color(xi);
                    s = blue ? 1 : 2;
                    (blue ? p.exploredBlue : p.exploredYellow).push_back(xi);
                } else {
                    blue = s == 1;
                }
                break;
            }
            case kRight: blue = true; break;
            case kLeft: blue = false; break;
            default: throw InvalidDomain("exploration left the domain");
            }
            e = e.turn(blue);
            p.edges.push_back(e);
        }
    }

    template <class Color>
    ArcHit run_until(Color&& color, const ArcTarget& target)
    {
        ArcHit hit{run(std::forward<Color>(color), &target), {}, 0.0};
        if (hit.path.end != EndState::ReachedArc)
            throw TargetUnreachable("exploration reached its endpoint before the target arc");
        hit.hit = hit.path.tip();
        hit.fraction = *target.fraction_of(hit.hit);
        return hit;
    }

private:
    const LatticeDomain* d_;
    EVertex x_, y_;
    HexGrid<std::int8_t> side_;
    HexGrid<std::int8_t> state_;
    std::size_t budget_ = 0;
};

template <class Color>
ExplorationPath explore(const LatticeDomain& d, const EVertex& a, const EVertex& b, Color&& color)
{
    Explorer ex(d, a, b);
    return ex.run(std::forward<Color>(color));
}

template <class Color>
ArcHit explore_until_arc(const LatticeDomain& d, const EVertex& a, const EVertex& b, Color&& color,
                         const ArcTarget& target)
{
    if (target.vertices.empty())
        throw TargetUnreachable("empty target arc");
    if (target.contains(a.v))
        throw TargetUnreachable("target arc contains the start vertex");
    Explorer ex(d, a, b);
    return ex.run_until(std::forward<Color>(color), target);
}

/// The interface separating the blue cluster of the right s-boundary from the
/// yellow cluster of the left s-boundary, extracted from a complete coloring.
template <class Color>
ExplorationPath static_interface(const LatticeDomain& d, const EVertex& a, const EVertex& b, Color&& color)
{
    Explorer ex(d, a, b);
    const auto& g = d.grid();
    HexGrid<std::int8_t> colorOf(g.q0(), g.r0(), g.q1(), g.r1(), 0);
    for (Hex h : d.interior())
        colorOf[h] = color(h) ? 1 : 2;

    // clusters: 1 = blue attached to the right s-boundary, 2 = yellow attached to the left
    HexGrid<std::int8_t> cluster(g.q0(), g.r0(), g.q1(), g.r1(), 0);
    for (std::int8_t which : {std::int8_t{1}, std::int8_t{2}}) {
        std::deque<Hex> queue;
        const std::int8_t boundarySide = which == 1 ? Explorer::kRight : Explorer::kLeft;
        for (Hex h : d.s_boundary())
            if (ex.side(h) == boundarySide) {
                cluster[h] = which;
                queue.push_back(h);
            }
        while (!queue.empty()) {
            const Hex h = queue.front();
            queue.pop_front();
            for (Hex n : neighbors(h)) {
                if (ex.side(n) == Explorer::kInside && cluster[n] == 0 && colorOf[n] == which) {
                    cluster[n] = which;
                    queue.push_back(n);
                }
            }
        }
    }

    std::unordered_map<Vertex, DirEdge, VertexHash> byTail;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        if (cluster.raw()[i] != 1)
            continue;
        const Hex h = cluster.hex_at(i);
        for (Hex n : neighbors(h)) {
            if (cluster.get(n) != 2)
                continue;
            const DirEdge e{h, n};
            if (!byTail.emplace(e.tail(), e).second)
                throw Error("interface branches at a vertex");
        }
    }

    ExplorationPath p;
    p.start = a;
    p.target = b;
    DirEdge e = d.entry_edge(a);
    p.edges.push_back(e);
    std::unordered_set<Hex, HexHash> seen;
    auto note = [&](Hex h) {
        if (ex.side(h) == Explorer::kInside && seen.insert(h).second)
            (colorOf[h] == 1 ? p.exploredBlue : p.exploredYellow).push_back(h);
    };
    while (!(e.head() == b.v)) {
        const auto it = byTail.find(e.head());
        if (it == byTail.end())
            throw Error("interface ends before reaching the target");
        e = it->second;
        byTail.erase(it);
        p.edges.push_back(e);
        note(e.right);
        note(e.left);
    }
    return p;
}

struct FillComponent {
    std::vector<Hex> hexes;
    /// 1: touches Gamma_Y and the left s-boundary; 2: Gamma_B and the right s-boundary;
    /// 3: only Gamma_Y; 4: only Gamma_B; 0: still connected to the target.
    int type = 0;
};

struct Filling {
    std::vector<Hex> hexes;
    Vertex tip;
    std::vector<FillComponent> components;
};

/// Explored hexagons plus those unexplored hexagons that can no longer reach b.
inline Filling fill(const ExplorationPath& path, const LatticeDomain& d, const EVertex& b)
{
    const EVertex& a = path.start;
    Explorer ex(d, a, b);
    const auto& g = d.grid();
    // 1 = Gamma_B, 2 = Gamma_Y, 3 = unexplored interior
    HexGrid<std::int8_t> mark(g.q0(), g.r0(), g.q1(), g.r1(), 0);
    for (Hex h : d.interior())
        mark[h] = 3;
    for (const DirEdge& e : path.edges) {
        if (ex.side(e.right) == Explorer::kInside)
            mark[e.right] = 1;
        if (ex.side(e.left) == Explorer::kInside)
            mark[e.left] = 2;
    }
    Filling f;
    f.tip = path.tip();
    for (Hex h : d.interior())
        if (mark[h] != 3)
            f.hexes.push_back(h);

    const Hex bHex = d.e_vertex_hex(b);
    HexGrid<int> compId(g.q0(), g.r0(), g.q1(), g.r1(), -1);
    for (Hex start : d.interior()) {
        if (mark[start] != 3 || compId[start] >= 0)
            continue;
        FillComponent c;
        const int id = static_cast<int>(f.components.size());
        bool touchB = false, touchY = false, touchRight = false, touchLeft = false, hasTarget = false;
        std::deque<Hex> queue{start};
        compId[start] = id;
        while (!queue.empty()) {
            const Hex h = queue.front();
            queue.pop_front();
            c.hexes.push_back(h);
            hasTarget |= h == bHex;
            for (Hex n : neighbors(h)) {
                const std::int8_t s = ex.side(n);
                if (s == Explorer::kRight) {
                    touchRight = true;
                } else if (s == Explorer::kLeft) {
                    touchLeft = true;
                } else if (s == Explorer::kInside) {
                    if (mark[n] == 1)
                        touchB = true;
                    else if (mark[n] == 2)
                        touchY = true;
                    else if (compId[n] < 0) {
                        compId[n] = id;
                        queue.push_back(n);
                    }
                }
            }
        }
        if (hasTarget)
            c.type = 0;
        else if (touchY && !touchB)
            c.type = touchLeft ? 1 : 3;
        else if (touchB && !touchY)
            c.type = touchRight ? 2 : 4;
        if (!hasTarget)
            f.hexes.insert(f.hexes.end(), c.hexes.begin(), c.hexes.end());
        f.components.push_back(std::move(c));
    }
    std::sort(f.hexes.begin(), f.hexes.end(), [](Hex p, Hex q) { return p.r != q.r ? p.r < q.r : p.q < q.q; });
    return f;
}

} // namespace percsle

#pragma once

// Jordan sets of hexagons, their boundary loops, e-vertices and
// delta-approximations of catalogue domains.

#include "percsle/errors.hpp"
#include "percsle/hex.hpp"
#include "percsle/shapes.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace percsle {

/// Dense rectangular store over an axial (q, r) box.
template <class T>
class HexGrid {
public:
    HexGrid() = default;
    HexGrid(int q0, int r0, int q1, int r1, T fill = T{})
        : q0_(q0), r0_(r0), nq_(q1 - q0 + 1), nr_(r1 - r0 + 1), data_(static_cast<std::size_t>(nq_) * nr_, fill)
    {
    }

    bool in_box(Hex h) const { return h.q >= q0_ && h.q < q0_ + nq_ && h.r >= r0_ && h.r < r0_ + nr_; }
    std::size_t index(Hex h) const { return static_cast<std::size_t>(h.r - r0_) * nq_ + (h.q - q0_); }
    Hex hex_at(std::size_t i) const { return {q0_ + static_cast<int>(i % nq_), r0_ + static_cast<int>(i / nq_)}; }

    T get(Hex h, T outside = T{}) const { return in_box(h) ? data_[index(h)] : outside; }
    T& operator[](Hex h) { return data_[index(h)]; }
    const T& operator[](Hex h) const { return data_[index(h)]; }

    std::size_t size() const { return data_.size(); }
    std::vector<T>& raw() { return data_; }
    const std::vector<T>& raw() const { return data_; }
    int q0() const { return q0_; }
    int r0() const { return r0_; }
    int q1() const { return q0_ + nq_ - 1; }
    int r1() const { return r0_ + nr_ - 1; }

private:
    int q0_ = 0, r0_ = 0, nq_ = 0, nr_ = 0;
    std::vector<T> data_;
};

/// An e-vertex together with the boundary-walk step whose head it is.
struct EVertex {
    Vertex v;
    std::size_t step = 0;

    friend bool operator==(const EVertex& a, const EVertex& b) { return a.v == b.v; }
};

struct BoundaryArcs {
    std::vector<Hex> right;
    std::vector<Hex> left;
    std::vector<DirEdge> rightEdges;
    std::vector<DirEdge> leftEdges;
};

namespace detail {

inline constexpr std::uint8_t kOutside = 0;
inline constexpr std::uint8_t kInterior = 1;

inline HexGrid<std::uint8_t> grid_for(const std::vector<Hex>& hexes, int margin)
{
    int q0 = std::numeric_limits<int>::max(), r0 = q0, q1 = std::numeric_limits<int>::min(), r1 = q1;
    for (Hex h : hexes) {
        q0 = std::min(q0, h.q);
        r0 = std::min(r0, h.r);
        q1 = std::max(q1, h.q);
        r1 = std::max(r1, h.r);
    }
    HexGrid<std::uint8_t> g(q0 - margin, r0 - margin, q1 + margin, r1 + margin, kOutside);
    for (Hex h : hexes)
        g[h] = kInterior;
    return g;
}

/// Counterclockwise walk of the boundary edges of the component containing
/// the lowest interior hexagon. Each step has the exterior hexagon on the right.
inline std::vector<DirEdge> boundary_walk(const HexGrid<std::uint8_t>& g, Hex lowest)
{
    std::vector<DirEdge> walk;
    const DirEdge start{lowest + Hex{0, -1}, lowest};
    DirEdge e = start;
    const std::size_t cap = 6 * g.size() + 6;
    do {
        walk.push_back(e);
        const bool exterior = g.get(e.ahead()) != kInterior;
        e = e.turn(exterior);
        if (walk.size() > cap)
            throw InvalidDomain("boundary walk did not close");
    } while (!(e == start));
    return walk;
}

} // namespace detail

class LatticeDomain {
public:
    /// Builds a domain from an explicit hexagon set; throws InvalidDomain if it is
    /// not a Jordan set.
    static LatticeDomain from_hexes(std::vector<Hex> hexes, double delta)
    {
        if (hexes.empty())
            throw InvalidDomain("empty hexagon set");
        if (!(delta > 0))
            throw InvalidDomain("mesh must be positive");
        LatticeDomain d;
        d.delta_ = delta;
        std::sort(hexes.begin(), hexes.end(), [](Hex a, Hex b) { return a.r != b.r ? a.r < b.r : a.q < b.q; });
        hexes.erase(std::unique(hexes.begin(), hexes.end()), hexes.end());
        d.interior_ = std::move(hexes);
        d.grid_ = detail::grid_for(d.interior_, 2);
        d.walk_ = detail::boundary_walk(d.grid_, d.interior_.front());
        if (auto why = d.jordan_violation())
            throw InvalidDomain(*why);
        d.finish();
        return d;
    }

    double mesh() const { return delta_; }
    const std::vector<Hex>& interior() const { return interior_; }
    std::size_t size() const { return interior_.size(); }
    bool is_interior(Hex h) const { return grid_.get(h) == detail::kInterior; }
    /// Index of h in the s-boundary loop, or -1.
    int boundary_index(Hex h) const
    {
        const auto it = sIndex_.find(h);
        return it == sIndex_.end() ? -1 : static_cast<int>(it->second);
    }
    bool is_boundary(Hex h) const { return boundary_index(h) >= 0; }

    /// Counterclockwise boundary edges; `right` is the exterior hexagon.
    const std::vector<DirEdge>& walk() const { return walk_; }
    /// The external site boundary as a cyclic T-loop.
    const std::vector<Hex>& s_boundary() const { return sBoundary_; }
    /// s-boundary loop index of the exterior hexagon of each walk step.
    const std::vector<std::size_t>& walk_hex_index() const { return walkHex_; }
    const std::vector<EVertex>& e_vertices() const { return eVertices_; }
    const std::vector<EVertex>& marks() const { return marks_; }
    const HexGrid<std::uint8_t>& grid() const { return grid_; }

    std::optional<EVertex> find_e_vertex(Vertex v) const
    {
        for (const EVertex& e : eVertices_)
            if (e.v == v)
                return e;
        return std::nullopt;
    }

    /// Nearest e-vertex to p; ties go to the earlier walk step.
    EVertex nearest_e_vertex(cplx p) const
    {
        double best = std::numeric_limits<double>::infinity();
        EVertex out{};
        for (const EVertex& e : eVertices_) {
            const double dist = std::abs(vertex_position(e.v, delta_) - p);
            if (dist < best - 1e-12 * delta_) {
                best = dist;
                out = e;
            }
        }
        return out;
    }

    void set_marks(std::vector<EVertex> marks) { marks_ = std::move(marks); }

    /// Interior hexagon at an e-vertex.
    Hex e_vertex_hex(const EVertex& x) const { return walk_[x.step].left; }

    /// Edge e_x: between the two exterior hexagons at x, pointing into x.
    DirEdge entry_edge(const EVertex& x) const
    {
        const DirEdge before = walk_[x.step];
        const DirEdge after = walk_[(x.step + 1) % walk_.size()];
        return {after.right, before.right};
    }

    /// Walk steps strictly after x up to and including y (the counterclockwise arc x to y).
    std::vector<std::size_t> arc_steps(const EVertex& x, const EVertex& y) const
    {
        std::vector<std::size_t> steps;
        const std::size_t n = walk_.size();
        for (std::size_t i = (x.step + 1) % n;; i = (i + 1) % n) {
            steps.push_back(i);
            if (i == y.step)
                break;
        }
        return steps;
    }

    std::vector<Vertex> arc_vertices(const EVertex& x, const EVertex& y) const
    {
        std::vector<Vertex> out{x.v};
        for (std::size_t i : arc_steps(x, y))
            out.push_back(walk_[i].head());
        return out;
    }

private:
    std::optional<std::string> jordan_violation() const
    {
        // The walk must account for every boundary edge (connected interior, no holes)
        std::size_t edges = 0;
        for (Hex h : interior_)
            for (Hex n : neighbors(h))
                if (!is_interior(n))
                    ++edges;
        if (edges != walk_.size())
            return "hexagon set is not connected or has holes";
        // and every exterior hexagon must be met in exactly one run
        std::unordered_map<Hex, int, HexHash> runs;
        const std::size_t n = walk_.size();
        for (std::size_t i = 0; i < n; ++i)
            if (!(walk_[i].right == walk_[(i + n - 1) % n].right))
                ++runs[walk_[i].right];
        for (const auto& [h, count] : runs)
            if (count != 1)
                return "s-boundary is not a T-loop";
        return std::nullopt;
    }

    void finish()
    {
        const std::size_t n = walk_.size();
        // rotate so that step 0 starts a new exterior run
        std::size_t shift = 0;
        while (walk_[shift].right == walk_[(shift + n - 1) % n].right)
            ++shift;
        std::rotate(walk_.begin(), walk_.begin() + static_cast<std::ptrdiff_t>(shift), walk_.end());
        walkHex_.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0 || !(walk_[i].right == walk_[i - 1].right)) {
                sIndex_[walk_[i].right] = sBoundary_.size();
                sBoundary_.push_back(walk_[i].right);
            }
            walkHex_[i] = sBoundary_.size() - 1;
            if (!is_interior(walk_[i].ahead()))
                eVertices_.push_back({walk_[i].head(), i});
        }
    }

    double delta_ = 1;
    std::vector<Hex> interior_;
    HexGrid<std::uint8_t> grid_;
    std::vector<DirEdge> walk_;
    std::vector<Hex> sBoundary_;
    std::unordered_map<Hex, std::size_t, HexHash> sIndex_;
    std::vector<std::size_t> walkHex_;
    std::vector<EVertex> eVertices_;
    std::vector<EVertex> marks_;
};

/// Splits the boundary at e-vertices x and y. The right arc runs counterclockwise
/// from x to y. The exterior hexagon following x belongs to the right arc.
inline BoundaryArcs split_boundary(const LatticeDomain& d, const EVertex& x, const EVertex& y)
{
    if (x.v == y.v)
        throw SameVertex("split points coincide");
    BoundaryArcs arcs;
    const auto& walk = d.walk();
    auto push_hex = [](std::vector<Hex>& list, Hex h) {
        if (list.empty() || !(list.back() == h))
            list.push_back(h);
    };
    for (std::size_t i : d.arc_steps(x, y)) {
        arcs.rightEdges.push_back(walk[i]);
        push_hex(arcs.right, walk[i].right);
    }
    for (std::size_t i : d.arc_steps(y, x)) {
        arcs.leftEdges.push_back(walk[i]);
        push_hex(arcs.left, walk[i].right);
    }
    return arcs;
}

/// The external site boundary of the domain.
inline const std::vector<Hex>& boundary_loop(const LatticeDomain& d) { return d.s_boundary(); }

/// True if `loop` is a T-loop: consecutive hexagons adjacent (cyclically), no repeats.
inline bool is_t_loop(const std::vector<Hex>& loop)
{
    if (loop.size() < 3)
        return false;
    std::unordered_set<Hex, HexHash> seen;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        if (!seen.insert(loop[i]).second)
            return false;
        if (!adjacent(loop[i], loop[(i + 1) % loop.size()]))
            return false;
    }
    return true;
}

namespace detail {

/// Connected components (6-neighbour) of the cells flagged kInterior.
inline std::vector<std::vector<Hex>> components(const HexGrid<std::uint8_t>& g)
{
    std::vector<std::vector<Hex>> out;
    std::vector<char> seen(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.raw()[i] != kInterior || seen[i])
            continue;
        std::vector<Hex> comp;
        std::deque<Hex> queue{g.hex_at(i)};
        seen[i] = 1;
        while (!queue.empty()) {
            const Hex h = queue.front();
            queue.pop_front();
            comp.push_back(h);
            for (Hex n : neighbors(h)) {
                if (g.get(n) == kInterior && !seen[g.index(n)]) {
                    seen[g.index(n)] = 1;
                    queue.push_back(n);
                }
            }
        }
        out.push_back(std::move(comp));
    }
    return out;
}

/// Keeps the largest component and fills its holes. Returns false if nothing is left.
inline bool normalize(HexGrid<std::uint8_t>& g)
{
    auto comps = components(g);
    if (comps.empty())
        return false;
    std::size_t best = 0;
    for (std::size_t i = 1; i < comps.size(); ++i)
        if (comps[i].size() > comps[best].size())
            best = i;
    std::fill(g.raw().begin(), g.raw().end(), kOutside);
    for (Hex h : comps[best])
        g[h] = kInterior;
    // flood the outside from the box frame; whatever is not reached is a hole
    std::vector<char> outside(g.size(), 0);
    std::deque<Hex> queue;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Hex h = g.hex_at(i);
        if ((h.q == g.q0() || h.q == g.q1() || h.r == g.r0() || h.r == g.r1()) && g.raw()[i] != kInterior) {
            outside[i] = 1;
            queue.push_back(h);
        }
    }
    while (!queue.empty()) {
        const Hex h = queue.front();
        queue.pop_front();
        for (Hex n : neighbors(h)) {
            if (g.in_box(n) && g[n] != kInterior && !outside[g.index(n)]) {
                outside[g.index(n)] = 1;
                queue.push_back(n);
            }
        }
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!outside[i])
            g.raw()[i] = kInterior;
    return true;
}

/// One pruning pass: removes spikes and the smaller contacts of pinching
/// exterior hexagons. Returns the number of hexagons removed.
inline std::size_t prune_once(HexGrid<std::uint8_t>& g)
{
    std::vector<Hex> remove;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.raw()[i] != kInterior)
            continue;
        const Hex h = g.hex_at(i);
        int inner = 0;
        for (Hex n : neighbors(h))
            inner += g.get(n) == kInterior;
        if (inner <= 1)
            remove.push_back(h);
    }
    if (remove.empty()) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.raw()[i] == kInterior)
                continue;
            const Hex e = g.hex_at(i);
            // runs of interior neighbours around e, in direction order
            std::array<bool, 6> in{};
            int count = 0;
            for (int k = 0; k < 6; ++k) {
                in[k] = g.get(neighbor(e, k)) == kInterior;
                count += in[k];
            }
            if (count == 0 || count == 6)
                continue;
            int start = 0;
            while (in[start])
                ++start;
            std::vector<std::vector<int>> runs;
            for (int j = 1; j <= 6; ++j) {
                const int k = mod6(start + j);
                if (!in[k])
                    continue;
                if (!in[mod6(k - 1)])
                    runs.emplace_back();
                runs.back().push_back(k);
            }
            if (runs.size() <= 1)
                continue;
            std::size_t keep = 0;
            for (std::size_t j = 1; j < runs.size(); ++j)
                if (runs[j].size() > runs[keep].size())
                    keep = j;
            for (std::size_t j = 0; j < runs.size(); ++j)
                if (j != keep)
                    for (int k : runs[j])
                        remove.push_back(neighbor(e, k));
            break;
        }
    }
    for (Hex h : remove)
        g[h] = kOutside;
    return remove.size();
}

} // namespace detail

/// Delta-approximation of a catalogue domain: hexagons whose centers lie in the
/// closed domain, largest component, holes filled, pruned until the s-boundary
/// is a T-loop; marks snapped to the nearest e-vertices.
inline LatticeDomain build_delta_approximation(const MarkedDomain& md, double delta)
{
    if (!md.shape.bounded())
        throw InvalidDomain("cannot discretize an unbounded domain");
    if (!(delta > 0))
        throw InvalidDomain("mesh must be positive");
    const auto [lo, hi] = md.shape.bounding_box();
    const double s3 = std::sqrt(3.0);
    const int r0 = static_cast<int>(std::floor(lo.imag() / (1.5 * delta))) - 1;
    const int r1 = static_cast<int>(std::ceil(hi.imag() / (1.5 * delta))) + 1;
    const int q0 = static_cast<int>(std::floor(lo.real() / (s3 * delta) - 0.5 * r1)) - 1;
    const int q1 = static_cast<int>(std::ceil(hi.real() / (s3 * delta) - 0.5 * r0)) + 1;
    if (static_cast<double>(q1 - q0) * (r1 - r0) > 4e8)
        throw InvalidDomain("mesh too fine for the domain size");
    HexGrid<std::uint8_t> g(q0 - 2, r0 - 2, q1 + 2, r1 + 2, detail::kOutside);
    for (int r = r0; r <= r1; ++r)
        for (int q = q0; q <= q1; ++q)
            if (md.shape.contains(hex_center({q, r}, delta)))
                g[Hex{q, r}] = detail::kInterior;

    std::vector<Hex> hexes;
    for (int round = 0;; ++round) {
        if (!detail::normalize(g))
            throw MeshTooCoarse("no hexagon center lies in the domain");
        if (round > 100000)
            throw MeshTooCoarse("pruning did not converge");
        hexes.clear();
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.raw()[i] == detail::kInterior)
                hexes.push_back(g.hex_at(i));
        if (hexes.size() == 1)
            break;
        if (detail::prune_once(g) == 0)
            break;
    }
    if (hexes.empty())
        throw MeshTooCoarse("domain vanished while pruning");

    LatticeDomain d = [&] {
        try {
            return LatticeDomain::from_hexes(hexes, delta);
        } catch (const InvalidDomain& e) {
            throw MeshTooCoarse(e.what());
        }
    }();

    std::vector<EVertex> snapped;
    for (std::size_t i = 0; i < md.marks.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(md.mark_point(i) - md.mark_point(j)) < 4 * delta)
                throw MeshTooCoarse("marked points closer than 4 mesh units");
        const EVertex e = d.nearest_e_vertex(md.mark_point(i));
        for (const EVertex& prev : snapped)
            if (prev.v == e.v)
                throw MeshTooCoarse("two marks snap to the same e-vertex");
        snapped.push_back(e);
    }
    d.set_marks(std::move(snapped));
    return d;
}

/// Polyline of vertex positions along the counterclockwise arc x to y.
inline std::vector<cplx> arc_polyline(const LatticeDomain& d, const EVertex& x, const EVertex& y)
{
    std::vector<cplx> pts;
    for (Vertex v : d.arc_vertices(x, y))
        pts.push_back(vertex_position(v, d.mesh()));
    return pts;
}

} // namespace percsle

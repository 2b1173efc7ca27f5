#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <set>

using namespace percsle;

namespace {

using HexSet = std::set<std::pair<int, int>>;

HexSet as_set(const std::vector<Hex>& v)
{
    HexSet s;
    for (Hex h : v)
        s.insert({h.q, h.r});
    return s;
}

/// Checks the b-path property and the color rule of every edge.
template <class Color>
void expect_valid_path(const LatticeDomain& d, const ExplorationPath& p, const Color& color, const EVertex& a,
                       const EVertex& b)
{
    Explorer ex(d, a, b);
    ASSERT_FALSE(p.edges.empty());
    EXPECT_EQ(p.edges.front(), d.entry_edge(a));
    EXPECT_EQ(p.edges.front().head(), a.v);
    std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> seen;
    for (std::size_t i = 0; i < p.edges.size(); ++i) {
        const DirEdge& e = p.edges[i];
        EXPECT_TRUE(seen.insert({{e.right.q, e.right.r}, {e.left.q, e.left.r}}).second) << "edge repeats";
        if (i > 0) {
            EXPECT_EQ(p.edges[i - 1].head(), e.tail());
            const auto rs = ex.side(e.right), ls = ex.side(e.left);
            EXPECT_TRUE(rs == Explorer::kRight || (rs == Explorer::kInside && color(e.right)));
            EXPECT_TRUE(ls == Explorer::kLeft || (ls == Explorer::kInside && !color(e.left)));
        }
    }
}

LatticeDomain disc_domain(double delta) { return build_delta_approximation({Shape::disc(0, 1), {0.75, 0.25}}, delta); }

} // namespace

TEST(Exploration, DynamicMatchesStaticOnSmallDomains)
{
    for (const auto& nd : fixtures::small_domains()) {
        const std::size_t stride = nd.domain.size() <= 9 ? 1 : 4;
        const auto count = fixtures::exhaustive_equivalence(nd.domain, stride);
        EXPECT_GT(count.runs, 0u);
        EXPECT_EQ(count.mismatches, 0u) << nd.name;
    }
}

TEST(Exploration, ThreeHexagonsAllColorings)
{
    const LatticeDomain d = LatticeDomain::from_hexes({{0, 0}, {1, 0}, {0, 1}}, 1.0);
    const EVertex a = d.e_vertices()[0], b = d.e_vertices()[4];
    for (std::uint64_t mask = 0; mask < 8; ++mask) {
        const ExplicitColoring c = fixtures::coloring_from_mask(d, mask);
        const ExplorationPath p = explore(d, a, b, c);
        EXPECT_EQ(p.edges, static_interface(d, a, b, c).edges);
        EXPECT_EQ(p.end, EndState::ReachedTarget);
        EXPECT_EQ(p.tip(), b.v);
        expect_valid_path(d, p, c, a, b);
    }
}

TEST(Exploration, DynamicMatchesStaticOnRandomColorings)
{
    const LatticeDomain d = disc_domain(0.05);
    const EVertex a = d.marks()[0], b = d.marks()[1];
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const SeededColoring c(seed);
        const ExplorationPath p = explore(d, a, b, c);
        ASSERT_EQ(p.edges, static_interface(d, a, b, c).edges) << "seed " << seed;
        if (seed < 50)
            expect_valid_path(d, p, c, a, b);
    }
}

TEST(Exploration, SingleHexagonNeedsOneCoinFlip)
{
    // With one interior hexagon the path is forced once that hexagon's color is known.
    const LatticeDomain d = LatticeDomain::from_hexes({{0, 0}}, 1.0);
    const auto& ev = d.e_vertices();
    for (std::size_t i = 0; i < ev.size(); ++i)
        for (std::size_t j = 0; j < ev.size(); ++j) {
            if (i == j)
                continue;
            for (bool blue : {true, false}) {
                const ExplorationPath p = explore(d, ev[i], ev[j], ConstantColoring{blue});
                EXPECT_EQ(p.exploredBlue.size() + p.exploredYellow.size(), 1u);
                for (std::size_t k = 1; k < p.edges.size(); ++k)
                    EXPECT_EQ(blue ? p.edges[k].right : p.edges[k].left, (Hex{0, 0}));
            }
        }
}

TEST(Exploration, AllBlueHugsLeftBoundary)
{
    const LatticeDomain d = LatticeDomain::from_hexes(fixtures::parallelogram(5, 1), 1.0);
    const EVertex a = d.e_vertices()[1], b = d.e_vertices()[8];
    const ExplorationPath p = explore(d, a, b, ConstantColoring{true});
    // expected: the left arc walked from a to b with the boundary on the left
    const BoundaryArcs arcs = split_boundary(d, a, b);
    std::vector<DirEdge> expected{d.entry_edge(a)};
    for (auto it = arcs.leftEdges.rbegin(); it != arcs.leftEdges.rend(); ++it)
        expected.push_back(it->reversed());
    EXPECT_EQ(p.edges, expected);
    for (std::size_t k = 1; k < p.edges.size(); ++k)
        EXPECT_TRUE(d.is_interior(p.edges[k].right));
    EXPECT_TRUE(p.exploredYellow.empty());
}

TEST(Exploration, AllYellowHugsRightBoundary)
{
    const LatticeDomain d = LatticeDomain::from_hexes(fixtures::parallelogram(5, 1), 1.0);
    const EVertex a = d.e_vertices()[1], b = d.e_vertices()[8];
    const ExplorationPath p = explore(d, a, b, ConstantColoring{false});
    std::vector<DirEdge> expected{d.entry_edge(a)};
    const BoundaryArcs arcs = split_boundary(d, a, b);
    expected.insert(expected.end(), arcs.rightEdges.begin(), arcs.rightEdges.end());
    EXPECT_EQ(p.edges, expected);
    EXPECT_TRUE(p.exploredBlue.empty());
}

TEST(Exploration, ColorSwapReversesInterface)
{
    const LatticeDomain d = disc_domain(0.05);
    const EVertex a = d.marks()[0], b = d.marks()[1];
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const SeededColoring c(seed);
        auto flipped = [&](Hex h) { return !c(h); };
        const ExplorationPath p = explore(d, a, b, c);
        const ExplorationPath q = explore(d, b, a, flipped);
        ASSERT_EQ(p.edges.size(), q.edges.size());
        for (std::size_t k = 1; k < p.edges.size(); ++k)
            EXPECT_EQ(q.edges[k], p.edges[p.edges.size() - k].reversed());
        EXPECT_EQ(as_set(p.exploredBlue), as_set(q.exploredYellow));
    }
}

TEST(Exploration, ColorsAreQueryOrderIndependent)
{
    const SeededColoring c(77);
    std::vector<bool> forward, backward;
    for (int q = -300; q < 300; ++q)
        forward.push_back(c({q, 5 * q}));
    const SeededColoring fresh(77);
    for (int q = 299; q >= -300; --q)
        backward.push_back(fresh({q, 5 * q}));
    std::reverse(backward.begin(), backward.end());
    EXPECT_EQ(forward, backward);
}

TEST(Exploration, Reproducible)
{
    const LatticeDomain d = disc_domain(0.04);
    const EVertex a = d.marks()[0], b = d.marks()[1];
    const auto p1 = explore(d, a, b, SeededColoring(11));
    const auto p2 = explore(d, a, b, SeededColoring(11));
    EXPECT_EQ(p1.edges, p2.edges);
    EXPECT_EQ(p1.exploredBlue, p2.exploredBlue);
    EXPECT_NE(p1.edges, explore(d, a, b, SeededColoring(12)).edges);
}

TEST(Exploration, StepBudgetAndIncompleteColoring)
{
    const LatticeDomain d = LatticeDomain::from_hexes(fixtures::parallelogram(3, 3), 1.0);
    const EVertex a = d.e_vertices()[0], b = d.e_vertices()[7];
    EXPECT_THROW(static_interface(d, a, b, ExplicitColoring{}), IncompleteColoring);
    EXPECT_THROW(explore(d, a, a, ConstantColoring{}), SameVertex);
    Explorer ex(d, a, b);
    const ExplorationPath p = ex.run(ConstantColoring{true}, nullptr, 2);
    EXPECT_EQ(p.end, EndState::Truncated);
    EXPECT_EQ(p.edges.size(), 2u);
}

TEST(ExploreUntilArc, TargetAtEndpointEqualsExplore)
{
    const LatticeDomain d = disc_domain(0.05);
    const EVertex a = d.marks()[0], b = d.marks()[1];
    const ArcTarget t = make_vertex_target({b.v});
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const ArcHit h = explore_until_arc(d, a, b, SeededColoring(seed), t);
        EXPECT_EQ(h.path.edges, explore(d, a, b, SeededColoring(seed)).edges);
        EXPECT_EQ(h.hit, b.v);
    }
}

TEST(ExploreUntilArc, NeighborTargetStopsImmediately)
{
    const LatticeDomain d = disc_domain(0.05);
    const EVertex a = d.marks()[0], b = d.marks()[1];
    const std::size_t n = d.walk().size();
    const ArcTarget t = make_vertex_target({d.walk()[(a.step + 1) % n].head(), d.walk()[a.step].tail()});
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const ArcHit h = explore_until_arc(d, a, b, SeededColoring(seed), t);
        EXPECT_LE(h.path.edges.size(), 2u);
        EXPECT_TRUE(t.contains(h.hit));
    }
}

TEST(ExploreUntilArc, Errors)
{
    const LatticeDomain d = disc_domain(0.1);
    const EVertex a = d.marks()[0], b = d.marks()[1];
    EXPECT_THROW(explore_until_arc(d, a, b, SeededColoring(1), ArcTarget{}), TargetUnreachable);
    EXPECT_THROW(explore_until_arc(d, a, b, SeededColoring(1), make_vertex_target({a.v})), TargetUnreachable);
    EXPECT_THROW(explore_until_arc(d, a, b, SeededColoring(1), make_vertex_target({Vertex{1000, 1000, true}})),
                 TargetUnreachable);
}

TEST(ExploreUntilArc, HalfDiscFlatSideMeanMatchesCardy)
{
    // a at angle pi/3 on the arc, target the diameter from -1 to 1
    const double per = std::numbers::pi + 2;
    const MarkedDomain md{Shape::half_disc(0, 1), {(std::numbers::pi / 3) / per, std::numbers::pi / per, 0.0}};
    const HittingSetup s(md, 0.02);
    const std::size_t n = 10000;
    const auto hits = percolation_hits(s, n, 99, 1, "flat-side");
    double mean = 0, sq = 0;
    for (double x : hits) {
        mean += x;
        sq += x * x;
    }
    mean /= n;
    const double sd = std::sqrt(sq / n - mean * mean);
    // E[s] = integral of 1 - F over [0, 1] (composite Simpson)
    const HittingCdf F(md);
    const int m = 2000;
    double integral = 0;
    for (int i = 0; i <= m; ++i) {
        const double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
        integral += w * (1 - F(double(i) / m));
    }
    integral /= 3.0 * m;
    EXPECT_NEAR(mean, integral, 3 * sd / std::sqrt(double(n)));
    EXPECT_GT(integral, 0.5);
}

TEST(Fill, UnfinishedStraightPathFillsOnlyExploredSites)
{
    const LatticeDomain d = build_delta_approximation(rect_with_corner_marks(2.0), 0.1);
    const EVertex a = d.marks()[0], b = d.marks()[2];
    Explorer ex(d, a, b);
    const ExplorationPath p = ex.run(ConstantColoring{false}, nullptr, 6);
    const Filling f = fill(p, d, b);
    std::vector<Hex> explored = p.exploredBlue;
    explored.insert(explored.end(), p.exploredYellow.begin(), p.exploredYellow.end());
    EXPECT_EQ(as_set(f.hexes), as_set(explored));
    ASSERT_EQ(f.components.size(), 1u);
    EXPECT_EQ(f.components[0].type, 0);
    EXPECT_EQ(f.tip, p.tip());
}

TEST(Fill, FjordMatchesReachabilityOracle)
{
    const LatticeDomain d = LatticeDomain::from_hexes(fixtures::fjord(), 1.0);
    const auto& ev = d.e_vertices();
    const HexSet interior = as_set(d.interior());
    std::size_t checked = 0;
    for (std::size_t i = 0; i < ev.size(); i += 5)
        for (std::size_t j = 2; j < ev.size(); j += 6) {
            if (i == j)
                continue;
            Explorer ex(d, ev[i], ev[j]);
            for (std::uint64_t mask = 0; mask < 4096; mask += 7) {
                const ExplicitColoring c = fixtures::coloring_from_mask(d, mask);
                const std::size_t full = ex.run(c).edges.size();
                for (std::size_t len = 1; len <= full; len += 3) {
                    const ExplorationPath p = ex.run(c, nullptr, len);
                    HexSet explored = as_set(p.exploredBlue);
                    for (Hex h : p.exploredYellow)
                        explored.insert({h.q, h.r});
                    HexSet open;
                    for (const auto& h : interior)
                        if (!explored.count(h))
                            open.insert(h);
                    const HexSet reach = oracle::reachable(d.e_vertex_hex(ev[j]), open);
                    HexSet expected;
                    for (const auto& h : interior)
                        if (!reach.count(h))
                            expected.insert(h);
                    ASSERT_EQ(as_set(fill(p, d, ev[j]).hexes), expected);
                    ++checked;
                }
            }
        }
    EXPECT_GT(checked, 1000u);
}

TEST(Fill, ComponentsPartitionAndTypes)
{
    const LatticeDomain d = disc_domain(0.08);
    const EVertex a = d.marks()[0], b = d.marks()[1];
    Explorer ex(d, a, b);
    int typesSeen = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const SeededColoring c(seed);
        const ExplorationPath p = ex.run(c);
        const Filling f = fill(p, d, b);
        HexSet explored = as_set(p.exploredBlue);
        for (Hex h : p.exploredYellow)
            explored.insert({h.q, h.r});
        const HexSet blue = as_set(p.exploredBlue), yellow = as_set(p.exploredYellow);
        HexSet covered;
        for (const FillComponent& comp : f.components) {
            bool tb = false, ty = false, tl = false, tr = false;
            for (Hex h : comp.hexes) {
                ASSERT_TRUE(d.is_interior(h));
                ASSERT_FALSE(explored.count({h.q, h.r}));
                ASSERT_TRUE(covered.insert({h.q, h.r}).second) << "components overlap";
                for (Hex n : neighbors(h)) {
                    tb |= blue.count({n.q, n.r}) > 0;
                    ty |= yellow.count({n.q, n.r}) > 0;
                    tl |= ex.side(n) == Explorer::kLeft;
                    tr |= ex.side(n) == Explorer::kRight;
                }
            }
            int expected = 0;
            if (ty && !tb)
                expected = tl ? 1 : 3;
            else if (tb && !ty)
                expected = tr ? 2 : 4;
            EXPECT_EQ(comp.type, expected);
            EXPECT_NE(comp.type, 0) << "a completed path leaves nothing connected to b";
            typesSeen |= 1 << comp.type;
        }
        EXPECT_EQ(covered.size() + explored.size(), d.size());
        EXPECT_EQ(f.hexes.size(), d.size());
    }
    EXPECT_EQ(typesSeen & 0b11110, 0b11110) << "all four component types occur";
}

TEST(Arms, AllBlueHasNoArms)
{
    const ArmCount c = annulus_arm_count(ConstantColoring{true}, Hex{0, 0}, 3, 12);
    EXPECT_EQ(c.armCount, 0);
    EXPECT_EQ(c.strands, 0);
}

TEST(Arms, StraightColorBoundaryGivesTwo)
{
    // blue above the line through the center, yellow below
    auto blue = [](Hex h) { return h.r >= 0; };
    const ArmCount c = annulus_arm_count(blue, Hex{0, 0}, 3, 12);
    EXPECT_EQ(c.armCount, 2);
    EXPECT_EQ(c.colorPattern.size(), 2u);
}

TEST(Arms, AlternatingSectorsGiveSix)
{
    auto blue = [](Hex h) {
        const cplx z = hex_center(h, kUnitDelta);
        const double a = std::arg(z) + std::numbers::pi;
        return static_cast<int>(a / (std::numbers::pi / 3)) % 2 == 0;
    };
    EXPECT_EQ(annulus_arm_count(blue, Hex{0, 0}, 3, 15).armCount, 6);
}

TEST(Crossing, RhombusDualityPerConfiguration)
{
    // blue left-right crossing and yellow top-bottom crossing are complementary
    const MarkedDomain md = rhombus_domain(1.0 / 40);
    const LatticeDomain d = build_delta_approximation(md, 1.0 / 40);
    CrossingDetector blueLR(d);
    MarkedDomain rotated = md;
    std::rotate(rotated.marks.begin(), rotated.marks.begin() + 1, rotated.marks.end());
    const LatticeDomain dr = build_delta_approximation(rotated, 1.0 / 40);
    CrossingDetector yellowTB(dr);
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const SeededColoring c(seed);
        const bool lr = blueLR.blue_crossing(c);
        const bool tb = yellowTB.blue_crossing([&](Hex h) { return !c(h); });
        ASSERT_NE(lr, tb) << "seed " << seed;
    }
}

#pragma once

// Small lattice domains shared by the exploration tests and the acceptance run.

#include "percsle/percsle.hpp"

#include <string>
#include <vector>

namespace fixtures {

using namespace percsle;

struct NamedDomain {
    std::string name;
    LatticeDomain domain;
};

inline std::vector<Hex> flower()
{
    std::vector<Hex> out{{0, 0}};
    for (Hex n : neighbors({0, 0}))
        out.push_back(n);
    return out;
}

inline std::vector<Hex> parallelogram(int w, int h)
{
    std::vector<Hex> out;
    for (int r = 0; r < h; ++r)
        for (int q = 0; q < w; ++q)
            out.push_back({q, r});
    return out;
}

/// A 12-hexagon domain with a one-hexagon-wide fjord between two arms.
inline std::vector<Hex> fjord()
{
    return {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {0, 1}, {4, 1}, {-1, 2}, {3, 2}, {-1, 3}, {3, 3}, {-2, 4}};
}

/// Every domain with at most 12 hexagons used by the equivalence checks.
inline std::vector<NamedDomain> small_domains()
{
    std::vector<NamedDomain> out;
    auto add = [&](std::string name, std::vector<Hex> hexes) {
        out.push_back({std::move(name), LatticeDomain::from_hexes(std::move(hexes), 1.0)});
    };
    add("single", {{0, 0}});
    add("pair", {{0, 0}, {1, 0}});
    add("triangle3", {{0, 0}, {1, 0}, {0, 1}});
    add("line3", {{0, 0}, {1, 0}, {2, 0}});
    add("bent4", {{0, 0}, {1, 0}, {2, 0}, {2, 1}});
    add("line5", parallelogram(5, 1));
    add("flower7", flower());
    add("rhombus9", parallelogram(3, 3));
    add("zigzag10", {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {3, 2}, {3, 3}, {4, 3}, {4, 4}, {5, 4}});
    add("block12", parallelogram(4, 3));
    add("fjord12", fjord());
    return out;
}

/// Coloring of a domain's interior from the bits of `mask`, in interior order.
inline ExplicitColoring coloring_from_mask(const LatticeDomain& d, std::uint64_t mask)
{
    ExplicitColoring c;
    for (std::size_t i = 0; i < d.size(); ++i)
        c.set(d.interior()[i], (mask >> i) & 1u);
    return c;
}

struct EquivalenceCount {
    std::size_t runs = 0;
    std::size_t mismatches = 0;
};

/// Compares explore() with static_interface() on every coloring of d, for every
/// ordered pair of e-vertices taken `stride` apart in the e-vertex list.
inline EquivalenceCount exhaustive_equivalence(const LatticeDomain& d, std::size_t stride = 1)
{
    EquivalenceCount out;
    const auto& ev = d.e_vertices();
    const std::uint64_t colorings = std::uint64_t{1} << d.size();
    for (std::size_t i = 0; i < ev.size(); i += stride)
        for (std::size_t j = 0; j < ev.size(); j += stride) {
            if (i == j)
                continue;
            Explorer ex(d, ev[i], ev[j]);
            for (std::uint64_t mask = 0; mask < colorings; ++mask) {
                const ExplicitColoring c = coloring_from_mask(d, mask);
                const ExplorationPath dyn = ex.run(c);
                const ExplorationPath stat = static_interface(d, ev[i], ev[j], c);
                ++out.runs;
                if (dyn.edges != stat.edges)
                    ++out.mismatches;
            }
        }
    return out;
}

} // namespace fixtures

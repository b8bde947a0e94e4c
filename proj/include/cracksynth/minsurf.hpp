#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cracksynth/complex.hpp"
#include "cracksynth/graph_paths.hpp"
#include "cracksynth/ip_solver.hpp"

namespace cracksynth {

// A set of facets whose oriented chain boundary equals the source cycle.
struct Surface {
    std::vector<int> facets;              // unoriented facet ids, ascending
    std::vector<std::int8_t> orientation;  // +1 stored orientation, -1 reversed
    double weight = 0.0;
    Cycle source_cycle;
    int component_count = 0;  // facet-adjacency components (1 = connected)
    bool connected() const { return component_count <= 1; }

    IpSolution solver_stats;
};

// Arc/facet incidence system for the surface problem: two variables per
// facet (stored orientation and its reverse, both costing w(f)), one row per
// arc of the complex. Row entries carry the facet/arc coherence sign; the
// right-hand side is the cycle's chain vector. Throws InvalidCycleError when
// h is not a simple closed cycle on the complex.
BinaryProgram msp_as_ip(const CellComplex& k, const Cycle& h);

// Exact minimum-weight surface bounded by h, solved through the binary
// program above. Postconditions checked before returning: the integer chain
// boundary of the output equals h's chain vector, and no facet is selected
// in both orientations. Throws InfeasibleError / NodeLimitError from the
// solver.
Surface min_weight_surface(const CellComplex& k, const Cycle& h, const SolveOptions& opts = {});

// Integer chain boundary D*y of an oriented facet set: arcs with nonzero net
// coefficient, as (arc id, coefficient) pairs in ascending arc order.
std::vector<std::pair<int, int>> surface_boundary(const CellComplex& k, const Surface& s);

// Chain vector of a cycle in the same (arc id, coefficient) form.
std::vector<std::pair<int, int>> cycle_chain(const CellComplex& k, const Cycle& h);

// Facet-id list in a small text format (one id + orientation per line).
void save_surface(const Surface& s, const std::string& path);
Surface load_surface(const CellComplex& k, const std::string& path);

}  // namespace cracksynth

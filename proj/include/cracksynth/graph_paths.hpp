#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cracksynth/complex.hpp"
#include "cracksynth/ip_solver.hpp"

namespace cracksynth {

// Arc predicate for path queries; arcs failing the filter are ignored.
using ArcFilter = std::function<bool(int arc_id)>;

ArcFilter accept_all_arcs();
// Arcs that lie on the boundary of Q (member of some boundary facet).
ArcFilter boundary_arcs(const CellComplex& k);

// Walk on the bidirected arc graph. dirs[i] = +1 when arc i is traversed
// tail->head, -1 otherwise. weight = sum of arc weights along the walk.
struct Path {
    std::vector<int> vertices;       // v0 .. vk
    std::vector<int> arcs;           // k entries
    std::vector<std::int8_t> dirs;   // k entries
    double weight = 0.0;
};

// Simple closed cycle; vertices[0] is the start, the closing arc leads back
// to it. Arc signs follow the traversal orientation.
struct Cycle {
    std::vector<int> vertices;
    std::vector<int> arcs;
    std::vector<std::int8_t> dirs;
    double weight = 0.0;
};

// Minimum-weight s-t path over arcs passing the filter, treating every arc
// as traversable in both directions. Among minimum-weight paths the
// lexicographically smallest vertex sequence is returned. Throws
// UnreachableError when no path exists.
Path dijkstra(const CellComplex& k, int s, int t, const ArcFilter& filter = accept_all_arcs());

// Variant on an explicit arc list (tail, head, weight), used by generic
// graph tests and the IP cross-checks.
struct GraphArc {
    int tail = 0;
    int head = 0;
    double weight = 1.0;
};
Path dijkstra_on_arcs(int num_vertices, const std::vector<GraphArc>& arcs, int s, int t,
                      const std::function<bool(int)>& filter = {});

// Cycle around the cuboid built from four boundary-restricted shortest
// paths between vertices picked on the four vertical edges of Q (nearest to
// the requested relative heights). Overlapping path segments are excised;
// if no simple cycle of length >= 3 remains, DegenerateCycleError is thrown.
Cycle boundary_cycle(const CellComplex& k, const Cuboid& q,
                     const std::array<double, 4>& edge_heights);

// Shortest-path problem as a binary program: two variables per filtered arc
// (one per traversal direction), flow conservation rows with +1 at the tail
// and -1 at the head of each directed copy, demand +1 at s and -1 at t.
BinaryProgram spp_as_ip(const CellComplex& k, int s, int t,
                        const ArcFilter& filter = accept_all_arcs());
BinaryProgram spp_as_ip_on_arcs(int num_vertices, const std::vector<GraphArc>& arcs, int s, int t,
                                const std::function<bool(int)>& filter = {});

// Vertices of the complex lying on vertical edge `edge` (0..3) of Q, in
// order of ascending z. Edge 0 is (0,0,*), then (d1,0,*), (d1,d2,*),
// (0,d2,*).
std::vector<int> vertices_on_vertical_edge(const CellComplex& k, const Cuboid& q, int edge);

// JSON sidecar with ordered vertex ids and a sign per arc.
void save_cycle(const Cycle& c, const std::string& path);
Cycle load_cycle(const CellComplex& k, const std::string& path);

}  // namespace cracksynth

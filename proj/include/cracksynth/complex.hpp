#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cracksynth/geometry.hpp"
#include "cracksynth/voronoi.hpp"

namespace cracksynth {

// Cellular complex K=(V,A,F,C) induced by a bounded Voronoi diagram.
//
// Arcs are stored with one fixed direction each (tail < head by vertex id);
// facet loops record a coherence sign per arc: +1 when the loop traverses
// the arc tail->head, -1 otherwise. The stored facet orientation is
// counterclockwise as seen from the incident cell with the smaller
// generator id (for boundary facets: as seen from inside Q).
struct CellComplex {
    struct Arc {
        int tail = -1;
        int head = -1;
        double weight = 1.0;
        bool on_boundary = false;  // belongs to some facet on the boundary of Q
    };

    struct Facet {
        std::vector<int> arcs;            // loop order
        std::vector<std::int8_t> coherence;  // +1 / -1 per loop position
        double weight = 1.0;
        int cell_a = -1;        // incident cell (smaller generator id)
        int cell_b = -1;        // other incident cell, -1 for boundary facets
        int cuboid_face = -1;   // 0..5 when the facet lies on that face of Q
        bool on_boundary() const { return cuboid_face >= 0; }
    };

    struct Cell {
        int generator = -1;
        // (facet id, side): side is +1 when the stored facet orientation has
        // its normal pointing out of this cell, -1 when pointing in.
        std::vector<std::pair<int, std::int8_t>> facet_sides;
    };

    Cuboid domain;
    std::vector<Vec3> vertices;
    std::vector<Arc> arcs;
    std::vector<Facet> facets;
    std::vector<Cell> cells;

    int euler_characteristic() const {
        return static_cast<int>(vertices.size()) - static_cast<int>(arcs.size()) +
               static_cast<int>(facets.size()) - static_cast<int>(cells.size());
    }

    // Vertex loop of a facet, starting at the tail of its first loop arc
    // under the arc's coherence.
    std::vector<int> facet_vertex_loop(int facet_id) const;

    Vec3 facet_centroid(int facet_id) const;
    double facet_area(int facet_id) const;
    double arc_length(int arc_id) const;
};

enum class ArcWeightMode { Unit, Length };
enum class FacetWeightMode { Unit, Area };

std::string to_string(ArcWeightMode m);
std::string to_string(FacetWeightMode m);
ArcWeightMode arc_weight_mode_from_string(const std::string& s);
FacetWeightMode facet_weight_mode_from_string(const std::string& s);

// Merges cell geometry into one consistent complex: vertices deduplicated at
// tolerance eps (non-positive: 1e-9 * diam(Q)), facets matched across their
// two incident cells, arcs deduplicated as undirected edges. Throws
// InconsistentGeometryError when facet matching fails or the Euler relation
// V-E+F-C=1 breaks.
CellComplex extract_complex(const std::vector<VoronoiCell>& cells, const Cuboid& domain,
                            double eps = 0.0);

// Sets c(a) and w(f) to 1 or to Euclidean length / polygon area. All weights
// must come out strictly positive; a degenerate arc or facet raises
// ZeroWeightError.
void assign_weights(CellComplex& k, ArcWeightMode arc_mode, FacetWeightMode facet_mode);

// Line-oriented text format; round-trips bit-exactly.
void save_complex(const CellComplex& k, const std::string& path);
CellComplex load_complex(const std::string& path);

}  // namespace cracksynth

#pragma once

#include <vector>

#include "cracksynth/geometry.hpp"
#include "cracksynth/point_process.hpp"

namespace cracksynth {

// Identifies what lies on the other side of a cell face: another cell's
// generator, or one of the six planes of the bounding cuboid.
// Cuboid face ids: 0: x=0, 1: x=d1, 2: y=0, 3: y=d2, 4: z=0, 5: z=d3.
struct FaceNeighbor {
    enum class Kind { Generator, CuboidFace } kind = Kind::CuboidFace;
    int id = 0;

    static FaceNeighbor generator(int g) { return {Kind::Generator, g}; }
    static FaceNeighbor cuboid(int f) { return {Kind::CuboidFace, f}; }
    bool is_boundary() const { return kind == Kind::CuboidFace; }
};

// One bounded Voronoi cell: a convex polytope obtained by clipping the
// cuboid against bisector planes. Face loops are counterclockwise as seen
// from outside the cell.
struct VoronoiCell {
    int generator_id = -1;
    Vec3 generator;
    std::vector<Vec3> vertices;
    struct Face {
        std::vector<int> loop;  // indices into vertices
        FaceNeighbor neighbor;
    };
    std::vector<Face> faces;

    double volume() const;
    Vec3 centroid_of_face(const Face& f) const;
};

// Options for the cell construction. eps scales degeneracy handling during
// clipping; non-positive means the default 1e-9 * diam(Q).
struct VoronoiOptions {
    double eps = 0.0;
    int threads = 1;
};

// Clips the Voronoi diagram of the pattern against its cuboid, one convex
// cell per generator. Cells partition Q up to measure zero. Neighbor planes
// are applied nearest-first and pruned with the security-radius criterion
// (a generator beyond twice the current max vertex distance cannot cut),
// which is exact. Throws DegenerateInputError if two generators coincide
// within 1e-9 * diam(Q).
std::vector<VoronoiCell> build_bounded_voronoi(const PointPattern& pattern, const Cuboid& q,
                                               const VoronoiOptions& opts = {});

}  // namespace cracksynth

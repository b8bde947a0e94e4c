#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "cracksynth/complex.hpp"
#include "cracksynth/minsurf.hpp"
#include "cracksynth/volume.hpp"
#include "cracksynth/voronoi.hpp"

namespace cracksynth {

// Per-slice Bernoulli random-walk dilation parameters. The structuring
// element is fixed: 2x2 in-slice, anchored so one application adds the
// voxels at offsets {0,1}x{0,1} of every foreground voxel.
struct DilationSpec {
    double p = 0.0;  // walk increment probability, in [0,1]
    std::uint64_t seed = 0;
};

using GeneratorPair = std::pair<int, int>;  // unordered, stored (min,max)

// Voxel labeling of a diagram: each voxel center (sampled at +0.5 in world
// units scaled onto `domain`) gets the id of the nearest generator, ties to
// the lowest id. Exact nearest-neighbor search on a bucket grid.
LabelVolume rasterize_labels(const std::vector<VoronoiCell>& cells, const Cuboid& domain, int d1,
                             int d2, int d3, int threads = 1);

// Generator-id pairs of the interior facets of a surface (boundary facets
// have a single incident cell and discretize to nothing).
std::set<GeneratorPair> surface_generator_pairs(const CellComplex& k, const Surface& s);

// Binary discretization of a surface: voxel v is foreground iff some
// 26-neighbor v' exists with {label(v), label(v')} among the surface pairs.
BinaryVolume rasterize_surface(const LabelVolume& labels, const std::set<GeneratorPair>& pairs);

// Dilates every x-slice iteratively; slice x receives W(x) iterations where
// W is the running sum of Bernoulli(p) increments with W(0)=0. Increment x
// is drawn from the substream (seed, x), so slices can be processed in any
// order.
BinaryVolume adaptive_dilate(const BinaryVolume& j, const DilationSpec& spec);

// Number of dilation iterations applied to each slice for the given spec.
std::vector<int> dilation_walk(int d1, const DilationSpec& spec);

// Replaces the crack by the union of all cells of a finer Poisson-Voronoi
// diagram that the crack intersects. The diagram has intensity fine_lambda
// over the volume's extent. With zero fine points the input is returned
// unchanged.
BinaryVolume apply_microstructure(const BinaryVolume& j, double fine_lambda, std::uint64_t seed,
                                  int threads = 1);

// Majority vote over the (2r+1)^3 window, zero-padded at the borders.
BinaryVolume median_filter_binary(const BinaryVolume& j, int radius = 1);

// Voxelwise logical OR. Throws DimensionMismatchError.
BinaryVolume union_branching(const BinaryVolume& j1, const BinaryVolume& j2);

}  // namespace cracksynth

#pragma once

#include <cstdint>
#include <string>

#include "cracksynth/volume.hpp"

namespace cracksynth {

struct GrayStats {
    double mean = 0.0;
    double std = 0.0;
    enum class Source { EstimatedFromPores, Manual } source = Source::Manual;
};

// Sample mean and sample standard deviation (n-1 denominator) of the patch
// grayvalues under the mask. Throws InsufficientSamplesError below two
// foreground voxels, DimensionMismatchError on dim disagreement.
GrayStats estimate_pore_stats(const GrayVolume& patch, const BinaryVolume& pore_mask);

// Mask of voxels with grayvalue strictly below the threshold (simple pore
// detector for CT patches).
BinaryVolume threshold_mask(const GrayVolume& patch, std::uint16_t threshold);

// Flat background of value mu with additive white Gaussian noise, rounded
// and clamped to the uint16 range. Counter-based per-voxel randomness.
GrayVolume synthetic_background(int d1, int d2, int d3, double mu, double noise_std,
                                std::uint64_t seed);

// Embeds a binary ground truth into a grayscale patch:
//   1. crack voxels are zeroed (multiplication with the inverted mask),
//   2. then redrawn i.i.d. from N(mean, std^2), rounded and clamped,
//   3. a separable Gaussian blur (kernel truncated at 3*sigma and
//      renormalized, borders renormalized over the valid support) is
//      computed over the volume and written back only at crack voxels and
//      their 26-neighbors.
// Voxels outside that halo are returned bit-identical. Deterministic in
// (seed); per-voxel counter-based sampling.
GrayVolume embed_crack(const GrayVolume& patch, const BinaryVolume& gt, const GrayStats& stats,
                       double sigma, std::uint64_t seed);

}  // namespace cracksynth

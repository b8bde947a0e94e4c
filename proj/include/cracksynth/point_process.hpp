#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cracksynth/geometry.hpp"

namespace cracksynth {

enum class PointModelKind { Poisson, MaternCluster, Hardcore };

// Tagged description of the stochastic model that produced a pattern.
// Unused parameters of a given kind stay at zero.
struct PointModel {
    PointModelKind kind = PointModelKind::Poisson;
    double lambda = 0.0;           // Poisson intensity / parent intensity / hardcore intensity
    double mu = 0.0;               // Matern: mean daughters per parent
    double radius = 0.0;           // Matern: cluster radius
    double volume_fraction = 0.0;  // hardcore: packed sphere volume fraction
};

std::string to_string(PointModelKind kind);
PointModelKind point_model_kind_from_string(const std::string& s);

// Generator points in a cuboid together with their provenance. Every point
// satisfies 0 <= x_k < d_k.
struct PointPattern {
    std::vector<Vec3> points;
    Cuboid cuboid;
    PointModel model;
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
};

// Homogeneous Poisson process of the given intensity per unit volume.
// The count is Poisson(lambda*|Q|); points are i.i.d. uniform in Q.
PointPattern sample_poisson(double lambda, const Cuboid& q, std::uint64_t seed);

// Matern cluster process: Poisson(lambda_parent) parents on Q dilated by r
// (so cluster intensity is stationary across Q), Poisson(mu_daughter)
// daughters per parent uniform in the ball of radius r, daughters outside Q
// discarded.
PointPattern sample_matern_cluster(double lambda_parent, double mu_daughter, double r,
                                   const Cuboid& q, std::uint64_t seed);

// Hardcore pattern of exactly round(lambda*|Q|) points at the given sphere
// volume fraction, produced by force-biased packing. Guarantees
// min pairwise distance >= 2*r_hard with
// r_hard = (3*volume_fraction*|Q| / (4*pi*count))^(1/3).
// Throws NonConvergenceError if overlaps cannot be removed in max_sweeps.
PointPattern sample_hardcore(double lambda, double volume_fraction, const Cuboid& q,
                             std::uint64_t seed, std::uint64_t max_sweeps = 100000);

// Hard-sphere radius implied by (count, volume fraction, box volume).
double hardcore_radius(std::uint64_t count, double volume_fraction, double box_volume);

// CSV (x,y,z per line, '.' decimal, LF) plus a JSON sidecar with model,
// parameters and seed. Round-trips bit-exactly.
void save_point_pattern(const PointPattern& p, const std::string& csv_path,
                        const std::string& json_path);
PointPattern load_point_pattern(const std::string& csv_path, const std::string& json_path);

}  // namespace cracksynth

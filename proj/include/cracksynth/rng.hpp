#pragma once

#include <cmath>
#include <cstdint>

#include "cracksynth/geometry.hpp"

namespace cracksynth {

// Counter-based pseudo-random generator. The output at counter i is a pure
// function of (key, i), so substreams can be split off for parallel work and
// any value can be addressed directly without generating its predecessors.
// The mixing function is the splitmix64 finalizer over a Weyl sequence.
class Rng {
  public:
    Rng() = default;
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + kGolden) ^ mix(stream ^ kStreamSalt))) {}

    // Independent child generator; children with distinct ids do not collide.
    Rng split(std::uint64_t child_id) const {
        Rng r;
        r.key_ = mix(key_ ^ mix(child_id + kGolden));
        return r;
    }

    std::uint64_t next_u64() { return at(counter_++); }

    // Uniform in [0,1) with 53 random bits.
    double next_double() { return to_unit(next_u64()); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Stateless access by counter; does not advance the stream.
    std::uint64_t at(std::uint64_t counter) const { return mix(key_ + counter * kGolden); }
    double double_at(std::uint64_t counter) const { return to_unit(at(counter)); }

    // Standard normal variate addressed by counter (consumes counters 2c and
    // 2c+1 of a dedicated substream; see normal()).
    double normal_at(std::uint64_t counter) const {
        double u1 = double_at(2 * counter);
        double u2 = double_at(2 * counter + 1);
        // Box-Muller; 1-u1 keeps the log argument in (0,1].
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal() {
        double u1 = next_double();
        double u2 = next_double();
        return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
    }
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double exponential() {
        // Inverse CDF; argument stays in (0,1].
        return -std::log(1.0 - next_double());
    }

    // Poisson count by counting unit-rate exponential arrivals in [0,mean].
    // O(mean) but numerically safe for any mean.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::uint64_t count = 0;
        double t = exponential();
        while (t <= mean) {
            ++count;
            t += exponential();
        }
        return count;
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform point in the half-open box [0,d1)x[0,d2)x[0,d3).
    Vec3 point_in_cuboid(const Cuboid& q) {
        return {clamp_below(next_double() * q.d1, q.d1), clamp_below(next_double() * q.d2, q.d2),
                clamp_below(next_double() * q.d3, q.d3)};
    }

    // Uniform point in the closed ball of given radius around the origin
    // (rejection from the bounding cube).
    Vec3 point_in_ball(double radius) {
        for (;;) {
            Vec3 p{uniform(-radius, radius), uniform(-radius, radius), uniform(-radius, radius)};
            if (norm2(p) <= radius * radius) return p;
        }
    }

    std::uint64_t counter() const { return counter_; }

  private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kStreamSalt = 0x5851F42D4C957F2Dull;
    static constexpr double kPi = 3.14159265358979323846;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    static double to_unit(std::uint64_t u) {
        return static_cast<double>(u >> 11) * 0x1.0p-53;
    }

    // Multiplying a [0,1) double by the extent can round up to the extent;
    // pull such results back inside the half-open interval.
    static double clamp_below(double v, double hi) {
        return v < hi ? v : std::nextafter(hi, 0.0);
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace cracksynth

#pragma once

#include <cmath>
#include <cstdint>

#include "cracksynth/errors.hpp"

namespace cracksynth {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec3& operator-=(const Vec3& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }
inline double dist2(const Vec3& a, const Vec3& b) { return norm2(a - b); }
inline double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec3{};
}

// Axis-aligned box [0,d1]x[0,d2]x[0,d3]. Extents are world units; the raster
// stage also reads them as voxel counts (one world unit per voxel).
struct Cuboid {
    double d1 = 1.0, d2 = 1.0, d3 = 1.0;

    Cuboid() = default;
    Cuboid(double a, double b, double c) : d1(a), d2(b), d3(c) {
        if (!(d1 > 0.0) || !(d2 > 0.0) || !(d3 > 0.0))
            throw ConfigError("cuboid extents must be strictly positive");
    }

    double extent(int axis) const { return axis == 0 ? d1 : (axis == 1 ? d2 : d3); }
    double volume() const { return d1 * d2 * d3; }
    double diameter() const { return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3); }

    bool contains_half_open(const Vec3& p) const {
        return p.x >= 0.0 && p.x < d1 && p.y >= 0.0 && p.y < d2 && p.z >= 0.0 && p.z < d3;
    }
    bool contains_closed(const Vec3& p, double tol = 0.0) const {
        return p.x >= -tol && p.x <= d1 + tol && p.y >= -tol && p.y <= d2 + tol && p.z >= -tol &&
               p.z <= d3 + tol;
    }
};

}  // namespace cracksynth

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cracksynth/errors.hpp"

namespace cracksynth {

// Dense 3D voxel grid, row-major with x slowest:
// index = (x * d2 + y) * d3 + z.
template <typename T>
struct Volume {
    int d1 = 0, d2 = 0, d3 = 0;
    std::vector<T> data;

    Volume() = default;
    Volume(int x, int y, int z, T fill = T{})
        : d1(x), d2(y), d3(z), data(static_cast<std::size_t>(x) * y * z, fill) {
        if (x <= 0 || y <= 0 || z <= 0) throw ConfigError("volume dims must be positive");
    }

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(x) * d2 + y) * d3 + z;
    }
    T& at(int x, int y, int z) { return data[index(x, y, z)]; }
    const T& at(int x, int y, int z) const { return data[index(x, y, z)]; }
    bool in_bounds(int x, int y, int z) const {
        return x >= 0 && x < d1 && y >= 0 && y < d2 && z >= 0 && z < d3;
    }
    std::size_t size() const { return data.size(); }
    bool same_dims(int x, int y, int z) const { return d1 == x && d2 == y && d3 == z; }

    bool operator==(const Volume& o) const {
        return d1 == o.d1 && d2 == o.d2 && d3 == o.d3 && data == o.data;
    }
};

using LabelVolume = Volume<std::int32_t>;   // cell id per voxel
using BinaryVolume = Volume<std::uint8_t>;  // values in {0,1}
using GrayVolume = Volume<std::uint16_t>;   // grayvalues

// Raw little-endian scalars plus a JSON sidecar (dims, flavor, element type,
// byte layout, optional seed provenance). Layout is fixed to x-slowest.
void save_volume(const LabelVolume& v, const std::string& raw_path,
                 const std::string& json_path);
void save_volume(const BinaryVolume& v, const std::string& raw_path,
                 const std::string& json_path);
void save_volume(const GrayVolume& v, const std::string& raw_path, const std::string& json_path);

LabelVolume load_label_volume(const std::string& raw_path, const std::string& json_path);
BinaryVolume load_binary_volume(const std::string& raw_path, const std::string& json_path);
GrayVolume load_gray_volume(const std::string& raw_path, const std::string& json_path);

std::size_t count_foreground(const BinaryVolume& v);

}  // namespace cracksynth

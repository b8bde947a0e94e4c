#include "cracksynth/volume.hpp"

#include <fstream>

#include <json.hpp>

namespace cracksynth {

namespace {

template <typename T>
void save_impl(const Volume<T>& v, const std::string& raw_path, const std::string& json_path,
               const char* flavor, const char* element) {
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw IoError("cannot open for writing: " + raw_path);
    raw.write(reinterpret_cast<const char*>(v.data.data()),
              static_cast<std::streamsize>(v.data.size() * sizeof(T)));
    if (!raw) throw IoError("write failed: " + raw_path);

    nlohmann::json j;
    j["dims"] = {v.d1, v.d2, v.d3};
    j["flavor"] = flavor;
    j["element_type"] = element;
    j["byte_order"] = "little";
    j["layout"] = "x-slowest";  // index = (x*d2 + y)*d3 + z
    j["voxel_size"] = 1.0;
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw IoError("cannot open for writing: " + json_path);
    js << j.dump(2) << '\n';
}

template <typename T>
Volume<T> load_impl(const std::string& raw_path, const std::string& json_path,
                    const char* flavor) {
    std::ifstream js(json_path, std::ios::binary);
    if (!js) throw IoError("cannot open: " + json_path);
    nlohmann::json j = nlohmann::json::parse(js);
    if (j.at("flavor").get<std::string>() != flavor)
        throw IoError("volume flavor mismatch in " + json_path + " (expected " + flavor + ")");
    auto dims = j.at("dims");
    Volume<T> v(dims.at(0).get<int>(), dims.at(1).get<int>(), dims.at(2).get<int>());

    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) throw IoError("cannot open: " + raw_path);
    raw.read(reinterpret_cast<char*>(v.data.data()),
             static_cast<std::streamsize>(v.data.size() * sizeof(T)));
    if (raw.gcount() != static_cast<std::streamsize>(v.data.size() * sizeof(T)))
        throw IoError("raw volume shorter than its dims: " + raw_path);
    return v;
}

}  // namespace

void save_volume(const LabelVolume& v, const std::string& raw_path,
                 const std::string& json_path) {
    save_impl(v, raw_path, json_path, "label", "int32");
}
void save_volume(const BinaryVolume& v, const std::string& raw_path,
                 const std::string& json_path) {
    save_impl(v, raw_path, json_path, "binary", "uint8");
}
void save_volume(const GrayVolume& v, const std::string& raw_path, const std::string& json_path) {
    save_impl(v, raw_path, json_path, "gray", "uint16");
}

LabelVolume load_label_volume(const std::string& raw_path, const std::string& json_path) {
    return load_impl<std::int32_t>(raw_path, json_path, "label");
}
BinaryVolume load_binary_volume(const std::string& raw_path, const std::string& json_path) {
    return load_impl<std::uint8_t>(raw_path, json_path, "binary");
}
GrayVolume load_gray_volume(const std::string& raw_path, const std::string& json_path) {
    return load_impl<std::uint16_t>(raw_path, json_path, "gray");
}

std::size_t count_foreground(const BinaryVolume& v) {
    std::size_t n = 0;
    for (auto b : v.data) n += b != 0;
    return n;
}

}  // namespace cracksynth

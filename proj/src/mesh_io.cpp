#include "cracksynth/mesh_io.hpp"

#include <fstream>
#include <numeric>

#include "cracksynth/errors.hpp"
#include "cracksynth/io_detail.hpp"

namespace cracksynth {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    return f;
}

// Writes only the vertices referenced, compacted; returns the 1-based OBJ
// index per complex vertex (0 = unused).
std::vector<int> write_used_vertices(std::ofstream& f, const CellComplex& k,
                                     const std::vector<char>& used) {
    std::vector<int> obj_index(k.vertices.size(), 0);
    int next = 1;
    for (std::size_t v = 0; v < k.vertices.size(); ++v) {
        if (!used[v]) continue;
        obj_index[v] = next++;
        f << "v " << io_detail::fmt(k.vertices[v].x) << ' ' << io_detail::fmt(k.vertices[v].y)
          << ' ' << io_detail::fmt(k.vertices[v].z) << '\n';
    }
    return obj_index;
}

}  // namespace

void export_wireframe_obj(const CellComplex& k, const std::string& path) {
    auto f = open_out(path);
    std::vector<char> used(k.vertices.size(), 1);
    auto idx = write_used_vertices(f, k, used);
    for (const auto& a : k.arcs) f << "l " << idx[a.tail] << ' ' << idx[a.head] << '\n';
    if (!f) throw IoError("write failed: " + path);
}

void export_cycle_obj(const CellComplex& k, const Cycle& c, const std::string& path) {
    auto f = open_out(path);
    std::vector<char> used(k.vertices.size(), 0);
    for (int v : c.vertices) used[v] = 1;
    auto idx = write_used_vertices(f, k, used);
    f << 'l';
    for (int v : c.vertices) f << ' ' << idx[v];
    f << ' ' << idx[c.vertices.front()] << '\n';
    if (!f) throw IoError("write failed: " + path);
}

void export_facets_obj(const CellComplex& k, const std::vector<int>& facet_ids,
                       const std::string& path) {
    std::vector<int> ids = facet_ids;
    if (ids.empty()) {
        ids.resize(k.facets.size());
        std::iota(ids.begin(), ids.end(), 0);
    }
    auto f = open_out(path);
    std::vector<char> used(k.vertices.size(), 0);
    std::vector<std::vector<int>> loops;
    loops.reserve(ids.size());
    for (int fid : ids) {
        loops.push_back(k.facet_vertex_loop(fid));
        for (int v : loops.back()) used[v] = 1;
    }
    auto idx = write_used_vertices(f, k, used);
    for (const auto& loop : loops)
        for (std::size_t i = 1; i + 1 < loop.size(); ++i)
            f << "f " << idx[loop[0]] << ' ' << idx[loop[i]] << ' ' << idx[loop[i + 1]] << '\n';
    if (!f) throw IoError("write failed: " + path);
}

void export_surface_obj(const CellComplex& k, const Surface& s, const std::string& path) {
    export_facets_obj(k, s.facets, path);
}

}  // namespace cracksynth

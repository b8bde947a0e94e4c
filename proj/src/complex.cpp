#include "cracksynth/complex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "cracksynth/errors.hpp"
#include "cracksynth/io_detail.hpp"

namespace cracksynth {

std::vector<int> CellComplex::facet_vertex_loop(int facet_id) const {
    const Facet& f = facets[facet_id];
    std::vector<int> loop;
    loop.reserve(f.arcs.size());
    for (std::size_t i = 0; i < f.arcs.size(); ++i) {
        const Arc& a = arcs[f.arcs[i]];
        loop.push_back(f.coherence[i] > 0 ? a.tail : a.head);
    }
    return loop;
}

Vec3 CellComplex::facet_centroid(int facet_id) const {
    auto loop = facet_vertex_loop(facet_id);
    Vec3 c{};
    for (int v : loop) c += vertices[v];
    return c / static_cast<double>(loop.size());
}

double CellComplex::facet_area(int facet_id) const {
    auto loop = facet_vertex_loop(facet_id);
    Vec3 c = facet_centroid(facet_id);
    double area = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec3& p = vertices[loop[i]];
        const Vec3& q = vertices[loop[(i + 1) % loop.size()]];
        area += 0.5 * norm(cross(p - c, q - c));
    }
    return area;
}

double CellComplex::arc_length(int arc_id) const {
    const Arc& a = arcs[arc_id];
    return dist(vertices[a.tail], vertices[a.head]);
}

std::string to_string(ArcWeightMode m) { return m == ArcWeightMode::Unit ? "unit" : "length"; }
std::string to_string(FacetWeightMode m) { return m == FacetWeightMode::Unit ? "unit" : "area"; }

ArcWeightMode arc_weight_mode_from_string(const std::string& s) {
    if (s == "unit") return ArcWeightMode::Unit;
    if (s == "length") return ArcWeightMode::Length;
    throw ConfigError("unknown arc weight mode: " + s);
}

FacetWeightMode facet_weight_mode_from_string(const std::string& s) {
    if (s == "unit") return FacetWeightMode::Unit;
    if (s == "area") return FacetWeightMode::Area;
    throw ConfigError("unknown facet weight mode: " + s);
}

namespace {

// Tolerance-based point registry: merges points within eps (first occurrence
// keeps its coordinates). Quantized hash grid with 27-bucket probing.
class VertexMerger {
  public:
    explicit VertexMerger(double eps) : eps_(eps), inv_(1.0 / eps) {}

    int intern(const Vec3& p, std::vector<Vec3>& out) {
        auto qx = static_cast<std::int64_t>(std::floor(p.x * inv_));
        auto qy = static_cast<std::int64_t>(std::floor(p.y * inv_));
        auto qz = static_cast<std::int64_t>(std::floor(p.z * inv_));
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy)
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = buckets_.find(key(qx + dx, qy + dy, qz + dz));
                    if (it == buckets_.end()) continue;
                    for (int id : it->second)
                        if (dist2(out[id], p) <= eps_ * eps_) return id;
                }
        int id = static_cast<int>(out.size());
        out.push_back(p);
        buckets_[key(qx, qy, qz)].push_back(id);
        return id;
    }

  private:
    static std::uint64_t key(std::int64_t x, std::int64_t y, std::int64_t z) {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : {x, y, z}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }

    double eps_;
    double inv_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

// Removes consecutive duplicates (including the wrap pair). Returns an empty
// vector if fewer than 3 distinct vertices remain.
std::vector<int> clean_loop(std::vector<int> loop) {
    std::vector<int> out;
    out.reserve(loop.size());
    for (int v : loop)
        if (out.empty() || out.back() != v) out.push_back(v);
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    if (out.size() < 3) return {};
    return out;
}

bool cyclic_equal(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty()) return false;
    std::size_t n = a.size();
    auto pos = std::find(b.begin(), b.end(), a[0]);
    if (pos == b.end()) return false;
    std::size_t j = static_cast<std::size_t>(pos - b.begin());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[(j + i) % n]) return false;
    return true;
}

struct PendingFacet {
    std::vector<int> loop;  // canonical orientation
    int cell_a = -1;
    int cell_b = -1;
    int cuboid_face = -1;
    int seen = 0;
};

}  // namespace

CellComplex extract_complex(const std::vector<VoronoiCell>& cells, const Cuboid& domain,
                            double eps) {
    if (eps <= 0.0) eps = 1e-9 * domain.diameter();

    CellComplex k;
    k.domain = domain;

    VertexMerger merger(eps);

    // Pass 1: intern vertices, collect facets keyed by their incident pair.
    // Interior key: (min gen, max gen); boundary key: (gen, ~cuboid_face).
    std::map<std::pair<int, int>, PendingFacet> registry;
    for (const auto& cell : cells) {
        std::vector<int> vmap(cell.vertices.size());
        for (std::size_t i = 0; i < cell.vertices.size(); ++i)
            vmap[i] = merger.intern(cell.vertices[i], k.vertices);

        for (const auto& face : cell.faces) {
            std::vector<int> loop(face.loop.size());
            for (std::size_t i = 0; i < face.loop.size(); ++i) loop[i] = vmap[face.loop[i]];
            loop = clean_loop(std::move(loop));
            if (loop.empty()) continue;  // degenerate sliver collapsed by the merge

            if (face.neighbor.is_boundary()) {
                auto key = std::make_pair(cell.generator_id, -1 - face.neighbor.id);
                auto [it, inserted] = registry.try_emplace(key);
                PendingFacet& pf = it->second;
                if (!inserted)
                    throw InconsistentGeometryError("cell contributes a cuboid face twice");
                // Canonical orientation: as seen from inside Q, i.e. the
                // reverse of the CCW-from-outside cell loop.
                std::reverse(loop.begin(), loop.end());
                pf.loop = std::move(loop);
                pf.cell_a = cell.generator_id;
                pf.cuboid_face = face.neighbor.id;
                pf.seen = 1;
            } else {
                int other = face.neighbor.id;
                auto key = std::minmax(cell.generator_id, other);
                auto [it, inserted] = registry.try_emplace(key);
                PendingFacet& pf = it->second;
                pf.seen += 1;
                if (pf.seen > 2)
                    throw InconsistentGeometryError("facet shared by more than two cells");
                // Canonical orientation is CCW as seen from the smaller cell:
                // the reverse of the smaller cell's CCW-from-outside loop,
                // which coincides with the larger cell's loop as stored.
                if (cell.generator_id < other) std::reverse(loop.begin(), loop.end());
                if (pf.loop.empty())
                    pf.loop = std::move(loop);
                else if (!cyclic_equal(pf.loop, loop))
                    throw InconsistentGeometryError(
                        "facet vertex loops disagree between incident cells");
                pf.cell_a = key.first;
                pf.cell_b = key.second;
            }
        }
    }

    // Pass 2: assign facet and arc ids in deterministic (key-sorted) order.
    std::map<std::pair<int, int>, int> arc_ids;
    auto arc_of = [&](int u, int v) {
        auto key = std::minmax(u, v);
        auto [it, inserted] = arc_ids.try_emplace(key, static_cast<int>(k.arcs.size()));
        if (inserted) k.arcs.push_back({key.first, key.second, 1.0, false});
        return it->second;
    };

    k.cells.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) k.cells[i].generator = cells[i].generator_id;

    for (auto& [key, pf] : registry) {
        bool boundary = key.second < 0;
        if (!boundary && pf.seen != 2)
            throw InconsistentGeometryError(
                "interior facet registered by only one of its two cells");
        CellComplex::Facet f;
        f.cell_a = pf.cell_a;
        f.cell_b = boundary ? -1 : pf.cell_b;
        f.cuboid_face = pf.cuboid_face;
        std::size_t m = pf.loop.size();
        f.arcs.reserve(m);
        f.coherence.reserve(m);
        for (std::size_t i = 0; i < m; ++i) {
            int u = pf.loop[i];
            int v = pf.loop[(i + 1) % m];
            int a = arc_of(u, v);
            f.arcs.push_back(a);
            f.coherence.push_back(k.arcs[a].tail == u ? std::int8_t{1} : std::int8_t{-1});
        }
        int fid = static_cast<int>(k.facets.size());
        if (boundary) {
            for (int a : f.arcs) k.arcs[a].on_boundary = true;
            // Canonical normal points into the owning cell.
            k.cells[pf.cell_a].facet_sides.emplace_back(fid, std::int8_t{-1});
        } else {
            // Canonical loop is CCW from inside cell_a: normal points into
            // cell_a and out of cell_b.
            k.cells[pf.cell_a].facet_sides.emplace_back(fid, std::int8_t{-1});
            k.cells[pf.cell_b].facet_sides.emplace_back(fid, std::int8_t{1});
        }
        k.facets.push_back(std::move(f));
    }

    if (k.euler_characteristic() != 1)
        throw InconsistentGeometryError(
            "extracted complex violates V-E+F-C=1 (chi=" +
            std::to_string(k.euler_characteristic()) + "); vertex merge tolerance unsuitable");
    return k;
}

void assign_weights(CellComplex& k, ArcWeightMode arc_mode, FacetWeightMode facet_mode) {
    double tiny = 1e-12 * std::max(1.0, k.domain.diameter());
    for (std::size_t a = 0; a < k.arcs.size(); ++a) {
        double len = k.arc_length(static_cast<int>(a));
        if (len <= tiny)
            throw ZeroWeightError("zero-length arc " + std::to_string(a) +
                                  " survived extraction");
        k.arcs[a].weight = arc_mode == ArcWeightMode::Unit ? 1.0 : len;
    }
    for (std::size_t f = 0; f < k.facets.size(); ++f) {
        double area = k.facet_area(static_cast<int>(f));
        if (area <= tiny * tiny)
            throw ZeroWeightError("zero-area facet " + std::to_string(f) +
                                  " survived extraction");
        k.facets[f].weight = facet_mode == FacetWeightMode::Unit ? 1.0 : area;
    }
}

void save_complex(const CellComplex& k, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    using io_detail::fmt;
    out << "cracksynth-complex 1\n";
    out << "domain " << fmt(k.domain.d1) << ' ' << fmt(k.domain.d2) << ' ' << fmt(k.domain.d3)
        << '\n';
    out << "counts " << k.vertices.size() << ' ' << k.arcs.size() << ' ' << k.facets.size() << ' '
        << k.cells.size() << '\n';
    for (const auto& v : k.vertices)
        out << "v " << fmt(v.x) << ' ' << fmt(v.y) << ' ' << fmt(v.z) << '\n';
    for (const auto& a : k.arcs)
        out << "a " << a.tail << ' ' << a.head << ' ' << fmt(a.weight) << '\n';
    for (const auto& f : k.facets) {
        out << "f " << fmt(f.weight) << ' ' << f.cuboid_face << ' ' << f.cell_a << ' ' << f.cell_b
            << ' ' << f.arcs.size();
        for (std::size_t i = 0; i < f.arcs.size(); ++i)
            out << ' ' << (f.coherence[i] > 0 ? f.arcs[i] + 1 : -(f.arcs[i] + 1));
        out << '\n';
    }
    for (const auto& c : k.cells) {
        out << "c " << c.generator << ' ' << c.facet_sides.size();
        for (auto [fid, side] : c.facet_sides)
            out << ' ' << (side > 0 ? fid + 1 : -(fid + 1));
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

CellComplex load_complex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw IoError(std::string("truncated complex file: ") + what);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return std::istringstream(line);
    };

    {
        auto ss = next_line("header");
        std::string magic;
        int version = 0;
        ss >> magic >> version;
        if (magic != "cracksynth-complex" || version != 1)
            throw IoError("not a complex file: " + path);
    }
    CellComplex k;
    {
        auto ss = next_line("domain");
        std::string tag, a, b, c;
        ss >> tag >> a >> b >> c;
        if (tag != "domain") throw IoError("expected domain line");
        k.domain = Cuboid(io_detail::parse_double(a), io_detail::parse_double(b),
                          io_detail::parse_double(c));
    }
    std::size_t nv = 0, na = 0, nf = 0, nc = 0;
    {
        auto ss = next_line("counts");
        std::string tag;
        ss >> tag >> nv >> na >> nf >> nc;
        if (tag != "counts") throw IoError("expected counts line");
    }
    k.vertices.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        auto ss = next_line("vertex");
        std::string tag, a, b, c;
        ss >> tag >> a >> b >> c;
        if (tag != "v") throw IoError("expected vertex line");
        k.vertices.push_back({io_detail::parse_double(a), io_detail::parse_double(b),
                              io_detail::parse_double(c)});
    }
    k.arcs.reserve(na);
    for (std::size_t i = 0; i < na; ++i) {
        auto ss = next_line("arc");
        std::string tag, w;
        CellComplex::Arc a;
        ss >> tag >> a.tail >> a.head >> w;
        if (tag != "a") throw IoError("expected arc line");
        a.weight = io_detail::parse_double(w);
        k.arcs.push_back(a);
    }
    k.facets.reserve(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        auto ss = next_line("facet");
        std::string tag, w;
        std::size_t m = 0;
        CellComplex::Facet f;
        ss >> tag >> w >> f.cuboid_face >> f.cell_a >> f.cell_b >> m;
        if (tag != "f") throw IoError("expected facet line");
        f.weight = io_detail::parse_double(w);
        for (std::size_t j = 0; j < m; ++j) {
            long long signed_id = 0;
            ss >> signed_id;
            f.arcs.push_back(static_cast<int>(std::llabs(signed_id)) - 1);
            f.coherence.push_back(signed_id > 0 ? std::int8_t{1} : std::int8_t{-1});
        }
        if (!ss) throw IoError("malformed facet line");
        if (f.cuboid_face >= 0)
            for (int a : f.arcs) k.arcs[a].on_boundary = true;
        k.facets.push_back(std::move(f));
    }
    k.cells.reserve(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        auto ss = next_line("cell");
        std::string tag;
        std::size_t m = 0;
        CellComplex::Cell c;
        ss >> tag >> c.generator >> m;
        if (tag != "c") throw IoError("expected cell line");
        for (std::size_t j = 0; j < m; ++j) {
            long long signed_id = 0;
            ss >> signed_id;
            c.facet_sides.emplace_back(static_cast<int>(std::llabs(signed_id)) - 1,
                                       signed_id > 0 ? std::int8_t{1} : std::int8_t{-1});
        }
        if (!ss) throw IoError("malformed cell line");
        k.cells.push_back(std::move(c));
    }
    return k;
}

}  // namespace cracksynth

#include "cracksynth/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "cracksynth/errors.hpp"
#include "cracksynth/parallel.hpp"

namespace cracksynth {

double VoronoiCell::volume() const {
    // Divergence theorem over outward-oriented face fans.
    double six_v = 0.0;
    for (const auto& f : faces) {
        const Vec3& p0 = vertices[f.loop[0]];
        for (std::size_t i = 1; i + 1 < f.loop.size(); ++i) {
            const Vec3& p1 = vertices[f.loop[i]];
            const Vec3& p2 = vertices[f.loop[i + 1]];
            six_v += dot(p0, cross(p1, p2));
        }
    }
    return six_v / 6.0;
}

Vec3 VoronoiCell::centroid_of_face(const Face& f) const {
    Vec3 c{};
    for (int v : f.loop) c += vertices[v];
    return c / static_cast<double>(f.loop.size());
}

namespace {

// Mutable convex polytope under successive half-space clips. Face loops stay
// counterclockwise viewed from outside.
struct ClipPoly {
    std::vector<Vec3> verts;
    std::vector<VoronoiCell::Face> faces;

    static ClipPoly from_cuboid(const Cuboid& q) {
        ClipPoly p;
        p.verts = {{0, 0, 0},       {q.d1, 0, 0},    {q.d1, q.d2, 0},    {0, q.d2, 0},
                   {0, 0, q.d3},    {q.d1, 0, q.d3}, {q.d1, q.d2, q.d3}, {0, q.d2, q.d3}};
        auto face = [](std::vector<int> loop, int cuboid_face) {
            return VoronoiCell::Face{std::move(loop), FaceNeighbor::cuboid(cuboid_face)};
        };
        // Outward-CCW loops for each cuboid face.
        p.faces = {
            face({0, 4, 7, 3}, 0),  // x=0
            face({1, 2, 6, 5}, 1),  // x=d1
            face({0, 1, 5, 4}, 2),  // y=0
            face({3, 7, 6, 2}, 3),  // y=d2
            face({0, 3, 2, 1}, 4),  // z=0
            face({4, 5, 6, 7}, 5),  // z=d3
        };
        return p;
    }

    double max_dist2_from(const Vec3& g) const {
        double m = 0.0;
        for (const auto& v : verts) m = std::max(m, dist2(v, g));
        return m;
    }

    // Clips against the half-space dot(n,x) <= d, keeping that side, and
    // caps the cut with a new face attributed to `neighbor`. Returns false
    // when the plane does not cut the polytope.
    bool clip(const Vec3& n, double d, const FaceNeighbor& neighbor, double eps) {
        const int kIn = -1, kOn = 0, kOut = 1;
        std::vector<double> side(verts.size());
        std::vector<int> cls(verts.size());
        bool any_out = false, any_in = false;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            side[i] = dot(n, verts[i]) - d;
            cls[i] = side[i] > eps ? kOut : (side[i] < -eps ? kIn : kOn);
            any_out |= cls[i] == kOut;
            any_in |= cls[i] == kIn;
        }
        if (!any_out) return false;
        if (!any_in)
            throw InconsistentGeometryError(
                "half-space clip would remove the entire cell; generator spacing is "
                "degenerate at this tolerance");

        // Intersection vertices are computed once per cut edge and shared by
        // both incident faces, keeping the topology watertight.
        std::map<std::pair<int, int>, int> edge_cut;
        auto cut_vertex = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = edge_cut.find(key);
            if (it != edge_cut.end()) return it->second;
            double t = side[a] / (side[a] - side[b]);
            Vec3 v = verts[a] + (verts[b] - verts[a]) * t;
            int id = static_cast<int>(verts.size());
            verts.push_back(v);
            edge_cut.emplace(key, id);
            return id;
        };

        auto on_plane = [&](int v) {
            return static_cast<std::size_t>(v) < cls.size() ? cls[v] == kOn : true;
        };

        std::vector<VoronoiCell::Face> out_faces;
        out_faces.reserve(faces.size() + 1);
        // Directed on-plane edges contributed by the clipped faces; the cap
        // is their reversed chain.
        std::vector<std::pair<int, int>> rim;

        for (auto& f : faces) {
            std::vector<int> loop;
            loop.reserve(f.loop.size() + 2);
            std::size_t m = f.loop.size();
            for (std::size_t i = 0; i < m; ++i) {
                int a = f.loop[i];
                int b = f.loop[(i + 1) % m];
                if (cls[a] != kOut) loop.push_back(a);
                if ((cls[a] == kIn && cls[b] == kOut) || (cls[a] == kOut && cls[b] == kIn))
                    loop.push_back(cut_vertex(a, b));
            }
            // Collapse accidental duplicates (grazing contacts).
            std::vector<int> clean;
            for (int v : loop)
                if (clean.empty() || clean.back() != v) clean.push_back(v);
            while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
            if (clean.size() < 3) continue;

            for (std::size_t i = 0; i < clean.size(); ++i) {
                int u = clean[i];
                int v = clean[(i + 1) % clean.size()];
                if (on_plane(u) && on_plane(v)) rim.emplace_back(u, v);
            }
            out_faces.push_back({std::move(clean), f.neighbor});
        }

        // Chain the rim into the cap loop. Edges are traversed by their face
        // in CCW-from-outside order, so the cap (whose outside is the cut
        // side) follows the reversed edges.
        if (rim.size() >= 3) {
            std::map<int, int> next;
            for (auto& e : rim) next[e.second] = e.first;
            std::vector<int> cap;
            cap.reserve(rim.size());
            int start = rim.front().second;
            int cur = start;
            bool closed = false;
            for (std::size_t guard = 0; guard <= rim.size(); ++guard) {
                cap.push_back(cur);
                auto it = next.find(cur);
                if (it == next.end()) break;
                cur = it->second;
                if (cur == start) {
                    closed = true;
                    break;
                }
            }
            if (!closed || cap.size() < 3)
                throw InconsistentGeometryError(
                    "cut rim does not chain into a single loop; input is degenerate at this "
                    "tolerance");
            out_faces.push_back({std::move(cap), neighbor});
        } else if (!rim.empty()) {
            throw InconsistentGeometryError("degenerate cut rim");
        }

        faces = std::move(out_faces);
        compact();
        return true;
    }

    // Drops unreferenced vertices and reindexes loops.
    void compact() {
        std::vector<int> remap(verts.size(), -1);
        std::vector<Vec3> kept;
        kept.reserve(verts.size());
        for (auto& f : faces)
            for (int& v : f.loop) {
                if (remap[v] == -1) {
                    remap[v] = static_cast<int>(kept.size());
                    kept.push_back(verts[v]);
                }
                v = remap[v];
            }
        verts = std::move(kept);
    }
};

}  // namespace

std::vector<VoronoiCell> build_bounded_voronoi(const PointPattern& pattern, const Cuboid& q,
                                               const VoronoiOptions& opts) {
    const auto& pts = pattern.points;
    const std::size_t n = pts.size();
    if (n < 1) throw DegenerateInputError("voronoi construction needs at least one generator");

    double eps_pt = 1e-9 * q.diameter();
    double eps = opts.eps > 0.0 ? opts.eps : eps_pt;

    for (const auto& p : pts)
        if (!q.contains_closed(p, eps_pt))
            throw DegenerateInputError("generator outside the bounding cuboid");

    std::vector<VoronoiCell> cells(n);
    std::atomic<bool> degenerate{false};

    parallel_for(n, opts.threads, [&](std::size_t i) {
        // Neighbors sorted by distance; ties broken by index for determinism.
        std::vector<std::pair<double, int>> order;
        order.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            double d2 = dist2(pts[i], pts[j]);
            if (d2 < eps_pt * eps_pt) degenerate.store(true);
            order.emplace_back(d2, static_cast<int>(j));
        }
        if (degenerate.load()) return;
        std::sort(order.begin(), order.end());

        ClipPoly poly = ClipPoly::from_cuboid(q);
        double r2max = poly.max_dist2_from(pts[i]);
        for (const auto& [d2, j] : order) {
            // Security radius: a bisector at distance >= max vertex distance
            // cannot intersect the cell.
            if (d2 > 4.0 * r2max) break;
            Vec3 diff = pts[j] - pts[i];
            Vec3 nrm = normalized(diff);
            double plane_d = dot(nrm, (pts[i] + pts[j]) * 0.5);
            if (poly.clip(nrm, plane_d, FaceNeighbor::generator(j), eps))
                r2max = poly.max_dist2_from(pts[i]);
        }

        VoronoiCell& cell = cells[i];
        cell.generator_id = static_cast<int>(i);
        cell.generator = pts[i];
        cell.vertices = std::move(poly.verts);
        cell.faces = std::move(poly.faces);
    });

    if (degenerate.load())
        throw DegenerateInputError("two generators coincide within tolerance");
    return cells;
}

}  // namespace cracksynth

#include "cracksynth/graph_paths.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <unordered_map>

#include <json.hpp>

#include "cracksynth/errors.hpp"

namespace cracksynth {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Adjacency {
    // Per vertex: (neighbor, arc id, weight), sorted by (neighbor, arc id).
    std::vector<std::vector<std::tuple<int, int, double>>> out;

    static Adjacency build(int num_vertices, const std::vector<GraphArc>& arcs,
                           const std::function<bool(int)>& filter) {
        Adjacency adj;
        adj.out.resize(num_vertices);
        for (std::size_t a = 0; a < arcs.size(); ++a) {
            if (filter && !filter(static_cast<int>(a))) continue;
            const auto& arc = arcs[a];
            if (!(arc.weight > 0.0)) throw ConfigError("arc weights must be strictly positive");
            adj.out[arc.tail].emplace_back(arc.head, static_cast<int>(a), arc.weight);
            adj.out[arc.head].emplace_back(arc.tail, static_cast<int>(a), arc.weight);
        }
        for (auto& v : adj.out) std::sort(v.begin(), v.end());
        return adj;
    }
};

std::vector<GraphArc> complex_arcs(const CellComplex& k) {
    std::vector<GraphArc> arcs;
    arcs.reserve(k.arcs.size());
    for (const auto& a : k.arcs) arcs.push_back({a.tail, a.head, a.weight});
    return arcs;
}

// Distances from every vertex to `target` over the bidirected graph.
std::vector<double> dijkstra_distances(const Adjacency& adj, int target) {
    std::vector<double> dist(adj.out.size(), kInf);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[target] = 0.0;
    heap.emplace(0.0, target);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (auto [v, a, w] : adj.out[u]) {
            double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

Path lexicographic_walk(const Adjacency& adj, const std::vector<double>& dist_to_t, int s, int t,
                        const std::vector<GraphArc>& arcs) {
    Path path;
    path.vertices.push_back(s);
    int u = s;
    while (u != t) {
        int best_v = -1, best_a = -1;
        double best_val = kInf;
        double best_w = 0.0;
        for (auto [v, a, w] : adj.out[u]) {
            if (dist_to_t[v] == kInf) continue;
            double val = w + dist_to_t[v];
            // Strictly better value, else the smallest neighbor id (then the
            // smallest arc id) among ties: lexicographic vertex sequence.
            if (val < best_val || (val <= best_val && (best_v < 0 || v < best_v))) {
                best_val = val;
                best_v = v;
                best_a = a;
                best_w = w;
            }
        }
        if (best_v < 0) throw InternalError("shortest-path walk lost the target");
        path.arcs.push_back(best_a);
        path.dirs.push_back(arcs[best_a].tail == u ? std::int8_t{1} : std::int8_t{-1});
        path.weight += best_w;
        path.vertices.push_back(best_v);
        u = best_v;
        if (path.vertices.size() > adj.out.size() + 1)
            throw InternalError("shortest-path walk does not terminate");
    }
    return path;
}

}  // namespace

ArcFilter accept_all_arcs() {
    return [](int) { return true; };
}

ArcFilter boundary_arcs(const CellComplex& k) {
    return [&k](int a) { return k.arcs[a].on_boundary; };
}

Path dijkstra_on_arcs(int num_vertices, const std::vector<GraphArc>& arcs, int s, int t,
                      const std::function<bool(int)>& filter) {
    if (s == t) throw ConfigError("path endpoints must be distinct");
    if (s < 0 || t < 0 || s >= num_vertices || t >= num_vertices)
        throw ConfigError("path endpoint out of range");
    Adjacency adj = Adjacency::build(num_vertices, arcs, filter);
    auto dist = dijkstra_distances(adj, t);
    if (dist[s] == kInf)
        throw UnreachableError("no path between " + std::to_string(s) + " and " +
                               std::to_string(t) + " under the arc filter");
    return lexicographic_walk(adj, dist, s, t, arcs);
}

Path dijkstra(const CellComplex& k, int s, int t, const ArcFilter& filter) {
    return dijkstra_on_arcs(static_cast<int>(k.vertices.size()), complex_arcs(k), s, t, filter);
}

std::vector<int> vertices_on_vertical_edge(const CellComplex& k, const Cuboid& q, int edge) {
    double ex = (edge == 1 || edge == 2) ? q.d1 : 0.0;
    double ey = (edge == 2 || edge == 3) ? q.d2 : 0.0;
    double tol = 1e-9 * q.diameter();
    std::vector<int> ids;
    for (std::size_t v = 0; v < k.vertices.size(); ++v)
        if (std::abs(k.vertices[v].x - ex) <= tol && std::abs(k.vertices[v].y - ey) <= tol)
            ids.push_back(static_cast<int>(v));
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (k.vertices[a].z != k.vertices[b].z) return k.vertices[a].z < k.vertices[b].z;
        return a < b;
    });
    return ids;
}

Cycle boundary_cycle(const CellComplex& k, const Cuboid& q,
                     const std::array<double, 4>& edge_heights) {
    // Pick the vertex nearest to the requested relative height on each
    // vertical edge (ties to the smaller id).
    std::array<int, 4> picks{};
    for (int e = 0; e < 4; ++e) {
        auto ids = vertices_on_vertical_edge(k, q, e);
        if (ids.empty())
            throw InternalError("vertical edge " + std::to_string(e) +
                                " carries no complex vertex");
        double want = edge_heights[e] * q.d3;
        int best = ids[0];
        double best_d = std::abs(k.vertices[ids[0]].z - want);
        for (int id : ids) {
            double d = std::abs(k.vertices[id].z - want);
            if (d < best_d || (d == best_d && id < best)) {
                best_d = d;
                best = id;
            }
        }
        picks[e] = best;
    }
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (picks[i] == picks[j])
                throw DegenerateCycleError("two corner-path endpoints coincide");

    ArcFilter filter = boundary_arcs(k);
    std::vector<int> walk;
    for (int e = 0; e < 4; ++e) {
        Path p = dijkstra(k, picks[e], picks[(e + 1) % 4], filter);
        std::size_t from = e == 0 ? 0 : 1;  // skip repeated junction vertex
        for (std::size_t i = from; i < p.vertices.size(); ++i) walk.push_back(p.vertices[i]);
    }
    if (walk.size() < 2 || walk.front() != walk.back())
        throw InternalError("concatenated boundary paths do not close");
    walk.pop_back();

    // Excise detour loops: on a revisited vertex, drop everything since its
    // first occurrence.
    std::vector<int> cyc;
    std::unordered_map<int, int> pos;
    for (int v : walk) {
        auto it = pos.find(v);
        if (it != pos.end()) {
            while (static_cast<int>(cyc.size()) > it->second + 1) {
                pos.erase(cyc.back());
                cyc.pop_back();
            }
        } else {
            pos[v] = static_cast<int>(cyc.size());
            cyc.push_back(v);
        }
    }
    if (cyc.size() < 3)
        throw DegenerateCycleError("paths cancel; no simple cycle of length >= 3 remains");

    std::map<std::pair<int, int>, int> arc_of;
    for (std::size_t a = 0; a < k.arcs.size(); ++a)
        arc_of[{k.arcs[a].tail, k.arcs[a].head}] = static_cast<int>(a);

    Cycle out;
    out.vertices = cyc;
    for (std::size_t i = 0; i < cyc.size(); ++i) {
        int u = cyc[i];
        int v = cyc[(i + 1) % cyc.size()];
        auto it = arc_of.find(std::minmax(u, v));
        if (it == arc_of.end())
            throw InternalError("cycle edge is not an arc of the complex");
        out.arcs.push_back(it->second);
        out.dirs.push_back(k.arcs[it->second].tail == u ? std::int8_t{1} : std::int8_t{-1});
        out.weight += k.arcs[it->second].weight;
    }
    return out;
}

BinaryProgram spp_as_ip_on_arcs(int num_vertices, const std::vector<GraphArc>& arcs, int s, int t,
                                const std::function<bool(int)>& filter) {
    if (s == t) throw ConfigError("path endpoints must be distinct");
    BinaryProgram prog;
    // Two directed copies per filtered arc so the path may traverse either
    // way; both get the arc's cost.
    std::vector<int> fwd_var(arcs.size(), -1);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        if (filter && !filter(static_cast<int>(a))) continue;
        fwd_var[a] = prog.num_vars;
        prog.num_vars += 2;
        prog.costs.push_back(arcs[a].weight);
        prog.costs.push_back(arcs[a].weight);
        prog.var_names.push_back("a" + std::to_string(a) + "+");
        prog.var_names.push_back("a" + std::to_string(a) + "-");
    }

    std::vector<std::vector<BinaryProgram::Term>> rows(num_vertices);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        if (fwd_var[a] < 0) continue;
        int f = fwd_var[a], b = f + 1;
        rows[arcs[a].tail].push_back({f, 1});
        rows[arcs[a].head].push_back({f, -1});
        rows[arcs[a].head].push_back({b, 1});
        rows[arcs[a].tail].push_back({b, -1});
    }
    for (int v = 0; v < num_vertices; ++v) {
        std::int8_t rhs = v == s ? std::int8_t{1} : (v == t ? std::int8_t{-1} : std::int8_t{0});
        if (rows[v].empty() && rhs == 0) continue;
        prog.constraints.push_back({std::move(rows[v]), rhs});
    }
    return prog;
}

BinaryProgram spp_as_ip(const CellComplex& k, int s, int t, const ArcFilter& filter) {
    return spp_as_ip_on_arcs(static_cast<int>(k.vertices.size()), complex_arcs(k), s, t, filter);
}

void save_cycle(const Cycle& c, const std::string& path) {
    nlohmann::json j;
    j["vertices"] = c.vertices;
    j["signs"] = std::vector<int>(c.dirs.begin(), c.dirs.end());
    j["weight"] = c.weight;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << j.dump(2) << '\n';
}

Cycle load_cycle(const CellComplex& k, const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    nlohmann::json j = nlohmann::json::parse(f);

    Cycle c;
    c.vertices = j.at("vertices").get<std::vector<int>>();
    auto signs = j.at("signs").get<std::vector<int>>();
    if (c.vertices.size() < 3 || signs.size() != c.vertices.size())
        throw IoError("malformed cycle file: " + path);

    std::map<std::pair<int, int>, int> arc_of;
    for (std::size_t a = 0; a < k.arcs.size(); ++a)
        arc_of[{k.arcs[a].tail, k.arcs[a].head}] = static_cast<int>(a);
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        int u = c.vertices[i];
        int v = c.vertices[(i + 1) % c.vertices.size()];
        auto it = arc_of.find(std::minmax(u, v));
        if (it == arc_of.end()) throw IoError("cycle edge not present in the complex");
        std::int8_t dir = k.arcs[it->second].tail == u ? std::int8_t{1} : std::int8_t{-1};
        if (dir != signs[i]) throw IoError("cycle sign disagrees with the complex arc direction");
        c.arcs.push_back(it->second);
        c.dirs.push_back(dir);
        c.weight += k.arcs[it->second].weight;
    }
    return c;
}

}  // namespace cracksynth

#include "cracksynth/minsurf.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cracksynth/errors.hpp"
#include "cracksynth/io_detail.hpp"

namespace cracksynth {

namespace {

void check_cycle(const CellComplex& k, const Cycle& h) {
    std::size_t n = h.vertices.size();
    if (n < 3 || h.arcs.size() != n || h.dirs.size() != n)
        throw InvalidCycleError("cycle must be closed with one arc per vertex");
    std::set<int> seen(h.vertices.begin(), h.vertices.end());
    if (seen.size() != n) throw InvalidCycleError("cycle revisits a vertex");
    for (std::size_t i = 0; i < n; ++i) {
        int u = h.vertices[i];
        int v = h.vertices[(i + 1) % n];
        const auto& a = k.arcs[h.arcs[i]];
        bool fwd = a.tail == u && a.head == v;
        bool bwd = a.tail == v && a.head == u;
        if (!fwd && !bwd) throw InvalidCycleError("cycle arc does not join its vertices");
        if ((fwd && h.dirs[i] != 1) || (bwd && h.dirs[i] != -1))
            throw InvalidCycleError("cycle sign disagrees with arc direction");
    }
}

}  // namespace

std::vector<std::pair<int, int>> cycle_chain(const CellComplex& k, const Cycle& h) {
    check_cycle(k, h);
    std::vector<std::pair<int, int>> chain;
    chain.reserve(h.arcs.size());
    for (std::size_t i = 0; i < h.arcs.size(); ++i)
        chain.emplace_back(h.arcs[i], static_cast<int>(h.dirs[i]));
    std::sort(chain.begin(), chain.end());
    return chain;
}

BinaryProgram msp_as_ip(const CellComplex& k, const Cycle& h) {
    check_cycle(k, h);
    for (const auto& f : k.facets)
        if (!(f.weight > 0.0)) throw InvalidProgramError("facet weights must be positive");

    BinaryProgram prog;
    prog.num_vars = 2 * static_cast<int>(k.facets.size());
    prog.costs.resize(prog.num_vars);
    prog.var_names.resize(prog.num_vars);
    for (std::size_t f = 0; f < k.facets.size(); ++f) {
        prog.costs[2 * f] = k.facets[f].weight;
        prog.costs[2 * f + 1] = k.facets[f].weight;
        prog.var_names[2 * f] = "f" + std::to_string(f) + "+";
        prog.var_names[2 * f + 1] = "f" + std::to_string(f) + "-";
    }

    // One row per arc. Column 2f carries the stored facet orientation, column
    // 2f+1 the reversed one (all coherences negated).
    std::vector<BinaryProgram::Constraint> rows(k.arcs.size());
    for (std::size_t f = 0; f < k.facets.size(); ++f) {
        const auto& facet = k.facets[f];
        for (std::size_t i = 0; i < facet.arcs.size(); ++i) {
            std::int8_t c = facet.coherence[i];
            rows[facet.arcs[i]].terms.push_back({static_cast<int>(2 * f), c});
            rows[facet.arcs[i]].terms.push_back(
                {static_cast<int>(2 * f + 1), static_cast<std::int8_t>(-c)});
        }
    }
    for (std::size_t i = 0; i < h.arcs.size(); ++i) rows[h.arcs[i]].rhs = h.dirs[i];
    prog.constraints = std::move(rows);
    return prog;
}

std::vector<std::pair<int, int>> surface_boundary(const CellComplex& k, const Surface& s) {
    std::map<int, int> coef;
    for (std::size_t i = 0; i < s.facets.size(); ++i) {
        const auto& f = k.facets[s.facets[i]];
        int sign = s.orientation[i];
        for (std::size_t j = 0; j < f.arcs.size(); ++j)
            coef[f.arcs[j]] += sign * static_cast<int>(f.coherence[j]);
    }
    std::vector<std::pair<int, int>> chain;
    for (auto [a, c] : coef)
        if (c != 0) chain.emplace_back(a, c);
    return chain;
}

namespace {

int facet_component_count(const CellComplex& k, const std::vector<int>& facets) {
    if (facets.empty()) return 0;
    // Facets are adjacent when they share an arc.
    std::map<int, std::vector<int>> arc_to_local;
    for (std::size_t i = 0; i < facets.size(); ++i)
        for (int a : k.facets[facets[i]].arcs) arc_to_local[a].push_back(static_cast<int>(i));
    std::vector<int> parent(facets.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& [a, ids] : arc_to_local)
        for (std::size_t i = 1; i < ids.size(); ++i) parent[find(ids[0])] = find(ids[i]);
    std::set<int> roots;
    for (std::size_t i = 0; i < facets.size(); ++i) roots.insert(find(static_cast<int>(i)));
    return static_cast<int>(roots.size());
}

}  // namespace

Surface min_weight_surface(const CellComplex& k, const Cycle& h, const SolveOptions& opts) {
    BinaryProgram prog = msp_as_ip(k, h);
    IpSolution sol = solve_binary(prog, opts);
    if (sol.status != SolveStatus::Optimal)
        throw InfeasibleError("no facet set spans the given cycle");

    Surface s;
    s.source_cycle = h;
    s.solver_stats = sol;
    for (std::size_t f = 0; f < k.facets.size(); ++f) {
        bool plus = sol.assignment[2 * f] != 0;
        bool minus = sol.assignment[2 * f + 1] != 0;
        if (plus && minus)
            throw InternalError(
                "facet selected in both orientations despite strictly positive weights");
        if (plus || minus) {
            s.facets.push_back(static_cast<int>(f));
            s.orientation.push_back(plus ? std::int8_t{1} : std::int8_t{-1});
            s.weight += k.facets[f].weight;
        }
    }

    // Boundary exactness in integer arithmetic.
    if (surface_boundary(k, s) != cycle_chain(k, h))
        throw InternalError("surface boundary chain differs from the input cycle");

    s.component_count = facet_component_count(k, s.facets);
    return s;
}

void save_surface(const Surface& s, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "cracksynth-surface 1\n";
    f << "weight " << io_detail::fmt(s.weight) << '\n';
    f << "facets " << s.facets.size() << '\n';
    for (std::size_t i = 0; i < s.facets.size(); ++i)
        f << (s.orientation[i] > 0 ? s.facets[i] + 1 : -(s.facets[i] + 1)) << '\n';
    if (!f) throw IoError("write failed: " + path);
}

Surface load_surface(const CellComplex& k, const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string magic;
    int version = 0;
    f >> magic >> version;
    if (magic != "cracksynth-surface" || version != 1)
        throw IoError("not a surface file: " + path);
    std::string tag;
    std::string wtext;
    f >> tag >> wtext;
    if (tag != "weight") throw IoError("expected weight line");
    std::size_t count = 0;
    f >> tag >> count;
    if (tag != "facets") throw IoError("expected facets line");
    Surface s;
    for (std::size_t i = 0; i < count; ++i) {
        long long signed_id = 0;
        f >> signed_id;
        if (!f) throw IoError("truncated surface file");
        int fid = static_cast<int>(std::llabs(signed_id)) - 1;
        if (fid < 0 || fid >= static_cast<int>(k.facets.size()))
            throw IoError("facet id out of range in surface file");
        s.facets.push_back(fid);
        s.orientation.push_back(signed_id > 0 ? std::int8_t{1} : std::int8_t{-1});
        s.weight += k.facets[fid].weight;
    }
    s.component_count = facet_component_count(k, s.facets);
    return s;
}

}  // namespace cracksynth

#include "cracksynth/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cracksynth/errors.hpp"
#include "cracksynth/io_detail.hpp"
#include "cracksynth/rng.hpp"

namespace cracksynth {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::string to_string(PointModelKind kind) {
    switch (kind) {
        case PointModelKind::Poisson: return "poisson";
        case PointModelKind::MaternCluster: return "matern_cluster";
        case PointModelKind::Hardcore: return "hardcore";
    }
    throw InternalError("unknown point model kind");
}

PointModelKind point_model_kind_from_string(const std::string& s) {
    if (s == "poisson") return PointModelKind::Poisson;
    if (s == "matern_cluster") return PointModelKind::MaternCluster;
    if (s == "hardcore") return PointModelKind::Hardcore;
    throw ConfigError("unknown point model: " + s);
}

PointPattern sample_poisson(double lambda, const Cuboid& q, std::uint64_t seed) {
    if (!(lambda >= 0.0)) throw ConfigError("poisson intensity must be >= 0");
    PointPattern p;
    p.cuboid = q;
    p.model = {PointModelKind::Poisson, lambda, 0.0, 0.0, 0.0};
    p.seed = seed;

    Rng rng(seed);
    std::uint64_t count = rng.poisson(lambda * q.volume());
    p.points.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) p.points.push_back(rng.point_in_cuboid(q));
    return p;
}

PointPattern sample_matern_cluster(double lambda_parent, double mu_daughter, double r,
                                   const Cuboid& q, std::uint64_t seed) {
    if (!(lambda_parent >= 0.0) || !(mu_daughter >= 0.0) || !(r >= 0.0))
        throw ConfigError("matern cluster parameters must be >= 0");
    PointPattern p;
    p.cuboid = q;
    p.model = {PointModelKind::MaternCluster, lambda_parent, mu_daughter, r, 0.0};
    p.seed = seed;

    Rng rng(seed);
    // Parents live on Q dilated by r so daughter intensity has no edge dip.
    double dil_volume = (q.d1 + 2.0 * r) * (q.d2 + 2.0 * r) * (q.d3 + 2.0 * r);
    std::uint64_t parents = rng.poisson(lambda_parent * dil_volume);
    for (std::uint64_t i = 0; i < parents; ++i) {
        Vec3 parent{rng.uniform(-r, q.d1 + r), rng.uniform(-r, q.d2 + r),
                    rng.uniform(-r, q.d3 + r)};
        std::uint64_t daughters = rng.poisson(mu_daughter);
        for (std::uint64_t d = 0; d < daughters; ++d) {
            Vec3 candidate = parent + rng.point_in_ball(r);
            if (q.contains_half_open(candidate)) p.points.push_back(candidate);
        }
    }
    return p;
}

double hardcore_radius(std::uint64_t count, double volume_fraction, double box_volume) {
    if (count == 0) return 0.0;
    return std::cbrt(3.0 * volume_fraction * box_volume /
                     (4.0 * kPi * static_cast<double>(count)));
}

namespace {

// Displacement vector on the torus: the representative of b-a with smallest
// norm under periodic wrapping of the box.
Vec3 torus_delta(const Vec3& a, const Vec3& b, const Cuboid& q) {
    Vec3 d = b - a;
    for (int k = 0; k < 3; ++k) {
        double e = q.extent(k);
        if (d[k] > 0.5 * e)
            d[k] -= e;
        else if (d[k] < -0.5 * e)
            d[k] += e;
    }
    return d;
}

void wrap_into_box(Vec3& p, const Cuboid& q) {
    for (int k = 0; k < 3; ++k) {
        double e = q.extent(k);
        p[k] -= std::floor(p[k] / e) * e;
        if (p[k] >= e) p[k] = std::nextafter(e, 0.0);
        if (p[k] < 0.0) p[k] = 0.0;
    }
}

// Uniform grid over the (periodic) box for neighbor queries at range cutoff.
struct PeriodicGrid {
    Cuboid box;
    int nx, ny, nz;

    PeriodicGrid(const Cuboid& q, double cutoff) : box(q) {
        nx = std::max(1, static_cast<int>(std::floor(q.d1 / cutoff)));
        ny = std::max(1, static_cast<int>(std::floor(q.d2 / cutoff)));
        nz = std::max(1, static_cast<int>(std::floor(q.d3 / cutoff)));
        cells.assign(static_cast<std::size_t>(nx) * ny * nz, {});
    }

    int cell_of(const Vec3& p) const {
        int ix = std::min(nx - 1, static_cast<int>(p.x / box.d1 * nx));
        int iy = std::min(ny - 1, static_cast<int>(p.y / box.d2 * ny));
        int iz = std::min(nz - 1, static_cast<int>(p.z / box.d3 * nz));
        return (ix * ny + iy) * nz + iz;
    }

    void build(const std::vector<Vec3>& pts) {
        for (auto& c : cells) c.clear();
        for (std::size_t i = 0; i < pts.size(); ++i)
            cells[cell_of(pts[i])].push_back(static_cast<int>(i));
    }

    // Calls fn(j) for every point index in the 27 wrapped cells around p.
    template <typename Fn>
    void for_neighborhood(const Vec3& p, Fn&& fn) const {
        int ix = std::min(nx - 1, static_cast<int>(p.x / box.d1 * nx));
        int iy = std::min(ny - 1, static_cast<int>(p.y / box.d2 * ny));
        int iz = std::min(nz - 1, static_cast<int>(p.z / box.d3 * nz));
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    int cx = (ix + dx + nx) % nx;
                    int cy = (iy + dy + ny) % ny;
                    int cz = (iz + dz + nz) % nz;
                    for (int j : cells[(static_cast<std::size_t>(cx) * ny + cy) * nz + cz]) fn(j);
                }
    }

    std::vector<std::vector<int>> cells;
};

}  // namespace

PointPattern sample_hardcore(double lambda, double volume_fraction, const Cuboid& q,
                             std::uint64_t seed, std::uint64_t max_sweeps) {
    if (!(lambda >= 0.0)) throw ConfigError("hardcore intensity must be >= 0");
    if (!(volume_fraction > 0.0) || volume_fraction > 0.64)
        throw ConfigError("hardcore volume fraction must lie in (0, 0.64]");

    PointPattern p;
    p.cuboid = q;
    p.model = {PointModelKind::Hardcore, lambda, 0.0, 0.0, volume_fraction};
    p.seed = seed;

    auto count = static_cast<std::uint64_t>(std::llround(lambda * q.volume()));
    if (count == 0) return p;

    Rng rng(seed);
    std::vector<Vec3> pts(count);
    for (auto& pt : pts) pt = rng.point_in_cuboid(q);
    if (count == 1) {
        p.points = std::move(pts);
        return p;
    }

    double target = 2.0 * hardcore_radius(count, volume_fraction, q.volume());
    double min_extent = std::min({q.d1, q.d2, q.d3});

    // Overlaps are resolved on the torus; torus distance bounds Euclidean
    // distance from below, so the emitted points keep the hard minimum.
    // The repulsion range starts above the target diameter and shrinks
    // geometrically toward it, a force-biased continuation scheme.
    double outer = std::min(target * 1.3, 0.999 * min_extent / 2.0);
    outer = std::max(outer, target);
    if (target > min_extent / 2.0 * 1.999) {
        // Grid cells cannot cover the interaction range; fall back to the
        // largest usable range. Only reachable for tiny counts.
        outer = target;
    }

    std::vector<Vec3> disp(count);
    bool converged = false;
    for (std::uint64_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double cutoff = std::min(outer, 0.999 * min_extent / 2.0);
        PeriodicGrid grid(q, std::max(cutoff, 1e-12));
        grid.build(pts);

        bool any_hard_overlap = false;
        for (auto& d : disp) d = Vec3{};
        for (std::size_t i = 0; i < count; ++i) {
            grid.for_neighborhood(pts[i], [&](int j) {
                if (static_cast<std::size_t>(j) == i) return;
                Vec3 delta = torus_delta(pts[i], pts[j], q);
                double dsq = norm2(delta);
                if (dsq < target * target) any_hard_overlap = true;
                if (dsq < outer * outer) {
                    double dn = std::sqrt(dsq);
                    Vec3 dir;
                    if (dn > 1e-14 * target) {
                        dir = delta / dn;
                    } else {
                        // Coincident pair: deterministic pseudo-random
                        // separation direction from the pair indices.
                        Rng pair_rng = rng.split(0x7F00000000000000ull ^
                                                 (static_cast<std::uint64_t>(i) << 32) ^
                                                 static_cast<std::uint64_t>(j));
                        dir = normalized(Vec3{pair_rng.next_double() - 0.5,
                                              pair_rng.next_double() - 0.5,
                                              pair_rng.next_double() - 0.5});
                        dn = 0.0;
                    }
                    disp[i] -= dir * (0.5 * (outer - dn));
                }
            });
        }
        if (!any_hard_overlap && outer <= target * (1.0 + 1e-12)) {
            converged = true;
            break;
        }
        for (std::size_t i = 0; i < count; ++i) {
            pts[i] += disp[i];
            wrap_into_box(pts[i], q);
        }
        outer = std::max(target, 0.99 * outer);
    }

    if (!converged) {
        // Final exact check; the sweep flag may be stale after the last move.
        bool ok = true;
        for (std::size_t i = 0; i < count && ok; ++i)
            for (std::size_t j = i + 1; j < count && ok; ++j)
                if (norm2(torus_delta(pts[i], pts[j], q)) < target * target) ok = false;
        if (!ok)
            throw NonConvergenceError(
                "force-biased packing did not reach the requested volume fraction (count=" +
                std::to_string(count) + ", vf=" + std::to_string(volume_fraction) + ")");
    }

    p.points = std::move(pts);
    return p;
}

void save_point_pattern(const PointPattern& p, const std::string& csv_path,
                        const std::string& json_path) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open for writing: " + csv_path);
    for (const auto& pt : p.points)
        csv << io_detail::fmt(pt.x) << ',' << io_detail::fmt(pt.y) << ',' << io_detail::fmt(pt.z)
            << '\n';
    if (!csv) throw IoError("write failed: " + csv_path);

    nlohmann::json j;
    j["model"] = to_string(p.model.kind);
    j["parameters"]["lambda"] = p.model.lambda;
    if (p.model.kind == PointModelKind::MaternCluster) {
        j["parameters"]["mu"] = p.model.mu;
        j["parameters"]["radius"] = p.model.radius;
    }
    if (p.model.kind == PointModelKind::Hardcore)
        j["parameters"]["volume_fraction"] = p.model.volume_fraction;
    j["seed"] = p.seed;
    j["cuboid"] = {p.cuboid.d1, p.cuboid.d2, p.cuboid.d3};
    j["count"] = p.points.size();
    std::ofstream js(json_path, std::ios::binary);
    if (!js) throw IoError("cannot open for writing: " + json_path);
    js << j.dump(2) << '\n';
}

PointPattern load_point_pattern(const std::string& csv_path, const std::string& json_path) {
    std::ifstream js(json_path, std::ios::binary);
    if (!js) throw IoError("cannot open: " + json_path);
    nlohmann::json j = nlohmann::json::parse(js);

    PointPattern p;
    p.model.kind = point_model_kind_from_string(j.at("model").get<std::string>());
    p.model.lambda = j.at("parameters").value("lambda", 0.0);
    p.model.mu = j.at("parameters").value("mu", 0.0);
    p.model.radius = j.at("parameters").value("radius", 0.0);
    p.model.volume_fraction = j.at("parameters").value("volume_fraction", 0.0);
    p.seed = j.at("seed").get<std::uint64_t>();
    auto dims = j.at("cuboid");
    p.cuboid = Cuboid(dims.at(0).get<double>(), dims.at(1).get<double>(), dims.at(2).get<double>());

    std::ifstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open: " + csv_path);
    std::string line;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        Vec3 pt;
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) {
            std::size_t end = (k < 2) ? line.find(',', pos) : line.size();
            if (end == std::string::npos) throw IoError("malformed CSV line: " + line);
            pt[k] = io_detail::parse_double(line.substr(pos, end - pos));
            pos = end + 1;
        }
        p.points.push_back(pt);
    }
    return p;
}

}  // namespace cracksynth

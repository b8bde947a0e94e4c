#include "cracksynth/raster.hpp"

#include <algorithm>
#include <cmath>

#include "cracksynth/parallel.hpp"
#include "cracksynth/point_process.hpp"
#include "cracksynth/rng.hpp"

namespace cracksynth {

namespace {

// Exact nearest-generator queries over a bucket grid. Ties resolve to the
// lowest generator id.
class NearestGenerator {
  public:
    NearestGenerator(std::vector<Vec3> pts, const Cuboid& box) : pts_(std::move(pts)), box_(box) {
        double target = std::cbrt(box.volume() / static_cast<double>(std::max<std::size_t>(
                                                     pts_.size(), std::size_t{1})));
        nx_ = std::max(1, static_cast<int>(box.d1 / target));
        ny_ = std::max(1, static_cast<int>(box.d2 / target));
        nz_ = std::max(1, static_cast<int>(box.d3 / target));
        nx_ = std::min(nx_, 256);
        ny_ = std::min(ny_, 256);
        nz_ = std::min(nz_, 256);
        side_ = std::min({box.d1 / nx_, box.d2 / ny_, box.d3 / nz_});
        buckets_.assign(static_cast<std::size_t>(nx_) * ny_ * nz_, {});
        for (std::size_t i = 0; i < pts_.size(); ++i)
            buckets_[bucket_of(pts_[i])].push_back(static_cast<int>(i));
    }

    int nearest(const Vec3& p) const {
        int bx = clampi(static_cast<int>(p.x / box_.d1 * nx_), nx_);
        int by = clampi(static_cast<int>(p.y / box_.d2 * ny_), ny_);
        int bz = clampi(static_cast<int>(p.z / box_.d3 * nz_), nz_);
        int best = -1;
        double best_d2 = 0.0;
        int max_shell = std::max({nx_, ny_, nz_});
        for (int s = 0; s <= max_shell; ++s) {
            // Everything in shell s is at least (s-1)*side_ away; once the
            // incumbent beats that, no farther shell can improve it.
            if (best >= 0) {
                double reach = (s - 1) * side_;
                if (reach > 0.0 && best_d2 <= reach * reach) break;
            }
            scan_shell(p, bx, by, bz, s, best, best_d2);
        }
        return best;
    }

  private:
    static int clampi(int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); }

    std::size_t bucket_index(int x, int y, int z) const {
        return (static_cast<std::size_t>(x) * ny_ + y) * nz_ + z;
    }
    std::size_t bucket_of(const Vec3& p) const {
        return bucket_index(clampi(static_cast<int>(p.x / box_.d1 * nx_), nx_),
                            clampi(static_cast<int>(p.y / box_.d2 * ny_), ny_),
                            clampi(static_cast<int>(p.z / box_.d3 * nz_), nz_));
    }

    void consider(const Vec3& p, int x, int y, int z, int& best, double& best_d2) const {
        for (int id : buckets_[bucket_index(x, y, z)]) {
            double d2 = dist2(pts_[id], p);
            if (best < 0 || d2 < best_d2 || (d2 == best_d2 && id < best)) {
                best = id;
                best_d2 = d2;
            }
        }
    }

    void scan_shell(const Vec3& p, int bx, int by, int bz, int s, int& best,
                    double& best_d2) const {
        int x0 = bx - s, x1 = bx + s;
        int y0 = by - s, y1 = by + s;
        int z0 = bz - s, z1 = bz + s;
        for (int x = std::max(0, x0); x <= std::min(nx_ - 1, x1); ++x)
            for (int y = std::max(0, y0); y <= std::min(ny_ - 1, y1); ++y)
                for (int z = std::max(0, z0); z <= std::min(nz_ - 1, z1); ++z) {
                    bool on_shell = x == x0 || x == x1 || y == y0 || y == y1 || z == z0 || z == z1;
                    if (on_shell) consider(p, x, y, z, best, best_d2);
                }
    }

    std::vector<Vec3> pts_;
    Cuboid box_;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    double side_ = 1.0;
    std::vector<std::vector<int>> buckets_;
};

LabelVolume label_by_nearest(const std::vector<Vec3>& generators,
                             const std::vector<int>& labels_of_gen, const Cuboid& domain, int d1,
                             int d2, int d3, int threads) {
    LabelVolume out(d1, d2, d3);
    NearestGenerator nn(generators, domain);
    double sx = domain.d1 / d1, sy = domain.d2 / d2, sz = domain.d3 / d3;
    parallel_for(static_cast<std::size_t>(d1), threads, [&](std::size_t x) {
        for (int y = 0; y < d2; ++y)
            for (int z = 0; z < d3; ++z) {
                Vec3 center{(static_cast<double>(x) + 0.5) * sx, (y + 0.5) * sy, (z + 0.5) * sz};
                out.at(static_cast<int>(x), y, z) = labels_of_gen[nn.nearest(center)];
            }
    });
    return out;
}

}  // namespace

LabelVolume rasterize_labels(const std::vector<VoronoiCell>& cells, const Cuboid& domain, int d1,
                             int d2, int d3, int threads) {
    if (cells.empty()) throw ConfigError("rasterize_labels needs at least one cell");
    std::vector<Vec3> gens(cells.size());
    std::vector<int> labels(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        gens[i] = cells[i].generator;
        labels[i] = cells[i].generator_id;
    }
    return label_by_nearest(gens, labels, domain, d1, d2, d3, threads);
}

std::set<GeneratorPair> surface_generator_pairs(const CellComplex& k, const Surface& s) {
    std::set<GeneratorPair> pairs;
    for (int fid : s.facets) {
        const auto& f = k.facets[fid];
        if (f.cell_b < 0) continue;  // boundary facet, single incident cell
        pairs.insert({std::min(f.cell_a, f.cell_b), std::max(f.cell_a, f.cell_b)});
    }
    return pairs;
}

BinaryVolume rasterize_surface(const LabelVolume& labels, const std::set<GeneratorPair>& pairs) {
    BinaryVolume out(labels.d1, labels.d2, labels.d3, 0);
    if (pairs.empty()) return out;
    // Half the 26-neighborhood: first nonzero offset component positive.
    static constexpr int kOffsets[13][3] = {{1, 0, 0},  {0, 1, 0},   {0, 0, 1},  {1, 1, 0},
                                            {1, -1, 0}, {1, 0, 1},   {1, 0, -1}, {0, 1, 1},
                                            {0, 1, -1}, {1, 1, 1},   {1, 1, -1}, {1, -1, 1},
                                            {1, -1, -1}};
    for (int x = 0; x < labels.d1; ++x)
        for (int y = 0; y < labels.d2; ++y)
            for (int z = 0; z < labels.d3; ++z) {
                std::int32_t a = labels.at(x, y, z);
                for (const auto& o : kOffsets) {
                    int nx = x + o[0], ny = y + o[1], nz = z + o[2];
                    if (!labels.in_bounds(nx, ny, nz)) continue;
                    std::int32_t b = labels.at(nx, ny, nz);
                    if (a == b) continue;
                    if (pairs.count({std::min(a, b), std::max(a, b)})) {
                        out.at(x, y, z) = 1;
                        out.at(nx, ny, nz) = 1;
                    }
                }
            }
    return out;
}

std::vector<int> dilation_walk(int d1, const DilationSpec& spec) {
    if (!(spec.p >= 0.0) || spec.p > 1.0) throw ConfigError("dilation p must lie in [0,1]");
    Rng base(spec.seed);
    std::vector<int> w(d1, 0);
    for (int x = 1; x < d1; ++x) {
        int inc = base.split(static_cast<std::uint64_t>(x)).bernoulli(spec.p) ? 1 : 0;
        w[x] = w[x - 1] + inc;
    }
    return w;
}

namespace {

// k iterations of the 2x2 dilation equal one pass with the {0..k}^2 element:
// output(y,z) = OR of input over [y-k, y] x [z-k, z]. Runs as two sliding
// window passes using prefix counts.
void dilate_slice(const BinaryVolume& in, BinaryVolume& out, int x, int k) {
    int d2 = in.d2, d3 = in.d3;
    std::vector<std::uint8_t> tmp(static_cast<std::size_t>(d2) * d3, 0);
    // Window along y.
    for (int z = 0; z < d3; ++z) {
        std::vector<int> prefix(d2 + 1, 0);
        for (int y = 0; y < d2; ++y) prefix[y + 1] = prefix[y] + (in.at(x, y, z) ? 1 : 0);
        for (int y = 0; y < d2; ++y) {
            int lo = std::max(0, y - k);
            tmp[static_cast<std::size_t>(y) * d3 + z] = prefix[y + 1] - prefix[lo] > 0 ? 1 : 0;
        }
    }
    // Window along z.
    for (int y = 0; y < d2; ++y) {
        std::vector<int> prefix(d3 + 1, 0);
        for (int z = 0; z < d3; ++z)
            prefix[z + 1] = prefix[z] + (tmp[static_cast<std::size_t>(y) * d3 + z] ? 1 : 0);
        for (int z = 0; z < d3; ++z) {
            int lo = std::max(0, z - k);
            out.at(x, y, z) = prefix[z + 1] - prefix[lo] > 0 ? 1 : 0;
        }
    }
}

}  // namespace

BinaryVolume adaptive_dilate(const BinaryVolume& j, const DilationSpec& spec) {
    auto walk = dilation_walk(j.d1, spec);
    BinaryVolume out(j.d1, j.d2, j.d3, 0);
    for (int x = 0; x < j.d1; ++x) dilate_slice(j, out, x, walk[x]);
    return out;
}

BinaryVolume apply_microstructure(const BinaryVolume& j, double fine_lambda, std::uint64_t seed,
                                  int threads) {
    Cuboid domain(j.d1, j.d2, j.d3);
    PointPattern fine = sample_poisson(fine_lambda, domain, seed);
    if (fine.points.empty()) return j;

    std::vector<int> ids(fine.points.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    LabelVolume labels = label_by_nearest(fine.points, ids, domain, j.d1, j.d2, j.d3, threads);

    std::vector<std::uint8_t> hit(fine.points.size(), 0);
    for (std::size_t i = 0; i < j.data.size(); ++i)
        if (j.data[i]) hit[labels.data[i]] = 1;

    BinaryVolume out(j.d1, j.d2, j.d3);
    for (std::size_t i = 0; i < j.data.size(); ++i) out.data[i] = hit[labels.data[i]];
    return out;
}

BinaryVolume median_filter_binary(const BinaryVolume& j, int radius) {
    if (radius < 1) throw ConfigError("median radius must be >= 1");
    int d1 = j.d1, d2 = j.d2, d3 = j.d3;
    // 3D prefix sums for O(1) window counts; padding counts as zero.
    std::vector<std::int64_t> ps(static_cast<std::size_t>(d1 + 1) * (d2 + 1) * (d3 + 1), 0);
    auto P = [&](int x, int y, int z) -> std::int64_t& {
        return ps[(static_cast<std::size_t>(x) * (d2 + 1) + y) * (d3 + 1) + z];
    };
    for (int x = 1; x <= d1; ++x)
        for (int y = 1; y <= d2; ++y)
            for (int z = 1; z <= d3; ++z)
                P(x, y, z) = (j.at(x - 1, y - 1, z - 1) ? 1 : 0) + P(x - 1, y, z) +
                             P(x, y - 1, z) + P(x, y, z - 1) - P(x - 1, y - 1, z) -
                             P(x - 1, y, z - 1) - P(x, y - 1, z - 1) + P(x - 1, y - 1, z - 1);

    auto box_count = [&](int x0, int y0, int z0, int x1, int y1, int z1) {
        x0 = std::max(x0, 0);
        y0 = std::max(y0, 0);
        z0 = std::max(z0, 0);
        x1 = std::min(x1, d1 - 1);
        y1 = std::min(y1, d2 - 1);
        z1 = std::min(z1, d3 - 1);
        return P(x1 + 1, y1 + 1, z1 + 1) - P(x0, y1 + 1, z1 + 1) - P(x1 + 1, y0, z1 + 1) -
               P(x1 + 1, y1 + 1, z0) + P(x0, y0, z1 + 1) + P(x0, y1 + 1, z0) +
               P(x1 + 1, y0, z0) - P(x0, y0, z0);
    };

    long long window = static_cast<long long>(2 * radius + 1);
    window = window * window * window;
    BinaryVolume out(d1, d2, d3);
    for (int x = 0; x < d1; ++x)
        for (int y = 0; y < d2; ++y)
            for (int z = 0; z < d3; ++z) {
                auto cnt = box_count(x - radius, y - radius, z - radius, x + radius, y + radius,
                                     z + radius);
                out.at(x, y, z) = 2 * cnt > window ? 1 : 0;
            }
    return out;
}

BinaryVolume union_branching(const BinaryVolume& j1, const BinaryVolume& j2) {
    if (!j1.same_dims(j2.d1, j2.d2, j2.d3))
        throw DimensionMismatchError("union_branching: volume dims differ");
    BinaryVolume out = j1;
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (out.data[i] || j2.data[i]) ? 1 : 0;
    return out;
}

}  // namespace cracksynth

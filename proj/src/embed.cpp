#include "cracksynth/embed.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cracksynth/rng.hpp"

namespace cracksynth {

namespace {

std::uint16_t clamp_round_u16(double v) {
    if (!(v > 0.0)) return 0;
    if (v >= 65535.0) return 65535;
    return static_cast<std::uint16_t>(std::lround(v));
}

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma <= 0.0) return {1.0};
    int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;
    return k;
}

// One separable blur pass along `axis`, renormalizing the kernel where it
// hangs over the border.
void blur_axis(std::vector<double>& data, int d1, int d2, int d3, int axis,
               const std::vector<double>& kernel) {
    int r = static_cast<int>(kernel.size() / 2);
    if (r == 0) return;
    int dims[3] = {d1, d2, d3};
    std::size_t stride[3] = {static_cast<std::size_t>(d2) * d3, static_cast<std::size_t>(d3), 1};
    int n = dims[axis];
    std::size_t s = stride[axis];
    std::vector<double> line(n);

    int o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
    for (int a = 0; a < dims[o1]; ++a)
        for (int b = 0; b < dims[o2]; ++b) {
            std::size_t base = static_cast<std::size_t>(a) * stride[o1] +
                               static_cast<std::size_t>(b) * stride[o2];
            for (int i = 0; i < n; ++i) line[i] = data[base + static_cast<std::size_t>(i) * s];
            for (int i = 0; i < n; ++i) {
                double acc = 0.0, wsum = 0.0;
                int lo = std::max(-r, -i), hi = std::min(r, n - 1 - i);
                for (int t = lo; t <= hi; ++t) {
                    acc += kernel[t + r] * line[i + t];
                    wsum += kernel[t + r];
                }
                data[base + static_cast<std::size_t>(i) * s] = acc / wsum;
            }
        }
}

}  // namespace

GrayStats estimate_pore_stats(const GrayVolume& patch, const BinaryVolume& pore_mask) {
    if (!pore_mask.same_dims(patch.d1, patch.d2, patch.d3))
        throw DimensionMismatchError("pore mask dims differ from patch dims");
    std::size_t n = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < patch.data.size(); ++i)
        if (pore_mask.data[i]) {
            sum += patch.data[i];
            ++n;
        }
    if (n < 2) throw InsufficientSamplesError("pore mask selects fewer than 2 voxels");
    double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < patch.data.size(); ++i)
        if (pore_mask.data[i]) {
            double d = patch.data[i] - mean;
            ss += d * d;
        }
    GrayStats st;
    st.mean = mean;
    st.std = std::sqrt(ss / static_cast<double>(n - 1));
    st.source = GrayStats::Source::EstimatedFromPores;
    return st;
}

BinaryVolume threshold_mask(const GrayVolume& patch, std::uint16_t threshold) {
    BinaryVolume m(patch.d1, patch.d2, patch.d3);
    for (std::size_t i = 0; i < patch.data.size(); ++i)
        m.data[i] = patch.data[i] < threshold ? 1 : 0;
    return m;
}

GrayVolume synthetic_background(int d1, int d2, int d3, double mu, double noise_std,
                                std::uint64_t seed) {
    GrayVolume v(d1, d2, d3);
    Rng rng(seed, 0xBACC6);
    for (std::size_t i = 0; i < v.data.size(); ++i)
        v.data[i] = clamp_round_u16(mu + noise_std * rng.normal_at(i));
    return v;
}

GrayVolume embed_crack(const GrayVolume& patch, const BinaryVolume& gt, const GrayStats& stats,
                       double sigma, std::uint64_t seed) {
    if (!gt.same_dims(patch.d1, patch.d2, patch.d3))
        throw DimensionMismatchError("ground truth dims differ from patch dims");
    if (sigma < 0.0) throw ConfigError("blur sigma must be >= 0");

    GrayVolume out = patch;
    Rng rng(seed, 0xC4ACC);

    // Zero crack voxels, then redraw them from the pore distribution.
    for (std::size_t i = 0; i < out.data.size(); ++i)
        if (gt.data[i]) out.data[i] = clamp_round_u16(stats.mean + stats.std * rng.normal_at(i));

    if (sigma <= 0.0) return out;

    // Halo: crack voxels and their 26-neighbors receive the blurred values;
    // everything else keeps its exact input bits.
    BinaryVolume halo(gt.d1, gt.d2, gt.d3, 0);
    for (int x = 0; x < gt.d1; ++x)
        for (int y = 0; y < gt.d2; ++y)
            for (int z = 0; z < gt.d3; ++z) {
                if (!gt.at(x, y, z)) continue;
                for (int dx = -1; dx <= 1; ++dx)
                    for (int dy = -1; dy <= 1; ++dy)
                        for (int dz = -1; dz <= 1; ++dz)
                            if (gt.in_bounds(x + dx, y + dy, z + dz))
                                halo.at(x + dx, y + dy, z + dz) = 1;
            }

    std::vector<double> field(out.data.begin(), out.data.end());
    auto kernel = gaussian_kernel(sigma);
    blur_axis(field, out.d1, out.d2, out.d3, 0, kernel);
    blur_axis(field, out.d1, out.d2, out.d3, 1, kernel);
    blur_axis(field, out.d1, out.d2, out.d3, 2, kernel);

    for (std::size_t i = 0; i < out.data.size(); ++i)
        if (halo.data[i]) out.data[i] = clamp_round_u16(field[i]);
    return out;
}

}  // namespace cracksynth

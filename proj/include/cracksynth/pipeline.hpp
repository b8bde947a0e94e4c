#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cracksynth/complex.hpp"
#include "cracksynth/embed.hpp"
#include "cracksynth/graph_paths.hpp"
#include "cracksynth/minsurf.hpp"
#include "cracksynth/point_process.hpp"
#include "cracksynth/raster.hpp"
#include "cracksynth/volume.hpp"

namespace cracksynth {

// End-to-end configuration. One world unit equals one voxel, so the cuboid
// extents must be integers (>= 8 per axis). Every random stage carries an
// explicit seed.
struct PipelineConfig {
    Cuboid cuboid{64, 64, 64};

    PointModel model;
    std::uint64_t point_seed = 0;

    ArcWeightMode arc_weights = ArcWeightMode::Length;
    FacetWeightMode facet_weights = FacetWeightMode::Area;

    std::array<double, 4> cycle_heights{0.5, 0.5, 0.5, 0.5};

    bool second_cycle_enabled = false;
    std::array<double, 4> second_cycle_heights{0.25, 0.25, 0.25, 0.25};
    bool second_cycle_dilate = false;  // branches are 1-2 voxels thin by default

    DilationSpec dilation;

    bool microstructure_enabled = false;
    double fine_lambda = 0.0;
    std::uint64_t microstructure_seed = 0;

    int median_radius = 0;  // 0 disables the filter

    enum class EmbeddingMode { Synthetic, Patch } embedding_mode = EmbeddingMode::Synthetic;
    double background_mu = 120.0;
    double background_noise = 12.0;
    double crack_mean = 40.0;  // synthetic mode: manual crack grayvalue stats
    double crack_std = 8.0;
    std::string patch_raw, patch_json;  // patch mode inputs
    std::uint16_t pore_threshold = 60;
    double embed_sigma = 0.7;
    std::uint64_t embed_seed = 0;

    std::string output_dir = "out";
    bool keep_intermediates = false;
    int threads = 1;

    void validate() const;
    int dim1() const { return static_cast<int>(cuboid.d1 + 0.5); }
    int dim2() const { return static_cast<int>(cuboid.d2 + 0.5); }
    int dim3() const { return static_cast<int>(cuboid.d3 + 0.5); }
};

// JSON round-trip of the full configuration. load accepts either a plain
// config document or a provenance record (its "config" member is used), so
// reruns from provenance reproduce outputs byte-exactly.
PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig pipeline_config_from_json_text(const std::string& text);
std::string pipeline_config_to_json_text(const PipelineConfig& cfg);

struct PipelineResult {
    PointPattern pattern;
    std::vector<VoronoiCell> cells;
    CellComplex complex;
    Cycle cycle;
    Surface surface;
    std::optional<Cycle> second_cycle;
    std::optional<Surface> second_surface;

    LabelVolume labels;
    BinaryVolume raster;       // surface discretization before morphology
    BinaryVolume ground_truth; // after dilation/branching/microstructure/median
    GrayVolume crack_image;

    std::string provenance_json;  // deterministic record of the run
};

// Runs the full chain: sample -> voronoi -> complex -> weights -> cycle ->
// surface -> rasterize -> dilate -> (branch union) -> microstructure ->
// median -> embed. When write_outputs is set, results land in
// cfg.output_dir (gt/crack volumes, surface mesh, provenance, plus all
// intermediates with keep_intermediates). Stage errors are rethrown with a
// "stage:" message prefix.
PipelineResult run_pipeline(const PipelineConfig& cfg, bool write_outputs = true);

// Mesh exports per stage (diagram wireframe, cycle polyline, surface
// facets; second cycle/surface when enabled). Returns the written paths.
// When both surfaces exist, the shared facet count is reported in
// export_report.json.
std::vector<std::string> export_figure_assets(const PipelineConfig& cfg);

}  // namespace cracksynth

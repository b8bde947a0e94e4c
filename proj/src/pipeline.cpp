#include "cracksynth/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "cracksynth/errors.hpp"
#include "cracksynth/mesh_io.hpp"

namespace cracksynth {

namespace {

using nlohmann::json;

// Rethrows the caught library error with a stage prefix, preserving its type
// so CLI exit-code mapping still works.
[[noreturn]] void rethrow_tagged(const std::string& stage, const Error& e) {
    std::string msg = stage + ": " + e.what();
    if (dynamic_cast<const DegenerateInputError*>(&e)) throw DegenerateInputError(msg);
    if (dynamic_cast<const InconsistentGeometryError*>(&e)) throw InconsistentGeometryError(msg);
    if (dynamic_cast<const ZeroWeightError*>(&e)) throw ZeroWeightError(msg);
    if (dynamic_cast<const UnreachableError*>(&e)) throw UnreachableError(msg);
    if (dynamic_cast<const DegenerateCycleError*>(&e)) throw DegenerateCycleError(msg);
    if (dynamic_cast<const InvalidCycleError*>(&e)) throw InvalidCycleError(msg);
    if (dynamic_cast<const InfeasibleError*>(&e)) throw InfeasibleError(msg);
    if (dynamic_cast<const NodeLimitError*>(&e)) throw NodeLimitError(msg);
    if (dynamic_cast<const NonConvergenceError*>(&e)) throw NonConvergenceError(msg);
    if (dynamic_cast<const InsufficientSamplesError*>(&e)) throw InsufficientSamplesError(msg);
    if (dynamic_cast<const DimensionMismatchError*>(&e)) throw DimensionMismatchError(msg);
    if (dynamic_cast<const InvalidProgramError*>(&e)) throw InvalidProgramError(msg);
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
    if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
    throw InternalError(msg);
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        rethrow_tagged(name, e);
    }
}

void require_integral_extent(double v, const char* axis) {
    if (std::abs(v - std::round(v)) > 1e-9)
        throw ConfigError(std::string("cuboid extent on ") + axis +
                          " must be an integer voxel count");
}

}  // namespace

void PipelineConfig::validate() const {
    require_integral_extent(cuboid.d1, "x");
    require_integral_extent(cuboid.d2, "y");
    require_integral_extent(cuboid.d3, "z");
    if (dim1() < 8 || dim2() < 8 || dim3() < 8)
        throw ConfigError("raster dims must be >= 8 per axis");
    for (double h : cycle_heights)
        if (h < 0.0 || h > 1.0) throw ConfigError("cycle heights must lie in [0,1]");
    for (double h : second_cycle_heights)
        if (h < 0.0 || h > 1.0) throw ConfigError("cycle heights must lie in [0,1]");
    if (dilation.p < 0.0 || dilation.p > 1.0) throw ConfigError("dilation p must lie in [0,1]");
    if (microstructure_enabled && !(fine_lambda > 0.0))
        throw ConfigError("microstructure needs fine_lambda > 0");
    if (median_radius < 0) throw ConfigError("median radius must be >= 0");
    if (embed_sigma < 0.0) throw ConfigError("embedding sigma must be >= 0");
    if (crack_std < 0.0 || background_noise < 0.0)
        throw ConfigError("grayvalue noise levels must be >= 0");
    if (embedding_mode == EmbeddingMode::Patch && (patch_raw.empty() || patch_json.empty()))
        throw ConfigError("patch embedding needs patch_raw and patch_json paths");
    if (threads < 0) throw ConfigError("threads must be >= 0");
}

namespace {

PointModel model_from_json(const json& j) {
    PointModel m;
    m.kind = point_model_kind_from_string(j.at("model").get<std::string>());
    m.lambda = j.at("lambda").get<double>();
    m.mu = j.value("mu", 0.0);
    m.radius = j.value("radius", 0.0);
    m.volume_fraction = j.value("volume_fraction", 0.0);
    return m;
}

json model_to_json(const PointModel& m, std::uint64_t seed) {
    json j;
    j["model"] = to_string(m.kind);
    j["lambda"] = m.lambda;
    if (m.kind == PointModelKind::MaternCluster) {
        j["mu"] = m.mu;
        j["radius"] = m.radius;
    }
    if (m.kind == PointModelKind::Hardcore) j["volume_fraction"] = m.volume_fraction;
    j["seed"] = seed;
    return j;
}

std::array<double, 4> heights_from_json(const json& j) {
    auto v = j.get<std::vector<double>>();
    if (v.size() != 4) throw ConfigError("cycle heights must have 4 entries");
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace

PipelineConfig pipeline_config_from_json_text(const std::string& text) {
    json root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    if (root.contains("config")) root = root.at("config");  // provenance record

    PipelineConfig cfg;
    try {
        auto dims = root.at("cuboid").get<std::vector<double>>();
        if (dims.size() != 3) throw ConfigError("cuboid must have 3 extents");
        cfg.cuboid = Cuboid(dims[0], dims[1], dims[2]);

        const auto& pp = root.at("point_process");
        cfg.model = model_from_json(pp);
        cfg.point_seed = pp.at("seed").get<std::uint64_t>();

        if (root.contains("weights")) {
            cfg.arc_weights =
                arc_weight_mode_from_string(root["weights"].value("arc", "length"));
            cfg.facet_weights =
                facet_weight_mode_from_string(root["weights"].value("facet", "area"));
        }

        cfg.cycle_heights = heights_from_json(root.at("cycle").at("heights"));
        if (root.contains("second_cycle")) {
            const auto& sc = root["second_cycle"];
            cfg.second_cycle_enabled = sc.value("enabled", false);
            if (cfg.second_cycle_enabled) {
                cfg.second_cycle_heights = heights_from_json(sc.at("heights"));
                cfg.second_cycle_dilate = sc.value("dilate", false);
            }
        }

        const auto& dil = root.at("dilation");
        cfg.dilation.p = dil.at("p").get<double>();
        cfg.dilation.seed = dil.at("seed").get<std::uint64_t>();

        if (root.contains("microstructure")) {
            const auto& mi = root["microstructure"];
            cfg.microstructure_enabled = mi.value("enabled", false);
            if (cfg.microstructure_enabled) {
                cfg.fine_lambda = mi.at("fine_lambda").get<double>();
                cfg.microstructure_seed = mi.at("seed").get<std::uint64_t>();
            }
        }

        cfg.median_radius = root.value("median_radius", 0);

        const auto& em = root.at("embedding");
        std::string mode = em.value("mode", "synthetic");
        if (mode == "synthetic")
            cfg.embedding_mode = PipelineConfig::EmbeddingMode::Synthetic;
        else if (mode == "patch")
            cfg.embedding_mode = PipelineConfig::EmbeddingMode::Patch;
        else
            throw ConfigError("unknown embedding mode: " + mode);
        cfg.background_mu = em.value("background_mu", 120.0);
        cfg.background_noise = em.value("background_noise", 12.0);
        cfg.crack_mean = em.value("crack_mean", 40.0);
        cfg.crack_std = em.value("crack_std", 8.0);
        cfg.patch_raw = em.value("patch_raw", "");
        cfg.patch_json = em.value("patch_json", "");
        cfg.pore_threshold = static_cast<std::uint16_t>(em.value("pore_threshold", 60));
        cfg.embed_sigma = em.value("sigma", 0.7);
        cfg.embed_seed = em.at("seed").get<std::uint64_t>();

        cfg.output_dir = root.value("output_dir", "out");
        cfg.keep_intermediates = root.value("keep_intermediates", false);
        cfg.threads = root.value("threads", 1);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad pipeline config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return pipeline_config_from_json_text(text);
}

std::string pipeline_config_to_json_text(const PipelineConfig& cfg) {
    json j;
    j["cuboid"] = {cfg.cuboid.d1, cfg.cuboid.d2, cfg.cuboid.d3};
    j["point_process"] = model_to_json(cfg.model, cfg.point_seed);
    j["weights"] = {{"arc", to_string(cfg.arc_weights)}, {"facet", to_string(cfg.facet_weights)}};
    j["cycle"] = {{"heights", cfg.cycle_heights}};
    j["second_cycle"] = {{"enabled", cfg.second_cycle_enabled},
                         {"heights", cfg.second_cycle_heights},
                         {"dilate", cfg.second_cycle_dilate}};
    j["dilation"] = {{"p", cfg.dilation.p}, {"seed", cfg.dilation.seed}};
    j["microstructure"] = {{"enabled", cfg.microstructure_enabled},
                           {"fine_lambda", cfg.fine_lambda},
                           {"seed", cfg.microstructure_seed}};
    j["median_radius"] = cfg.median_radius;
    json em;
    em["mode"] = cfg.embedding_mode == PipelineConfig::EmbeddingMode::Synthetic ? "synthetic"
                                                                                : "patch";
    em["background_mu"] = cfg.background_mu;
    em["background_noise"] = cfg.background_noise;
    em["crack_mean"] = cfg.crack_mean;
    em["crack_std"] = cfg.crack_std;
    em["patch_raw"] = cfg.patch_raw;
    em["patch_json"] = cfg.patch_json;
    em["pore_threshold"] = cfg.pore_threshold;
    em["sigma"] = cfg.embed_sigma;
    em["seed"] = cfg.embed_seed;
    j["embedding"] = em;
    j["output_dir"] = cfg.output_dir;
    j["keep_intermediates"] = cfg.keep_intermediates;
    j["threads"] = cfg.threads;
    return j.dump(2);
}

namespace {

PointPattern sample_stage(const PipelineConfig& cfg) {
    switch (cfg.model.kind) {
        case PointModelKind::Poisson:
            return sample_poisson(cfg.model.lambda, cfg.cuboid, cfg.point_seed);
        case PointModelKind::MaternCluster:
            return sample_matern_cluster(cfg.model.lambda, cfg.model.mu, cfg.model.radius,
                                         cfg.cuboid, cfg.point_seed);
        case PointModelKind::Hardcore:
            return sample_hardcore(cfg.model.lambda, cfg.model.volume_fraction, cfg.cuboid,
                                   cfg.point_seed);
    }
    throw InternalError("unknown point model");
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, bool write_outputs) {
    cfg.validate();
    PipelineResult r;

    r.pattern = stage("sample", [&] { return sample_stage(cfg); });
    if (r.pattern.size() < 2)
        throw DegenerateInputError(
            "sample: point pattern has fewer than 2 points; raise the intensity or change "
            "the seed");

    VoronoiOptions vopts;
    vopts.threads = cfg.threads;
    r.cells = stage("voronoi", [&] { return build_bounded_voronoi(r.pattern, cfg.cuboid, vopts); });
    r.complex = stage("complex", [&] { return extract_complex(r.cells, cfg.cuboid); });
    stage("weights", [&] {
        assign_weights(r.complex, cfg.arc_weights, cfg.facet_weights);
        return 0;
    });
    r.cycle = stage("cycle", [&] { return boundary_cycle(r.complex, cfg.cuboid,
                                                         cfg.cycle_heights); });
    r.surface = stage("minsurf", [&] { return min_weight_surface(r.complex, r.cycle); });

    int d1 = cfg.dim1(), d2 = cfg.dim2(), d3 = cfg.dim3();
    r.labels = stage("raster", [&] {
        return rasterize_labels(r.cells, cfg.cuboid, d1, d2, d3, cfg.threads);
    });
    r.raster = stage("raster", [&] {
        return rasterize_surface(r.labels, surface_generator_pairs(r.complex, r.surface));
    });

    BinaryVolume j = stage("dilate", [&] { return adaptive_dilate(r.raster, cfg.dilation); });

    if (cfg.second_cycle_enabled) {
        r.second_cycle = stage("cycle", [&] {
            return boundary_cycle(r.complex, cfg.cuboid, cfg.second_cycle_heights);
        });
        r.second_surface =
            stage("minsurf", [&] { return min_weight_surface(r.complex, *r.second_cycle); });
        BinaryVolume j2 = stage("raster", [&] {
            return rasterize_surface(r.labels,
                                     surface_generator_pairs(r.complex, *r.second_surface));
        });
        if (cfg.second_cycle_dilate)
            j2 = stage("dilate", [&] { return adaptive_dilate(j2, cfg.dilation); });
        j = stage("branch", [&] { return union_branching(j, j2); });
    }

    if (cfg.microstructure_enabled)
        j = stage("microstructure", [&] {
            return apply_microstructure(j, cfg.fine_lambda, cfg.microstructure_seed, cfg.threads);
        });
    if (cfg.median_radius >= 1)
        j = stage("median", [&] { return median_filter_binary(j, cfg.median_radius); });
    r.ground_truth = j;

    GrayVolume patch;
    GrayStats stats;
    if (cfg.embedding_mode == PipelineConfig::EmbeddingMode::Synthetic) {
        patch = stage("embed", [&] {
            return synthetic_background(d1, d2, d3, cfg.background_mu, cfg.background_noise,
                                        cfg.embed_seed);
        });
        stats.mean = cfg.crack_mean;
        stats.std = cfg.crack_std;
        stats.source = GrayStats::Source::Manual;
    } else {
        patch = stage("embed", [&] { return load_gray_volume(cfg.patch_raw, cfg.patch_json); });
        if (!patch.same_dims(d1, d2, d3))
            throw DimensionMismatchError("embed: patch dims differ from raster dims");
        stats = stage("embed", [&] {
            return estimate_pore_stats(patch, threshold_mask(patch, cfg.pore_threshold));
        });
    }
    r.crack_image = stage("embed", [&] {
        return embed_crack(patch, r.ground_truth, stats, cfg.embed_sigma, cfg.embed_seed);
    });

    // Provenance: resolved config plus result fingerprints. Deliberately no
    // wall-clock data so identical runs serialize identically.
    json prov;
    prov["config"] = json::parse(pipeline_config_to_json_text(cfg));
    json res;
    res["point_count"] = r.pattern.size();
    res["complex"] = {{"vertices", r.complex.vertices.size()},
                      {"arcs", r.complex.arcs.size()},
                      {"facets", r.complex.facets.size()},
                      {"cells", r.complex.cells.size()}};
    res["cycle"] = {{"length", r.cycle.vertices.size()}, {"weight", r.cycle.weight}};
    res["surface"] = {{"facets", r.surface.facets.size()},
                      {"objective", r.surface.weight},
                      {"components", r.surface.component_count},
                      {"bb_nodes", r.surface.solver_stats.node_count},
                      {"lp_iterations", r.surface.solver_stats.lp_iterations}};
    if (r.second_surface) {
        res["second_cycle"] = {{"length", r.second_cycle->vertices.size()},
                               {"weight", r.second_cycle->weight}};
        res["second_surface"] = {{"facets", r.second_surface->facets.size()},
                                 {"objective", r.second_surface->weight},
                                 {"components", r.second_surface->component_count},
                                 {"bb_nodes", r.second_surface->solver_stats.node_count},
                                 {"lp_iterations", r.second_surface->solver_stats.lp_iterations}};
    }
    res["pore_stats"] = {{"mean", stats.mean}, {"std", stats.std}};
    res["gt_foreground"] = count_foreground(r.ground_truth);
    prov["results"] = res;
    r.provenance_json = prov.dump(2);

    if (write_outputs) {
        namespace fs = std::filesystem;
        fs::path dir(cfg.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output dir: " + cfg.output_dir);
        auto p = [&](const char* name) { return (dir / name).string(); };

        save_volume(r.ground_truth, p("gt.raw"), p("gt.json"));
        save_volume(r.crack_image, p("crack.raw"), p("crack.json"));
        export_surface_obj(r.complex, r.surface, p("surface.obj"));
        if (r.second_surface)
            export_surface_obj(r.complex, *r.second_surface, p("surface2.obj"));
        std::ofstream prov_out(p("provenance.json"), std::ios::binary);
        prov_out << r.provenance_json << '\n';
        if (!prov_out) throw IoError("write failed: provenance.json");

        if (cfg.keep_intermediates) {
            save_point_pattern(r.pattern, p("points.csv"), p("points.json"));
            save_complex(r.complex, p("complex.txt"));
            save_cycle(r.cycle, p("cycle.json"));
            save_surface(r.surface, p("surface.txt"));
            if (r.second_cycle) save_cycle(*r.second_cycle, p("cycle2.json"));
            if (r.second_surface) save_surface(*r.second_surface, p("surface2.txt"));
            save_volume(r.labels, p("labels.raw"), p("labels.json"));
            save_volume(r.raster, p("raster.raw"), p("raster.json"));
        }
    }
    return r;
}

std::vector<std::string> export_figure_assets(const PipelineConfig& cfg) {
    PipelineResult r = run_pipeline(cfg, /*write_outputs=*/false);
    namespace fs = std::filesystem;
    fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output dir: " + cfg.output_dir);

    std::vector<std::string> written;
    auto add = [&](const char* name) {
        written.push_back((dir / name).string());
        return written.back();
    };
    export_wireframe_obj(r.complex, add("diagram_wireframe.obj"));
    export_cycle_obj(r.complex, r.cycle, add("cycle.obj"));
    export_surface_obj(r.complex, r.surface, add("surface.obj"));
    if (r.second_cycle) export_cycle_obj(r.complex, *r.second_cycle, add("cycle2.obj"));
    if (r.second_surface) export_surface_obj(r.complex, *r.second_surface, add("surface2.obj"));

    json report;
    report["surface_facets"] = r.surface.facets.size();
    if (r.second_surface) {
        std::vector<int> shared;
        std::set_intersection(r.surface.facets.begin(), r.surface.facets.end(),
                              r.second_surface->facets.begin(), r.second_surface->facets.end(),
                              std::back_inserter(shared));
        report["second_surface_facets"] = r.second_surface->facets.size();
        report["shared_facets"] = shared.size();
    }
    std::ofstream rep(add("export_report.json"), std::ios::binary);
    rep << report.dump(2) << '\n';
    if (!rep) throw IoError("write failed: export_report.json");
    return written;
}

}  // namespace cracksynth

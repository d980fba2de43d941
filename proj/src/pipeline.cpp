#include "maskfit/pipeline.hpp"
#include "maskfit/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace maskfit {

namespace fs = std::filesystem;
using nlohmann::json;

PipelineInputs load_pipeline_inputs(const PipelineConfig& cfg) {
    PipelineInputs in;
    in.assets = load_asset_bundle(cfg.assets_dir);
    in.scan = read_range_scan(cfg.scan_path, cfg.scan_intrinsics_path);

    const std::vector<RawLandmark> raw = read_landmarks(cfg.landmarks_path);
    LandmarkSet scan_set;
    if (in.scan.has_grid()) {
        DepthFilterResult filtered = filter_invalid_depth(raw, in.scan);
        scan_set = std::move(filtered.kept);
        in.dropped_landmarks = std::move(filtered.dropped);
    } else {
        for (const RawLandmark& lm : raw) {
            if (!lm.position)
                throw ParseError(cfg.landmarks_path.string() + ": landmark '" + lm.name +
                                 "' needs (x,y,z) when the scan has no pixel grid");
            scan_set.entries.push_back({lm.name, *lm.position, -1});
        }
    }
    in.pairs = pair_landmarks(in.assets.template_landmarks, scan_set);
    return in;
}

void stage_align(const PipelineInputs& in, PipelineArtifacts& art) {
    auto [T, report] = align_similarity(in.pairs);
    art.transform = T;
    art.align_report = report;
}

void stage_register(const PipelineConfig& cfg, const PipelineInputs& in,
                    PipelineArtifacts& art) {
    TriangleMesh tpl = in.assets.template_mesh;
    transform_mesh(tpl, art.transform.scale, art.transform.rotation,
                   art.transform.translation);
    compute_vertex_normals(tpl);

    // landmarks follow their bound vertices through the pre-alignment
    std::vector<LandmarkPair> pairs = in.pairs;
    for (LandmarkPair& p : pairs)
        p.template_pos = tpl.vertices[p.template_vertex];

    art.registration = register_nonrigid(tpl, in.scan, pairs, cfg.weights,
                                         cfg.schedule, cfg.prune);
    if (cfg.verbosity >= 2)
        for (const IterationRecord& rec : art.registration.log)
            std::fprintf(stderr,
                         "iter=%d matched=%zu kept=%zu energy=%.6g step=%.6g "
                         "w_memb=%.6g w_ref=%.6g\n",
                         rec.iteration, rec.pairs_matched, rec.pairs_kept, rec.energy,
                         rec.step_norm, rec.weights.memb, rec.weights.ref);
}

void stage_transfer(const PipelineConfig& cfg, const PipelineInputs& in,
                    PipelineArtifacts& art) {
    art.warped = transfer_region(in.assets.region, art.registration);
    art.region_check = validate_region_on_scan(art.warped, in.scan, cfg.region_tolerance_mm);
}

void stage_design(const PipelineConfig& cfg, const PipelineInputs& in,
                  PipelineArtifacts& art) {
    art.fitted = fit_interface(in.assets.generic_interface, in.assets.control_map, art.warped);
    art.fitted_map = in.assets.control_map;
    art.fitted_mesh = tessellate(art.fitted, cfg.tess_res_u, cfg.tess_res_v);
}

namespace {

Vec3 default_approach(const TriangleMesh& face) {
    Vec3 mean = Vec3::Zero();
    for (const Vec3& n : face.normals)
        mean += n;
    const double len = mean.norm();
    if (len < 1e-12)
        throw InvalidArgument("face normals average to zero; pass an approach direction");
    // press against the side the surface faces
    return (-mean / len).eval();
}

} // namespace

void stage_evaluate(const PipelineConfig& cfg, const PipelineInputs& in,
                    PipelineArtifacts& art) {
    const TriangleMesh& face = art.registration.deformed;

    ContactParams params = cfg.contact;
    if (!cfg.contact_direction_set)
        params.approach_direction = default_approach(face);

    TriangleMesh generic_mesh = tessellate(in.assets.generic_interface,
                                           cfg.tess_res_u, cfg.tess_res_v);
    transform_mesh(generic_mesh, art.transform.scale, art.transform.rotation,
                   art.transform.translation);

    art.pressure_fitted = simulate_press(face, art.fitted_mesh, art.warped.points, params);
    art.pressure_generic = simulate_press(face, generic_mesh, art.warped.points, params);
    art.comparison = compare_reports(art.pressure_fitted, art.pressure_generic);
}

PipelineArtifacts run_pipeline(const PipelineConfig& cfg, const PipelineInputs& in) {
    PipelineArtifacts art;
    stage_align(in, art);
    stage_register(cfg, in, art);
    stage_transfer(cfg, in, art);
    stage_design(cfg, in, art);
    stage_evaluate(cfg, in, art);
    return art;
}

namespace {

void ensure_output_dir(const PipelineConfig& cfg) {
    if (cfg.output_dir.empty())
        throw InvalidArgument("output directory not set");
    fs::create_directories(cfg.output_dir);
}

void dump_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out)
        throw ParseError(path.string() + ": cannot open for writing");
    out << j.dump(2) << '\n';
}

} // namespace

void write_align_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art) {
    ensure_output_dir(cfg);
    write_similarity(cfg.output_dir / "similarity.json", art.transform, &art.align_report);
}

void write_register_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art) {
    ensure_output_dir(cfg);
    write_obj(cfg.output_dir / "deformed_template.obj", art.registration.deformed);

    std::ofstream log(cfg.output_dir / "registration_log.txt");
    char buf[256];
    for (const IterationRecord& rec : art.registration.log) {
        std::snprintf(buf, sizeof buf,
                      "iter=%d matched=%zu kept=%zu energy=%.9g step=%.9g "
                      "w_p2point=%.9g w_p2plane=%.9g w_memb=%.9g w_ref=%.9g\n",
                      rec.iteration, rec.pairs_matched, rec.pairs_kept, rec.energy,
                      rec.step_norm, rec.weights.p2point, rec.weights.p2plane,
                      rec.weights.memb, rec.weights.ref);
        log << buf;
    }
}

void write_transfer_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art) {
    ensure_output_dir(cfg);
    write_warped_region(cfg.output_dir / "warped_region.json", art.warped);
    json check{{"pass", art.region_check.pass},
               {"tolerance_mm", cfg.region_tolerance_mm},
               {"failed_ordinals", art.region_check.failed},
               {"distances_mm", art.region_check.distances}};
    dump_json_file(cfg.output_dir / "region_validation.json", check);
}

void write_design_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art) {
    ensure_output_dir(cfg);
    NurbsAsset asset;
    asset.surface = art.fitted;
    asset.map = art.fitted_map;
    write_nurbs(cfg.output_dir / "fitted_interface.json", asset);
    write_obj(cfg.output_dir / "fitted_interface.obj", art.fitted_mesh);
}

void write_evaluate_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art) {
    ensure_output_dir(cfg);
    write_pressure_report(cfg.output_dir / "pressure_fitted.txt", art.pressure_fitted);
    write_pressure_report(cfg.output_dir / "pressure_generic.txt", art.pressure_generic);
    json cmp{{"cv_personalized", art.comparison.cv_personalized},
             {"cv_generic", art.comparison.cv_generic},
             {"ratio", art.comparison.ratio},
             {"success", art.comparison.success},
             {"no_contact_fitted", art.pressure_fitted.no_contact},
             {"no_contact_generic", art.pressure_generic.no_contact}};
    dump_json_file(cfg.output_dir / "comparison.json", cmp);
}

} // namespace maskfit

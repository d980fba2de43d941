#include "maskfit/errors.hpp"
#include "maskfit/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>

namespace fs = std::filesystem;
using namespace maskfit;

namespace {

void require_file(const fs::path& path, const char* what) {
    if (path.empty())
        throw ParseError(std::string(what) + " path not given");
    if (!fs::exists(path))
        throw ParseError(std::string(what) + " file not found: " + path.string());
}

void require_assets(const PipelineConfig& cfg) {
    if (cfg.assets_dir.empty() || !fs::is_directory(cfg.assets_dir))
        throw ParseError("asset directory not found: " + cfg.assets_dir.string());
}

// staged invocations pick earlier results back up from the output directory
SimilarityTransform load_transform(const PipelineConfig& cfg) {
    const fs::path p = cfg.output_dir / "similarity.json";
    require_file(p, "similarity transform (run 'align' first)");
    return read_similarity(p);
}

RegistrationResult load_registration(const PipelineConfig& cfg) {
    const fs::path p = cfg.output_dir / "deformed_template.obj";
    require_file(p, "deformed template (run 'register' first)");
    RegistrationResult result;
    result.deformed = read_mesh(p);
    compute_vertex_normals(result.deformed);
    return result;
}

WarpedRegion load_warped(const PipelineConfig& cfg) {
    const fs::path p = cfg.output_dir / "warped_region.json";
    require_file(p, "warped region (run 'transfer' first)");
    return read_warped_region(p);
}

NurbsSurface load_fitted(const PipelineConfig& cfg) {
    const fs::path p = cfg.output_dir / "fitted_interface.json";
    require_file(p, "fitted interface (run 'design' first)");
    return read_nurbs(p).surface;
}

struct StageNeeds {
    bool scan = false;
    bool landmarks = false;
};

PipelineInputs load_inputs_checked(const PipelineConfig& cfg, const StageNeeds& needs) {
    require_assets(cfg);
    if (needs.scan)
        require_file(cfg.scan_path, "scan");
    if (needs.landmarks)
        require_file(cfg.landmarks_path, "landmarks");
    return load_pipeline_inputs(cfg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personalized mask interface fitting from a facial range scan"};
    app.require_subcommand(1);

    PipelineConfig cfg;
    std::vector<double> approach;

    app.add_option("--assets", cfg.assets_dir,
                   "Asset directory (template_face.obj, template_landmarks.json, "
                   "contact_region.json, generic_interface.json)");
    app.add_option("--scan", cfg.scan_path, "Range scan (.pgm depth image or .ply cloud)");
    app.add_option("--intrinsics", cfg.scan_intrinsics_path,
                   "Intrinsics sidecar override for PGM scans");
    app.add_option("--landmarks", cfg.landmarks_path, "Scan landmark JSON");
    app.add_option("--out", cfg.output_dir, "Output directory")->required();
    app.add_option("--w-p2point", cfg.weights.p2point, "Point-to-point weight");
    app.add_option("--w-p2plane", cfg.weights.p2plane, "Point-to-plane weight");
    app.add_option("--w-memb", cfg.weights.memb, "Smoothness weight");
    app.add_option("--w-ref", cfg.weights.ref, "Landmark weight");
    app.add_option("--step-threshold", cfg.schedule.step_norm_threshold,
                   "RMS step norm (mm) that triggers weight decay");
    app.add_option("--max-iters", cfg.schedule.max_outer_iterations,
                   "Outer iteration cap");
    app.add_option("--max-dist-mm", cfg.prune.max_distance_mm,
                   "Correspondence distance gate (mm)");
    app.add_option("--max-normal-deg", cfg.prune.max_normal_angle_deg,
                   "Correspondence normal angle gate (degrees)");
    app.add_option("--tess-u", cfg.tess_res_u, "Interface tessellation samples along u");
    app.add_option("--tess-v", cfg.tess_res_v, "Interface tessellation samples along v");
    app.add_option("--max-penetration", cfg.contact.max_penetration,
                   "Press depth past first contact (mm)");
    app.add_option("--stiffness", cfg.contact.stiffness, "Penalty stiffness (force/mm)");
    app.add_option("--rim-band", cfg.contact.rim_band_mm,
                   "Rim statistics band half-width (mm)");
    app.add_option("--approach", approach,
                   "Press direction as three components (default: against the face)")
        ->expected(3);
    app.add_option("--region-tol", cfg.region_tolerance_mm,
                   "Warped region to scan distance tolerance (mm)");
    app.add_flag("-v,--verbose", cfg.verbosity, "Increase verbosity");

    CLI::App* cmd_align = app.add_subcommand("align", "Similarity-align the template landmarks");
    CLI::App* cmd_register = app.add_subcommand("register", "Non-rigid registration to the scan");
    CLI::App* cmd_transfer = app.add_subcommand("transfer", "Carry the contact region onto the subject");
    CLI::App* cmd_design = app.add_subcommand("design", "Fit the interface to the warped region");
    CLI::App* cmd_evaluate = app.add_subcommand("evaluate", "Press fitted and generic interfaces onto the face");
    CLI::App* cmd_pipeline = app.add_subcommand("pipeline", "Run all stages");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!approach.empty()) {
            cfg.contact.approach_direction = Vec3(approach[0], approach[1], approach[2]);
            const double len = cfg.contact.approach_direction.norm();
            if (len < 1e-12)
                throw InvalidArgument("approach direction must be nonzero");
            cfg.contact.approach_direction /= len;
            cfg.contact_direction_set = true;
        }

        PipelineArtifacts art;
        if (cmd_align->parsed()) {
            PipelineInputs in = load_inputs_checked(cfg, {true, true});
            stage_align(in, art);
            write_align_outputs(cfg, art);
            std::printf("align: rms %.6g mm after %d iterations\n",
                        art.align_report.final_rms, art.align_report.iterations);
        } else if (cmd_register->parsed()) {
            PipelineInputs in = load_inputs_checked(cfg, {true, true});
            art.transform = load_transform(cfg);
            stage_register(cfg, in, art);
            write_register_outputs(cfg, art);
            std::printf("register: %zu iterations, final step %.6g mm\n",
                        art.registration.log.size(),
                        art.registration.log.back().step_norm);
        } else if (cmd_transfer->parsed()) {
            PipelineInputs in = load_inputs_checked(cfg, {true, true});
            art.registration = load_registration(cfg);
            stage_transfer(cfg, in, art);
            write_transfer_outputs(cfg, art);
            std::printf("transfer: %zu region points, validation %s\n",
                        art.warped.points.size(),
                        art.region_check.pass ? "pass" : "FAIL");
        } else if (cmd_design->parsed()) {
            require_assets(cfg);
            PipelineInputs in;
            in.assets = load_asset_bundle(cfg.assets_dir);
            art.warped = load_warped(cfg);
            stage_design(cfg, in, art);
            write_design_outputs(cfg, art);
            std::printf("design: interface tessellated to %zu vertices\n",
                        art.fitted_mesh.vertices.size());
        } else if (cmd_evaluate->parsed()) {
            PipelineInputs in = load_inputs_checked(cfg, {true, true});
            art.transform = load_transform(cfg);
            art.registration = load_registration(cfg);
            art.warped = load_warped(cfg);
            art.fitted = load_fitted(cfg);
            art.fitted_mesh = tessellate(art.fitted, cfg.tess_res_u, cfg.tess_res_v);
            stage_evaluate(cfg, in, art);
            write_evaluate_outputs(cfg, art);
            std::printf("evaluate: cv fitted %.6g, cv generic %.6g, ratio %.6g%s\n",
                        art.comparison.cv_personalized, art.comparison.cv_generic,
                        art.comparison.ratio,
                        art.pressure_fitted.no_contact || art.pressure_generic.no_contact
                            ? " (no contact)" : "");
        } else if (cmd_pipeline->parsed()) {
            PipelineInputs in = load_inputs_checked(cfg, {true, true});
            art = run_pipeline(cfg, in);
            write_align_outputs(cfg, art);
            write_register_outputs(cfg, art);
            write_transfer_outputs(cfg, art);
            write_design_outputs(cfg, art);
            write_evaluate_outputs(cfg, art);
            std::printf("pipeline: cv ratio %.6g (%s)\n", art.comparison.ratio,
                        art.comparison.success ? "personalized spreads more evenly"
                                               : "no improvement");
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

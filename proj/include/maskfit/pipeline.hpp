#pragma once

#include "maskfit/contact.hpp"
#include "maskfit/io.hpp"
#include "maskfit/nonrigid.hpp"
#include "maskfit/similarity.hpp"

#include <filesystem>

namespace maskfit {

/// Everything one pipeline run needs. Stage commands fill only the paths
/// they use; numeric fields default to the standard settings.
struct PipelineConfig {
    std::filesystem::path assets_dir;
    std::filesystem::path scan_path;
    std::filesystem::path scan_intrinsics_path; // optional override
    std::filesystem::path landmarks_path;
    std::filesystem::path output_dir;

    EnergyWeights weights;
    ScheduleConfig schedule;
    PruneConfig prune;
    ContactParams contact;
    bool contact_direction_set = false; // else derived from the face normals
    int tess_res_u = 96, tess_res_v = 24;
    double region_tolerance_mm = 2.0;
    int verbosity = 1;
};

/// In-memory results of the full run; stages fill in what they produce.
struct PipelineArtifacts {
    SimilarityTransform transform;
    AlignmentReport align_report;
    RegistrationResult registration;
    WarpedRegion warped;
    RegionValidation region_check;
    NurbsSurface fitted;
    ControlMap fitted_map;
    TriangleMesh fitted_mesh;
    PressureReport pressure_fitted;
    PressureReport pressure_generic;
    PressureComparison comparison;
};

/// Shared inputs loaded once per run.
struct PipelineInputs {
    AssetBundle assets;
    RangeScan scan;
    std::vector<LandmarkPair> pairs; // template <-> scan, depth-filtered
    std::vector<std::string> dropped_landmarks;
};
PipelineInputs load_pipeline_inputs(const PipelineConfig& cfg);

// Individual stages; each consumes the previous stage's in-memory output.
void stage_align(const PipelineInputs& in, PipelineArtifacts& art);
void stage_register(const PipelineConfig& cfg, const PipelineInputs& in,
                    PipelineArtifacts& art);
void stage_transfer(const PipelineConfig& cfg, const PipelineInputs& in,
                    PipelineArtifacts& art);
void stage_design(const PipelineConfig& cfg, const PipelineInputs& in,
                  PipelineArtifacts& art);
void stage_evaluate(const PipelineConfig& cfg, const PipelineInputs& in,
                    PipelineArtifacts& art);

/// align -> register -> transfer -> design -> evaluate.
PipelineArtifacts run_pipeline(const PipelineConfig& cfg, const PipelineInputs& in);

// Output writers used by the CLI; file names are fixed within output_dir.
void write_align_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art);
void write_register_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art);
void write_transfer_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art);
void write_design_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art);
void write_evaluate_outputs(const PipelineConfig& cfg, const PipelineArtifacts& art);

} // namespace maskfit

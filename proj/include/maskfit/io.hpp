#pragma once

#include "maskfit/contact.hpp"
#include "maskfit/core.hpp"
#include "maskfit/landmarks.hpp"
#include "maskfit/mesh.hpp"
#include "maskfit/nurbs.hpp"
#include "maskfit/region.hpp"
#include "maskfit/scan.hpp"
#include "maskfit/similarity.hpp"

#include <filesystem>
#include <string>

namespace maskfit {

// Meshes: ASCII OBJ (v/f records, 1-based indices, quads fan-triangulated)
// and binary little-endian PLY (xyz + optional normals). Dispatch is by
// extension.
TriangleMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh);

TriangleMesh read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
TriangleMesh read_ply(const std::filesystem::path& path);
void write_ply(const std::filesystem::path& path, const TriangleMesh& mesh);

// Range scans: a 16-bit PGM depth image (sample value = depth in 0.1 mm
// units, 0 = no measurement, samples little-endian) plus a sidecar
// intrinsics JSON, or a bare PLY point cloud (no grid). The sidecar path is
// the scan path with its extension replaced by ".intrinsics.json" unless
// given explicitly.
RangeScan read_range_scan(const std::filesystem::path& path,
                          const std::filesystem::path& intrinsics_path = {});
void write_depth_pgm(const std::filesystem::path& path, int width, int height,
                     std::span<const uint16_t> depth_units,
                     const PinholeIntrinsics& intrinsics);

std::vector<RawLandmark> read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, std::span<const RawLandmark> landmarks);

ContactRegion read_region(const std::filesystem::path& path);
void write_region(const std::filesystem::path& path, const ContactRegion& region);

struct NurbsAsset {
    NurbsSurface surface;
    ControlMap map;
};
NurbsAsset read_nurbs(const std::filesystem::path& path);
void write_nurbs(const std::filesystem::path& path, const NurbsAsset& asset);

SimilarityTransform read_similarity(const std::filesystem::path& path);
void write_similarity(const std::filesystem::path& path, const SimilarityTransform& T,
                      const AlignmentReport* report = nullptr);

WarpedRegion read_warped_region(const std::filesystem::path& path);
void write_warped_region(const std::filesystem::path& path, const WarpedRegion& warped);

// One vertex per line (index, pressure) followed by a summary block.
void write_pressure_report(const std::filesystem::path& path, const PressureReport& report);

/// The once-per-deployment prior: template mesh with its landmarks, contact
/// region, and the generic interface. Loaded from a directory with fixed
/// file names (template_face.obj, template_landmarks.json,
/// contact_region.json, generic_interface.json).
struct AssetBundle {
    TriangleMesh template_mesh;
    LandmarkSet template_landmarks;
    ContactRegion region;
    NurbsSurface generic_interface;
    ControlMap control_map;
};
AssetBundle load_asset_bundle(const std::filesystem::path& dir);

} // namespace maskfit

#pragma once

#include "maskfit/core.hpp"
#include "maskfit/io.hpp"
#include "maskfit/landmarks.hpp"
#include "maskfit/mesh.hpp"
#include "maskfit/nurbs.hpp"
#include "maskfit/region.hpp"
#include "maskfit/scan.hpp"
#include "maskfit/similarity.hpp"

#include <filesystem>

namespace maskfit {

/// Procedural face-like height field used for fixtures and tests: a smooth
/// dome with nose, brow, mouth and chin features over a rectangular grid.
struct SyntheticFaceSpec {
    int grid_x = 120, grid_y = 120;
    double half_width = 70.0;  // mm, x in [-hw, hw]
    double half_height = 90.0; // mm, y in [-hh, hh]
};

double face_height(double x, double y);
TriangleMesh synthetic_face(const SyntheticFaceSpec& spec);

/// Smooth patient-specific deformation: Gaussian bumps added to the height
/// direction (z). Amplitudes are small (<= 3 mm) so the warp stays gentle.
struct SurfaceBump {
    double x, y;      // center, mm
    double sigma;     // mm
    double amplitude; // mm, signed
};
std::vector<SurfaceBump> default_patient_bumps();
double bump_offset(std::span<const SurfaceBump> bumps, double x, double y);
TriangleMesh apply_bumps(const TriangleMesh& mesh, std::span<const SurfaceBump> bumps);

/// Roughly sixty named landmarks on the synthetic face, each bound to its
/// nearest grid vertex.
LandmarkSet synthetic_landmarks(const TriangleMesh& face, const SyntheticFaceSpec& spec);

/// Elliptic contact band around the nose: `rings` concentric loops of
/// `stations` samples, ordered ring-major (ordinal = ring*stations + station).
/// All band vertices are distinct grid vertices.
struct BandSpec {
    double center_x = 0.0, center_y = -10.0;
    double radius_x = 26.0, radius_y = 38.0; // middle ring, mm
    double half_width = 8.75;                // band half-width, mm
    int rings = 8, stations = 31;
};
ContactRegion synthetic_region(const TriangleMesh& face, const SyntheticFaceSpec& spec,
                               const BandSpec& band = {});

/// Cubic x cubic NURBS band over the contact region with a 32 x `rings`
/// control grid. The last control column repeats the first region station so
/// the rim closes; every control point is mapped onto a region ordinal.
NurbsAsset synthetic_interface(const TriangleMesh& face, const ContactRegion& region,
                               const BandSpec& band = {});

/// Perspective depth render of a mesh (camera at origin looking along +z),
/// quantized to 0.1 mm units. Pixels the mesh does not cover stay 0.
struct DepthImage {
    int width = 640, height = 480;
    PinholeIntrinsics intrinsics{580.0, 580.0, 319.5, 239.5};
    std::vector<uint16_t> units; // row-major
};
DepthImage render_depth(const TriangleMesh& mesh, int width = 640, int height = 480,
                        const PinholeIntrinsics& K = {580.0, 580.0, 319.5, 239.5});

/// Projects a 3D point to floating-point pixel coordinates.
Eigen::Vector2d project_pixel(const PinholeIntrinsics& K, const Vec3& p);

/// Deterministic subject transform used by the bundled fixtures.
SimilarityTransform fixture_subject_transform();

/// Writes the complete fixture set into `dir`: template assets
/// (template_face.obj, template_landmarks.json, contact_region.json,
/// generic_interface.json) plus a rendered subject scan (scan.pgm,
/// scan.intrinsics.json, scan_landmarks.json).
struct FixtureOptions {
    SyntheticFaceSpec face;
    BandSpec band;
    int image_width = 640, image_height = 480;
};
void write_fixture_set(const std::filesystem::path& dir, const FixtureOptions& opts = {});

} // namespace maskfit

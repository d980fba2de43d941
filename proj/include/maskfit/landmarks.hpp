#pragma once

#include "maskfit/core.hpp"
#include "maskfit/scan.hpp"

#include <optional>
#include <string>

namespace maskfit {

/// A named feature point as it comes out of the detector file: either pixel
/// coordinates on the scan image or a 3D position, optionally bound to a
/// template vertex.
struct RawLandmark {
    std::string name;
    std::optional<Eigen::Vector2d> pixel; // (u, v)
    std::optional<Vec3> position;         // mm
    std::optional<int> template_vertex;
};

struct Landmark {
    std::string name;
    Vec3 position;
    int template_vertex = -1; // only meaningful on template-side sets
};

/// Ordered landmark list with unique names. Template-side sets carry a valid
/// template_vertex for every entry.
struct LandmarkSet {
    std::vector<Landmark> entries;

    size_t size() const { return entries.size(); }
    const Landmark& operator[](size_t i) const { return entries[i]; }
};

/// Throws InvalidArgument on duplicate names; if `template_vertex_count` is
/// non-negative also requires every entry to carry an index below it.
void validate_landmark_set(const LandmarkSet& set, int template_vertex_count = -1);

struct DepthFilterResult {
    LandmarkSet kept;
    std::vector<std::string> dropped; // names of landmarks on invalid pixels
};

/// Turns pixel landmarks into 3D scan landmarks through the scan lattice.
/// Landmarks whose (rounded) pixel has no measured depth are dropped and
/// reported. Throws TooFewLandmarks when fewer than 3 survive.
DepthFilterResult filter_invalid_depth(std::span<const RawLandmark> raw,
                                       const RangeScan& scan);

struct LandmarkPair {
    std::string name;
    int template_vertex = -1;
    Vec3 template_pos;
    Vec3 scan_pos;
};

/// Inner join on name, preserving template order. Throws TooFewLandmarks
/// when the intersection has fewer than 3 entries.
std::vector<LandmarkPair> pair_landmarks(const LandmarkSet& template_set,
                                         const LandmarkSet& scan_set);

} // namespace maskfit

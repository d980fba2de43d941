#pragma once

#include "maskfit/core.hpp"
#include "maskfit/mesh.hpp"

namespace maskfit {

/// Quasi-static penalty press: the interface translates along
/// approach_direction until first contact plus max_penetration, and every
/// face vertex reports stiffness times its penetration depth.
struct ContactParams {
    Vec3 approach_direction = Vec3(0, 0, 1); // unit, motion of the interface
    double max_penetration = 2.0;            // mm past first contact
    double stiffness = 1.0;                  // force per mm
    double friction_coeff = 50.0;            // recorded only; the normal-force
                                             // proxy has no tangential model
    double rim_band_mm = 3.0;                // half-width of the rim statistics band
};
void validate_contact_params(const ContactParams& params);

struct RimStats {
    double mean = 0, stddev = 0, cv = 0, min = 0, max = 0;
    size_t count = 0;
    bool cv_defined = false; // mean > 0
};

struct PressureReport {
    std::vector<double> pressure; // per face vertex, >= 0
    std::vector<int> rim_vertices;
    RimStats rim;
    bool no_contact = false;
};

/// Signed gap from each face vertex to the interface surface along the
/// approach axis: the smallest t with vertex - t*approach on the interface,
/// or NaN when the vertex is not covered. Parallel kernel with a serial twin.
std::vector<double> interface_gaps(const TriangleMesh& face, const TriangleMesh& interface,
                                   const Vec3& approach_direction);
namespace serial {
std::vector<double> interface_gaps(const TriangleMesh& face, const TriangleMesh& interface,
                                   const Vec3& approach_direction);
} // namespace serial

/// Presses the interface onto the face and reports per-vertex proxy
/// pressures plus statistics over the face vertices within rim_band_mm of
/// the warped contact region. If no vertex is ever covered the report is
/// all zeros with the no_contact flag set.
PressureReport simulate_press(const TriangleMesh& face, const TriangleMesh& interface,
                              std::span<const Vec3> rim_points, const ContactParams& params);

struct PressureComparison {
    double cv_personalized = 0, cv_generic = 0, ratio = 0;
    bool success = false; // ratio < 1
};

/// Both reports must come from the same face mesh. Throws UndefinedCV when
/// either mean rim pressure is zero.
PressureComparison compare_reports(const PressureReport& personalized,
                                   const PressureReport& generic);

} // namespace maskfit

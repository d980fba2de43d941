#include "maskfit/contact.hpp"
#include "maskfit/errors.hpp"
#include "maskfit/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maskfit {

void validate_contact_params(const ContactParams& params) {
    if (std::abs(params.approach_direction.norm() - 1.0) > 1e-9)
        throw InvalidArgument("approach direction must be unit length");
    if (!(params.max_penetration > 0))
        throw InvalidArgument("max penetration must be positive");
    if (!(params.stiffness > 0))
        throw InvalidArgument("stiffness must be positive");
    if (!(params.rim_band_mm > 0))
        throw InvalidArgument("rim band width must be positive");
}

namespace {

constexpr double kNoHit = std::numeric_limits<double>::quiet_NaN();

// 2-D binning of interface triangles in the plane orthogonal to the
// approach axis; rays along the axis only visit one cell.
struct AxisGrid {
    Vec3 ex, ey;        // orthonormal basis of the projection plane
    double x0, y0, cell;
    int nx, ny;
    std::vector<std::vector<int>> bins;

    AxisGrid(const TriangleMesh& interface, const Vec3& axis) {
        ex = axis.unitOrthogonal();
        ey = axis.cross(ex).normalized();
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const Vec3& p : interface.vertices) {
            const double x = ex.dot(p), y = ey.dot(p);
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
        const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
        const int target = std::max(1, static_cast<int>(std::sqrt(
            static_cast<double>(interface.faces.size()))));
        cell = span / target;
        x0 = xmin; y0 = ymin;
        nx = static_cast<int>((xmax - xmin) / cell) + 1;
        ny = static_cast<int>((ymax - ymin) / cell) + 1;
        bins.resize(static_cast<size_t>(nx) * ny);
        for (int f = 0; f < static_cast<int>(interface.faces.size()); ++f) {
            double fx0 = 1e300, fx1 = -1e300, fy0 = 1e300, fy1 = -1e300;
            for (int k = 0; k < 3; ++k) {
                const Vec3& p = interface.vertices[interface.faces[f][k]];
                const double x = ex.dot(p), y = ey.dot(p);
                fx0 = std::min(fx0, x); fx1 = std::max(fx1, x);
                fy0 = std::min(fy0, y); fy1 = std::max(fy1, y);
            }
            for (int gy = cell_y(fy0); gy <= cell_y(fy1); ++gy)
                for (int gx = cell_x(fx0); gx <= cell_x(fx1); ++gx)
                    bins[static_cast<size_t>(gy) * nx + gx].push_back(f);
        }
    }

    int cell_x(double x) const {
        return std::clamp(static_cast<int>((x - x0) / cell), 0, nx - 1);
    }
    int cell_y(double y) const {
        return std::clamp(static_cast<int>((y - y0) / cell), 0, ny - 1);
    }
    const std::vector<int>& candidates(const Vec3& p) const {
        return bins[static_cast<size_t>(cell_y(ey.dot(p))) * nx + cell_x(ex.dot(p))];
    }
};

// Moller-Trumbore along the fixed direction dir; returns the signed line
// parameter or NaN.
inline double ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                           const Vec3& b, const Vec3& c) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 pvec = dir.cross(e2);
    const double det = e1.dot(pvec);
    if (std::abs(det) < 1e-12)
        return kNoHit;
    const double inv = 1.0 / det;
    const Vec3 tvec = origin - a;
    const double u = tvec.dot(pvec) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12)
        return kNoHit;
    const Vec3 qvec = tvec.cross(e1);
    const double v = dir.dot(qvec) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12)
        return kNoHit;
    return e2.dot(qvec) * inv;
}

// Gap of one vertex: smallest line parameter t such that
// vertex - t*approach lies on the interface (the sheet nearest to where the
// mask comes from).
inline double gap_one(const TriangleMesh& interface, const AxisGrid& grid,
                      const Vec3& approach, const Vec3& vertex) {
    double best = kNoHit;
    for (int f : grid.candidates(vertex)) {
        const Face& face = interface.faces[f];
        const double t = ray_triangle(vertex, -approach, interface.vertices[face[0]],
                                      interface.vertices[face[1]], interface.vertices[face[2]]);
        if (std::isnan(t))
            continue;
        if (std::isnan(best) || t < best)
            best = t;
    }
    return best;
}

void check_press_inputs(const TriangleMesh& face, const TriangleMesh& interface) {
    if (face.vertices.empty() || interface.vertices.empty() || interface.faces.empty())
        throw InvalidArgument("press requires nonempty face and interface meshes");
}

} // namespace

std::vector<double> interface_gaps(const TriangleMesh& face, const TriangleMesh& interface,
                                   const Vec3& approach) {
    check_press_inputs(face, interface);
    const AxisGrid grid(interface, approach);
    std::vector<double> gaps(face.vertices.size());
#pragma omp parallel for schedule(static)
    for (int v = 0; v < static_cast<int>(face.vertices.size()); ++v)
        gaps[v] = gap_one(interface, grid, approach, face.vertices[v]);
    return gaps;
}

namespace serial {
std::vector<double> interface_gaps(const TriangleMesh& face, const TriangleMesh& interface,
                                   const Vec3& approach) {
    check_press_inputs(face, interface);
    const AxisGrid grid(interface, approach);
    std::vector<double> gaps(face.vertices.size());
    for (int v = 0; v < static_cast<int>(face.vertices.size()); ++v)
        gaps[v] = gap_one(interface, grid, approach, face.vertices[v]);
    return gaps;
}
} // namespace serial

PressureReport simulate_press(const TriangleMesh& face, const TriangleMesh& interface,
                              std::span<const Vec3> rim_points, const ContactParams& params) {
    validate_contact_params(params);
    const std::vector<double> gaps = interface_gaps(face, interface, params.approach_direction);

    PressureReport report;
    report.pressure.assign(face.vertices.size(), 0.0);

    double first_contact = std::numeric_limits<double>::infinity();
    for (double g : gaps)
        if (!std::isnan(g))
            first_contact = std::min(first_contact, g);
    if (!std::isfinite(first_contact)) {
        report.no_contact = true;
    } else {
        // translating by first_contact + max_penetration, vertex penetration
        // depends only on the gap relative to the closest vertex
        for (size_t v = 0; v < gaps.size(); ++v) {
            if (std::isnan(gaps[v]))
                continue;
            const double pen = params.max_penetration - (gaps[v] - first_contact);
            if (pen > 0)
                report.pressure[v] = params.stiffness * pen;
        }
    }

    if (!rim_points.empty()) {
        KdTree rim_tree{rim_points};
        for (int v = 0; v < static_cast<int>(face.vertices.size()); ++v)
            if (rim_tree.nearest(face.vertices[v]).distance <= params.rim_band_mm)
                report.rim_vertices.push_back(v);
    }

    RimStats& s = report.rim;
    s.count = report.rim_vertices.size();
    if (s.count > 0) {
        s.min = std::numeric_limits<double>::infinity();
        s.max = -std::numeric_limits<double>::infinity();
        double sum = 0;
        for (int v : report.rim_vertices) {
            sum += report.pressure[v];
            s.min = std::min(s.min, report.pressure[v]);
            s.max = std::max(s.max, report.pressure[v]);
        }
        s.mean = sum / static_cast<double>(s.count);
        double var = 0;
        for (int v : report.rim_vertices)
            var += (report.pressure[v] - s.mean) * (report.pressure[v] - s.mean);
        s.stddev = std::sqrt(var / static_cast<double>(s.count));
        if (s.mean > 0) {
            s.cv = s.stddev / s.mean;
            s.cv_defined = true;
        }
    }
    return report;
}

PressureComparison compare_reports(const PressureReport& personalized,
                                   const PressureReport& generic) {
    if (personalized.pressure.size() != generic.pressure.size())
        throw InvalidArgument("reports were not computed on the same face mesh");
    if (!personalized.rim.cv_defined || !generic.rim.cv_defined)
        throw UndefinedCV("mean rim pressure is zero; coefficient of variation undefined");
    PressureComparison cmp;
    cmp.cv_personalized = personalized.rim.cv;
    cmp.cv_generic = generic.rim.cv;
    if (cmp.cv_generic == 0.0)
        cmp.ratio = cmp.cv_personalized == 0.0
                        ? 1.0
                        : std::numeric_limits<double>::infinity();
    else
        cmp.ratio = cmp.cv_personalized / cmp.cv_generic;
    cmp.success = cmp.ratio < 1.0;
    return cmp;
}

} // namespace maskfit

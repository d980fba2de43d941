#include "maskfit/synthetic.hpp"
#include "maskfit/errors.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace maskfit {

namespace {

inline double gauss2(double x, double y, double sx, double sy) {
    return std::exp(-0.5 * (x * x / (sx * sx) + y * y / (sy * sy)));
}

} // namespace

double face_height(double x, double y) {
    double z = 30.0 * gauss2(x, y, 55.0, 70.0);              // head dome
    z += 18.0 * gauss2(x, y + 8.0, 9.0, 14.0);               // nose ridge
    z += 3.5 * gauss2(x, y - 30.0, 38.0, 7.0);               // brow
    z += 2.5 * gauss2(x, y + 48.0, 16.0, 7.0);               // lips
    z += 4.0 * gauss2(x, y + 75.0, 14.0, 10.0);              // chin
    z -= 2.0 * gauss2(x - 22.0, y - 18.0, 8.0, 8.0);         // eye sockets
    z -= 2.0 * gauss2(x + 22.0, y - 18.0, 8.0, 8.0);
    return z;
}

TriangleMesh synthetic_face(const SyntheticFaceSpec& spec) {
    if (spec.grid_x < 2 || spec.grid_y < 2)
        throw InvalidArgument("face grid must be at least 2x2");
    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<size_t>(spec.grid_x) * spec.grid_y);
    for (int iy = 0; iy < spec.grid_y; ++iy) {
        const double y = -spec.half_height +
                         2.0 * spec.half_height * iy / (spec.grid_y - 1);
        for (int ix = 0; ix < spec.grid_x; ++ix) {
            const double x = -spec.half_width +
                             2.0 * spec.half_width * ix / (spec.grid_x - 1);
            mesh.vertices.emplace_back(x, y, face_height(x, y));
        }
    }
    // wound so normals point along +z (the face looks along +z in its frame)
    for (int iy = 0; iy + 1 < spec.grid_y; ++iy) {
        for (int ix = 0; ix + 1 < spec.grid_x; ++ix) {
            const int v00 = iy * spec.grid_x + ix;
            const int v10 = v00 + 1;
            const int v01 = v00 + spec.grid_x;
            const int v11 = v01 + 1;
            mesh.faces.push_back({v00, v10, v11});
            mesh.faces.push_back({v00, v11, v01});
        }
    }
    compute_vertex_normals(mesh);
    return mesh;
}

std::vector<SurfaceBump> default_patient_bumps() {
    // both bumps cross the contact band so an average-face interface
    // contacts the subject unevenly
    return {{24.0, -32.0, 12.0, 2.8},
            {-18.0, 14.0, 13.0, -2.2},
            {0.0, -52.0, 18.0, 1.5}};
}

double bump_offset(std::span<const SurfaceBump> bumps, double x, double y) {
    double dz = 0.0;
    for (const SurfaceBump& b : bumps)
        dz += b.amplitude * gauss2(x - b.x, y - b.y, b.sigma, b.sigma);
    return dz;
}

TriangleMesh apply_bumps(const TriangleMesh& mesh, std::span<const SurfaceBump> bumps) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices)
        v.z() += bump_offset(bumps, v.x(), v.y());
    compute_vertex_normals(out);
    return out;
}

namespace {

int nearest_grid_vertex(const SyntheticFaceSpec& spec, double x, double y) {
    const int ix = std::clamp<int>(
        std::lround((x + spec.half_width) / (2.0 * spec.half_width) * (spec.grid_x - 1)),
        0, spec.grid_x - 1);
    const int iy = std::clamp<int>(
        std::lround((y + spec.half_height) / (2.0 * spec.half_height) * (spec.grid_y - 1)),
        0, spec.grid_y - 1);
    return iy * spec.grid_x + ix;
}

} // namespace

LandmarkSet synthetic_landmarks(const TriangleMesh& face, const SyntheticFaceSpec& spec) {
    std::vector<std::pair<std::string, Eigen::Vector2d>> marks = {
        {"nose_tip", {0, -8}},      {"nose_bridge", {0, 10}},
        {"nose_base", {0, -24}},    {"nose_l", {-9, -14}},
        {"nose_r", {9, -14}},       {"nostril_l", {-6, -21}},
        {"nostril_r", {6, -21}},
        {"eye_l_outer", {-32, 18}}, {"eye_l_inner", {-12, 18}},
        {"eye_r_inner", {12, 18}},  {"eye_r_outer", {32, 18}},
        {"eye_l_top", {-22, 24}},   {"eye_l_bottom", {-22, 12}},
        {"eye_r_top", {22, 24}},    {"eye_r_bottom", {22, 12}},
        {"mouth_l", {-17, -48}},    {"mouth_r", {17, -48}},
        {"mouth_top", {0, -42}},    {"mouth_bottom", {0, -55}},
        {"lip_l", {-9, -45}},       {"lip_r", {9, -45}},
        {"chin", {0, -72}},         {"chin_l", {-13, -70}},
        {"chin_r", {13, -70}},      {"cheek_l", {-36, -18}},
        {"cheek_r", {36, -18}},     {"cheekbone_l", {-40, 2}},
        {"cheekbone_r", {40, 2}},   {"forehead", {0, 44}},
        {"forehead_l", {-22, 42}},  {"forehead_r", {22, 42}},
        {"philtrum", {0, -33}},
    };
    for (int k = 0; k < 8; ++k) { // brow arcs
        const double x = -42.0 + 12.0 * k;
        marks.push_back({"brow_" + std::to_string(k), {x, 31.0 + 3.0 * std::sin(kPi * k / 7.0)}});
    }
    for (int k = 0; k < 20; ++k) { // face contour ring
        const double a = 2.0 * kPi * k / 20.0;
        marks.push_back({"contour_" + std::to_string(k),
                         {52.0 * std::cos(a), -8.0 + 68.0 * std::sin(a)}});
    }

    LandmarkSet set;
    for (const auto& [name, xy] : marks) {
        const int v = nearest_grid_vertex(spec, xy.x(), xy.y());
        set.entries.push_back({name, face.vertices[v], v});
    }
    validate_landmark_set(set, static_cast<int>(face.vertices.size()));
    return set;
}

ContactRegion synthetic_region(const TriangleMesh& face, const SyntheticFaceSpec& spec,
                               const BandSpec& band) {
    ContactRegion region;
    std::set<int> seen;
    for (int j = 0; j < band.rings; ++j) {
        const double offset = band.rings == 1
                                  ? 0.0
                                  : -band.half_width + 2.0 * band.half_width * j / (band.rings - 1);
        for (int i = 0; i < band.stations; ++i) {
            const double a = 2.0 * kPi * i / band.stations;
            const double x = band.center_x + (band.radius_x + offset) * std::cos(a);
            const double y = band.center_y + (band.radius_y + offset) * std::sin(a);
            const int v = nearest_grid_vertex(spec, x, y);
            if (!seen.insert(v).second)
                throw InvalidArgument("face grid too coarse for the contact band: "
                                      "vertex " + std::to_string(v) + " hit twice");
            region.vertex_indices.push_back(v);
        }
    }
    region.closed = false; // a band, not a single edge-connected loop
    validate_region(region, face);
    return region;
}

namespace {

std::vector<double> clamped_uniform_knots(int n, int degree) {
    std::vector<double> knots;
    knots.reserve(n + degree + 1);
    for (int k = 0; k <= degree; ++k)
        knots.push_back(0.0);
    const int interior = n - degree - 1;
    for (int k = 1; k <= interior; ++k)
        knots.push_back(static_cast<double>(k) / (interior + 1));
    for (int k = 0; k <= degree; ++k)
        knots.push_back(1.0);
    return knots;
}

} // namespace

NurbsAsset synthetic_interface(const TriangleMesh& face, const ContactRegion& region,
                               const BandSpec& band) {
    if (static_cast<int>(region.vertex_indices.size()) != band.rings * band.stations)
        throw InvalidArgument("region size does not match the band layout");

    NurbsAsset asset;
    NurbsSurface& s = asset.surface;
    s.degree_u = 3;
    s.degree_v = 3;
    s.nu = band.stations + 1; // the extra column repeats station 0 to close the rim
    s.nv = band.rings;
    s.knots_u = clamped_uniform_knots(s.nu, s.degree_u);
    s.knots_v = clamped_uniform_knots(s.nv, s.degree_v);
    s.control.resize(static_cast<size_t>(s.nu) * s.nv);
    s.weights.assign(s.control.size(), 1.0);

    for (int i = 0; i < s.nu; ++i) {
        const int station = i % band.stations;
        for (int j = 0; j < s.nv; ++j) {
            const int ordinal = j * band.stations + station;
            s.control[s.ctrl_index(i, j)] = face.vertices[region.vertex_indices[ordinal]];
            asset.map.entries.push_back({i, j, ordinal});
        }
    }
    validate_surface(s);
    validate_control_map(asset.map, s, region.vertex_indices.size());
    return asset;
}

Eigen::Vector2d project_pixel(const PinholeIntrinsics& K, const Vec3& p) {
    return {K.fx * p.x() / p.z() + K.cx, K.fy * p.y() / p.z() + K.cy};
}

DepthImage render_depth(const TriangleMesh& mesh, int width, int height,
                        const PinholeIntrinsics& K) {
    DepthImage img;
    img.width = width;
    img.height = height;
    img.intrinsics = K;
    img.units.assign(static_cast<size_t>(width) * height, 0);
    std::vector<double> zbuf(img.units.size(), std::numeric_limits<double>::infinity());

    std::vector<Eigen::Vector2d> screen(mesh.vertices.size());
    std::vector<double> invz(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& p = mesh.vertices[i];
        if (p.z() <= 1e-6)
            throw InvalidArgument("render_depth: vertex behind the camera");
        screen[i] = project_pixel(K, p);
        invz[i] = 1.0 / p.z();
    }

    for (const Face& f : mesh.faces) {
        const Eigen::Vector2d &s0 = screen[f[0]], &s1 = screen[f[1]], &s2 = screen[f[2]];
        double area = (s1 - s0).x() * (s2 - s0).y() - (s1 - s0).y() * (s2 - s0).x();
        if (std::abs(area) < 1e-12)
            continue;
        const int u0 = std::max(0, static_cast<int>(std::ceil(std::min({s0.x(), s1.x(), s2.x()}))));
        const int u1 = std::min(width - 1,
                                static_cast<int>(std::floor(std::max({s0.x(), s1.x(), s2.x()}))));
        const int v0 = std::max(0, static_cast<int>(std::ceil(std::min({s0.y(), s1.y(), s2.y()}))));
        const int v1 = std::min(height - 1,
                                static_cast<int>(std::floor(std::max({s0.y(), s1.y(), s2.y()}))));
        for (int v = v0; v <= v1; ++v) {
            for (int u = u0; u <= u1; ++u) {
                const Eigen::Vector2d p(u, v);
                double w0 = (s1 - p).x() * (s2 - p).y() - (s1 - p).y() * (s2 - p).x();
                double w1 = (s2 - p).x() * (s0 - p).y() - (s2 - p).y() * (s0 - p).x();
                double w2 = (s0 - p).x() * (s1 - p).y() - (s0 - p).y() * (s1 - p).x();
                w0 /= area;
                w1 /= area;
                w2 /= area;
                if (w0 < -1e-9 || w1 < -1e-9 || w2 < -1e-9)
                    continue;
                // 1/z is linear in screen space, so this is perspective-correct
                const double iz = w0 * invz[f[0]] + w1 * invz[f[1]] + w2 * invz[f[2]];
                const double z = 1.0 / iz;
                const size_t at = static_cast<size_t>(v) * width + u;
                if (z < zbuf[at]) {
                    zbuf[at] = z;
                    const long units = std::lround(z * 10.0);
                    img.units[at] = static_cast<uint16_t>(std::clamp(units, 1L, 65535L));
                }
            }
        }
    }
    return img;
}

SimilarityTransform fixture_subject_transform() {
    SimilarityTransform T;
    T.scale = 1.05;
    const Mat3 flip = Eigen::AngleAxisd(kPi, Vec3::UnitX()).toRotationMatrix();
    const Mat3 wobble = (Eigen::AngleAxisd(deg_to_rad(4.0), Vec3::UnitZ()) *
                         Eigen::AngleAxisd(deg_to_rad(3.0), Vec3::UnitY()))
                            .toRotationMatrix();
    T.rotation = flip * wobble;
    T.translation = Vec3(8.0, -6.0, 620.0);
    return T;
}

void write_fixture_set(const std::filesystem::path& dir, const FixtureOptions& opts) {
    std::filesystem::create_directories(dir);

    TriangleMesh face = synthetic_face(opts.face);
    LandmarkSet landmarks = synthetic_landmarks(face, opts.face);
    ContactRegion region = synthetic_region(face, opts.face, opts.band);
    NurbsAsset interface = synthetic_interface(face, region, opts.band);

    write_obj(dir / "template_face.obj", face);
    std::vector<RawLandmark> raw;
    for (const Landmark& lm : landmarks.entries)
        raw.push_back({lm.name, std::nullopt, lm.position, lm.template_vertex});
    write_landmarks(dir / "template_landmarks.json", raw);
    write_region(dir / "contact_region.json", region);
    write_nurbs(dir / "generic_interface.json", interface);

    // the subject: same face with patient-specific bumps, similarity-placed
    // in front of the camera
    const SimilarityTransform T = fixture_subject_transform();
    TriangleMesh subject = apply_bumps(face, default_patient_bumps());
    transform_mesh(subject, T.scale, T.rotation, T.translation);
    compute_vertex_normals(subject);

    const DepthImage img =
        render_depth(subject, opts.image_width, opts.image_height);
    write_depth_pgm(dir / "scan.pgm", img.width, img.height, img.units, img.intrinsics);

    std::vector<RawLandmark> scan_marks;
    for (const Landmark& lm : landmarks.entries) {
        const Vec3& p = subject.vertices[lm.template_vertex];
        const Eigen::Vector2d pix = project_pixel(img.intrinsics, p);
        scan_marks.push_back({lm.name, pix, std::nullopt, std::nullopt});
    }
    write_landmarks(dir / "scan_landmarks.json", scan_marks);
}

} // namespace maskfit

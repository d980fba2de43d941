#include "maskfit/io.hpp"
#include "maskfit/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace maskfit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const fs::path& path, const std::string& what) {
    throw ParseError(path.string() + ": " + what);
}

std::ifstream open_input(const fs::path& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in)
        throw ParseError(path.string() + ": cannot open file");
    return in;
}

std::ofstream open_output(const fs::path& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw ParseError(path.string() + ": cannot open file for writing");
    return out;
}

json load_json(const fs::path& path) {
    std::ifstream in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        parse_fail(path, e.what());
    }
}

void dump_json(const fs::path& path, const json& j) {
    std::ofstream out = open_output(path);
    out << j.dump(2) << '\n';
}

std::string lower_ext(const fs::path& path) {
    std::string ext = path.extension().string();
    for (char& c : ext)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

} // namespace

// ---------------------------------------------------------------- OBJ

TriangleMesh read_obj(const fs::path& path) {
    std::ifstream in = open_input(path);
    TriangleMesh mesh;
    std::string line;
    size_t lineno = 0;
    size_t quads = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#')
            continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z()))
                parse_fail(path, "line " + std::to_string(lineno) + ": malformed vertex");
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string item;
            while (ls >> item) {
                // v, v/vt, v//vn, v/vt/vn all start with the vertex index
                size_t slash = item.find('/');
                int v = 0;
                try {
                    v = std::stoi(slash == std::string::npos ? item : item.substr(0, slash));
                } catch (...) {
                    parse_fail(path, "line " + std::to_string(lineno) + ": bad face index '" +
                                         item + "'");
                }
                if (v <= 0)
                    parse_fail(path, "line " + std::to_string(lineno) +
                                         ": face indices must be positive (1-based)");
                idx.push_back(v - 1);
            }
            if (idx.size() == 3) {
                mesh.faces.push_back({idx[0], idx[1], idx[2]});
            } else if (idx.size() == 4) {
                mesh.faces.push_back({idx[0], idx[1], idx[2]});
                mesh.faces.push_back({idx[0], idx[2], idx[3]});
                ++quads;
            } else {
                parse_fail(path, "line " + std::to_string(lineno) + ": face with " +
                                     std::to_string(idx.size()) + " vertices (only 3 or 4)");
            }
        } else if (tag == "mtllib" || tag == "usemtl") {
            throw UnsupportedFeature(path.string() + ": line " + std::to_string(lineno) +
                                     ": OBJ materials are not supported");
        }
        // vn/vt/o/g/s records carry no geometry we keep
    }
    if (quads > 0)
        std::fprintf(stderr, "warning: %s: %zu quad faces triangulated\n",
                     path.string().c_str(), quads);
    if (mesh.vertices.empty())
        parse_fail(path, "no vertices found");
    validate_mesh(mesh);
    return mesh;
}

void write_obj(const fs::path& path, const TriangleMesh& mesh) {
    std::ofstream out = open_output(path);
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const Face& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

// ---------------------------------------------------------------- PLY

namespace {

struct PlyProperty {
    std::string name;
    std::string type;      // scalar type, or the index type for lists
    std::string count_type; // nonempty marks a list
};

size_t scalar_size(const std::string& type, const fs::path& path) {
    if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
    if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
    if (type == "int" || type == "uint" || type == "int32" || type == "uint32" ||
        type == "float" || type == "float32") return 4;
    if (type == "double" || type == "float64") return 8;
    throw UnsupportedFeature(path.string() + ": unsupported PLY type '" + type + "'");
}

double read_scalar(std::istream& in, const std::string& type, const fs::path& path) {
    unsigned char raw[8];
    const size_t n = scalar_size(type, path);
    if (!in.read(reinterpret_cast<char*>(raw), static_cast<std::streamsize>(n)))
        parse_fail(path, "unexpected end of file at byte " +
                             std::to_string(static_cast<long long>(in.tellg())));
    // values are little-endian on disk; assemble explicitly
    uint64_t bits = 0;
    for (size_t k = 0; k < n; ++k)
        bits |= static_cast<uint64_t>(raw[k]) << (8 * k);
    if (type == "float" || type == "float32") {
        float f;
        uint32_t b32 = static_cast<uint32_t>(bits);
        std::memcpy(&f, &b32, 4);
        return f;
    }
    if (type == "double" || type == "float64") {
        double d;
        std::memcpy(&d, &bits, 8);
        return d;
    }
    if (type == "char" || type == "int8") return static_cast<int8_t>(bits);
    if (type == "short" || type == "int16") return static_cast<int16_t>(bits);
    if (type == "int" || type == "int32") return static_cast<int32_t>(bits);
    return static_cast<double>(bits); // unsigned kinds
}

} // namespace

TriangleMesh read_ply(const fs::path& path) {
    std::ifstream in = open_input(path, true);
    std::string line;
    if (!std::getline(in, line) || line != "ply")
        parse_fail(path, "missing 'ply' magic");
    size_t n_vertices = 0, n_faces = 0;
    std::vector<PlyProperty> vertex_props, face_props;
    std::vector<PlyProperty>* current = nullptr;
    bool little_endian = false;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "comment" || tag == "obj_info")
            continue;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "binary_little_endian")
                little_endian = true;
            else
                throw UnsupportedFeature(path.string() + ": only binary_little_endian PLY "
                                                         "is supported, got '" + fmt + "'");
        } else if (tag == "element") {
            std::string name;
            size_t count;
            if (!(ls >> name >> count))
                parse_fail(path, "line " + std::to_string(lineno) + ": malformed element");
            if (name == "vertex") {
                n_vertices = count;
                current = &vertex_props;
            } else if (name == "face") {
                n_faces = count;
                current = &face_props;
            } else if (count == 0) {
                current = nullptr;
            } else {
                throw UnsupportedFeature(path.string() + ": unsupported element '" + name + "'");
            }
        } else if (tag == "property") {
            if (current == nullptr)
                parse_fail(path, "line " + std::to_string(lineno) + ": property outside element");
            std::string t1;
            ls >> t1;
            PlyProperty prop;
            if (t1 == "list") {
                ls >> prop.count_type >> prop.type >> prop.name;
            } else {
                prop.type = t1;
                ls >> prop.name;
            }
            if (prop.name.empty())
                parse_fail(path, "line " + std::to_string(lineno) + ": malformed property");
            current->push_back(prop);
        } else if (tag == "end_header") {
            break;
        } else {
            parse_fail(path, "line " + std::to_string(lineno) + ": unknown header record '" +
                                 tag + "'");
        }
    }
    if (!little_endian)
        parse_fail(path, "no format record before end_header");

    TriangleMesh mesh;
    mesh.vertices.resize(n_vertices);
    bool has_normals = false;
    for (const PlyProperty& p : vertex_props)
        if (p.name == "nx") has_normals = true;
    if (has_normals)
        mesh.normals.resize(n_vertices);

    for (size_t i = 0; i < n_vertices; ++i) {
        for (const PlyProperty& p : vertex_props) {
            if (!p.count_type.empty())
                throw UnsupportedFeature(path.string() + ": list property on vertices");
            const double val = read_scalar(in, p.type, path);
            if (p.name == "x") mesh.vertices[i].x() = val;
            else if (p.name == "y") mesh.vertices[i].y() = val;
            else if (p.name == "z") mesh.vertices[i].z() = val;
            else if (has_normals && p.name == "nx") mesh.normals[i].x() = val;
            else if (has_normals && p.name == "ny") mesh.normals[i].y() = val;
            else if (has_normals && p.name == "nz") mesh.normals[i].z() = val;
            // other scalar properties are read and discarded
        }
    }
    for (size_t f = 0; f < n_faces; ++f) {
        for (const PlyProperty& p : face_props) {
            if (p.count_type.empty()) {
                read_scalar(in, p.type, path);
                continue;
            }
            const size_t count = static_cast<size_t>(read_scalar(in, p.count_type, path));
            if (p.name == "vertex_indices" || p.name == "vertex_index") {
                std::vector<int> idx(count);
                for (size_t k = 0; k < count; ++k)
                    idx[k] = static_cast<int>(read_scalar(in, p.type, path));
                if (count == 3) {
                    mesh.faces.push_back({idx[0], idx[1], idx[2]});
                } else if (count == 4) {
                    mesh.faces.push_back({idx[0], idx[1], idx[2]});
                    mesh.faces.push_back({idx[0], idx[2], idx[3]});
                } else {
                    parse_fail(path, "face " + std::to_string(f) + " has " +
                                         std::to_string(count) + " vertices (only 3 or 4)");
                }
            } else {
                for (size_t k = 0; k < count; ++k)
                    read_scalar(in, p.type, path);
            }
        }
    }
    validate_mesh(mesh);
    return mesh;
}

void write_ply(const fs::path& path, const TriangleMesh& mesh) {
    std::ofstream out = open_output(path, true);
    const bool with_normals = mesh.has_normals();
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << mesh.vertices.size() << '\n';
    out << "property float x\nproperty float y\nproperty float z\n";
    if (with_normals)
        out << "property float nx\nproperty float ny\nproperty float nz\n";
    out << "element face " << mesh.faces.size() << '\n';
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";

    auto put_f32 = [&](double v) {
        const float f = static_cast<float>(v);
        uint32_t bits;
        std::memcpy(&bits, &f, 4);
        char raw[4];
        for (int k = 0; k < 4; ++k)
            raw[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
        out.write(raw, 4);
    };
    auto put_i32 = [&](int32_t v) {
        char raw[4];
        for (int k = 0; k < 4; ++k)
            raw[k] = static_cast<char>((static_cast<uint32_t>(v) >> (8 * k)) & 0xff);
        out.write(raw, 4);
    };

    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        for (int c = 0; c < 3; ++c)
            put_f32(mesh.vertices[i][c]);
        if (with_normals)
            for (int c = 0; c < 3; ++c)
                put_f32(mesh.normals[i][c]);
    }
    for (const Face& f : mesh.faces) {
        out.put(static_cast<char>(3));
        for (int k = 0; k < 3; ++k)
            put_i32(f[k]);
    }
}

TriangleMesh read_mesh(const fs::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".obj")
        return read_obj(path);
    if (ext == ".ply")
        return read_ply(path);
    throw UnsupportedFeature(path.string() + ": unknown mesh extension '" + ext + "'");
}

void write_mesh(const fs::path& path, const TriangleMesh& mesh) {
    const std::string ext = lower_ext(path);
    if (ext == ".obj")
        write_obj(path, mesh);
    else if (ext == ".ply")
        write_ply(path, mesh);
    else
        throw UnsupportedFeature(path.string() + ": unknown mesh extension '" + ext + "'");
}

// ---------------------------------------------------------------- PGM depth

namespace {

// next whitespace-delimited token, skipping '#' comments
std::string pgm_token(std::istream& in, const fs::path& path) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty())
                return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty())
        parse_fail(path, "unexpected end of PGM header");
    return tok;
}

fs::path default_intrinsics_path(fs::path scan) {
    scan.replace_extension(".intrinsics.json");
    return scan;
}

PinholeIntrinsics read_intrinsics(const fs::path& path) {
    if (!fs::exists(path))
        throw MissingIntrinsics(path.string() + ": intrinsics sidecar not found");
    const json j = load_json(path);
    for (const char* key : {"fx", "fy", "cx", "cy"})
        if (!j.contains(key) || !j[key].is_number())
            parse_fail(path, std::string("missing or non-numeric '") + key + "'");
    return {j["fx"].get<double>(), j["fy"].get<double>(),
            j["cx"].get<double>(), j["cy"].get<double>()};
}

} // namespace

RangeScan read_range_scan(const fs::path& path, const fs::path& intrinsics_path) {
    const std::string ext = lower_ext(path);
    if (ext == ".ply") {
        TriangleMesh cloud = read_ply(path);
        RangeScan scan;
        scan.points = std::move(cloud.vertices);
        scan.normals = std::move(cloud.normals);
        return scan;
    }
    if (ext != ".pgm")
        throw UnsupportedFeature(path.string() + ": unknown scan extension '" + ext + "'");

    std::ifstream in = open_input(path, true);
    if (pgm_token(in, path) != "P5")
        parse_fail(path, "not a binary PGM (P5) file");
    int width = 0, height = 0;
    long maxval = 0;
    try {
        width = std::stoi(pgm_token(in, path));
        height = std::stoi(pgm_token(in, path));
        maxval = std::stol(pgm_token(in, path));
    } catch (...) {
        parse_fail(path, "malformed PGM header");
    }
    if (width <= 0 || height <= 0)
        parse_fail(path, "non-positive image dimensions");
    if (maxval < 256 || maxval > 65535)
        throw UnsupportedFeature(path.string() + ": need 16-bit samples (maxval in "
                                                 "[256,65535]), got maxval " +
                                 std::to_string(maxval));

    const PinholeIntrinsics K = read_intrinsics(
        intrinsics_path.empty() ? default_intrinsics_path(path) : intrinsics_path);

    const size_t n = static_cast<size_t>(width) * height;
    std::vector<unsigned char> raw(n * 2);
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
        parse_fail(path, "truncated sample data at byte " +
                             std::to_string(static_cast<long long>(in.tellg())));

    RangeScan scan;
    scan.width = width;
    scan.height = height;
    scan.intrinsics = K;
    scan.grid.assign(n, -1);
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            const size_t at = static_cast<size_t>(v) * width + u;
            const uint16_t units = static_cast<uint16_t>(raw[2 * at] | (raw[2 * at + 1] << 8));
            if (units == 0)
                continue; // no measurement at this pixel
            const double z = 0.1 * units;
            scan.grid[at] = static_cast<int32_t>(scan.points.size());
            scan.points.emplace_back((u - K.cx) * z / K.fx, (v - K.cy) * z / K.fy, z);
        }
    }
    if (scan.points.empty())
        parse_fail(path, "depth image holds no valid samples");
    validate_scan(scan);
    return scan;
}

void write_depth_pgm(const fs::path& path, int width, int height,
                     std::span<const uint16_t> depth_units,
                     const PinholeIntrinsics& intrinsics) {
    if (depth_units.size() != static_cast<size_t>(width) * height)
        throw InvalidArgument("depth buffer size does not match dimensions");
    std::ofstream out = open_output(path, true);
    out << "P5\n" << width << ' ' << height << "\n65535\n";
    for (uint16_t units : depth_units) {
        out.put(static_cast<char>(units & 0xff));
        out.put(static_cast<char>((units >> 8) & 0xff));
    }
    json j{{"fx", intrinsics.fx}, {"fy", intrinsics.fy},
           {"cx", intrinsics.cx}, {"cy", intrinsics.cy}};
    dump_json(default_intrinsics_path(path), j);
}

// ---------------------------------------------------------------- JSON assets

std::vector<RawLandmark> read_landmarks(const fs::path& path) {
    const json j = load_json(path);
    if (!j.is_array())
        parse_fail(path, "expected a top-level array of landmarks");
    std::vector<RawLandmark> out;
    std::unordered_set<std::string> seen;
    for (const json& entry : j) {
        RawLandmark lm;
        if (!entry.contains("name") || !entry["name"].is_string())
            parse_fail(path, "landmark entry without a string 'name'");
        lm.name = entry["name"].get<std::string>();
        if (!seen.insert(lm.name).second)
            parse_fail(path, "duplicate landmark name '" + lm.name + "'");
        if (entry.contains("u") && entry.contains("v"))
            lm.pixel = Eigen::Vector2d(entry["u"].get<double>(), entry["v"].get<double>());
        if (entry.contains("x") && entry.contains("y") && entry.contains("z"))
            lm.position = Vec3(entry["x"].get<double>(), entry["y"].get<double>(),
                               entry["z"].get<double>());
        if (!lm.pixel && !lm.position)
            parse_fail(path, "landmark '" + lm.name + "' has neither (u,v) nor (x,y,z)");
        if (entry.contains("template_vertex"))
            lm.template_vertex = entry["template_vertex"].get<int>();
        out.push_back(std::move(lm));
    }
    if (out.empty())
        parse_fail(path, "landmark file is empty");
    return out;
}

void write_landmarks(const fs::path& path, std::span<const RawLandmark> landmarks) {
    json arr = json::array();
    for (const RawLandmark& lm : landmarks) {
        json e{{"name", lm.name}};
        if (lm.pixel) {
            e["u"] = lm.pixel->x();
            e["v"] = lm.pixel->y();
        }
        if (lm.position) {
            e["x"] = lm.position->x();
            e["y"] = lm.position->y();
            e["z"] = lm.position->z();
        }
        if (lm.template_vertex)
            e["template_vertex"] = *lm.template_vertex;
        arr.push_back(std::move(e));
    }
    dump_json(path, arr);
}

ContactRegion read_region(const fs::path& path) {
    const json j = load_json(path);
    if (!j.contains("indices") || !j["indices"].is_array())
        parse_fail(path, "missing 'indices' array");
    ContactRegion region;
    region.closed = j.value("closed", false);
    for (const json& e : j["indices"])
        region.vertex_indices.push_back(e.get<int>());
    if (region.vertex_indices.empty())
        parse_fail(path, "region has no indices");
    return region;
}

void write_region(const fs::path& path, const ContactRegion& region) {
    dump_json(path, json{{"closed", region.closed}, {"indices", region.vertex_indices}});
}

NurbsAsset read_nurbs(const fs::path& path) {
    const json j = load_json(path);
    NurbsAsset asset;
    NurbsSurface& s = asset.surface;
    try {
        s.degree_u = j.at("degree_u").get<int>();
        s.degree_v = j.at("degree_v").get<int>();
        s.nu = j.at("nu").get<int>();
        s.nv = j.at("nv").get<int>();
        s.knots_u = j.at("knots_u").get<std::vector<double>>();
        s.knots_v = j.at("knots_v").get<std::vector<double>>();
        for (const json& p : j.at("control_points")) {
            if (!p.is_array() || p.size() != 3)
                parse_fail(path, "control point entries must be [x,y,z]");
            s.control.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
        }
        s.weights = j.at("weights").get<std::vector<double>>();
        if (j.contains("control_map"))
            for (const json& e : j["control_map"])
                asset.map.entries.push_back({e.at("i").get<int>(), e.at("j").get<int>(),
                                             e.at("k").get<int>()});
    } catch (const json::exception& e) {
        parse_fail(path, e.what());
    }
    try {
        validate_surface(s);
    } catch (const Error& e) {
        parse_fail(path, e.what());
    }
    return asset;
}

void write_nurbs(const fs::path& path, const NurbsAsset& asset) {
    const NurbsSurface& s = asset.surface;
    json ctrl = json::array();
    for (const Vec3& p : s.control)
        ctrl.push_back({p.x(), p.y(), p.z()});
    json map = json::array();
    for (const ControlMap::Entry& e : asset.map.entries)
        map.push_back({{"i", e.i}, {"j", e.j}, {"k", e.k}});
    dump_json(path, json{{"degree_u", s.degree_u},
                         {"degree_v", s.degree_v},
                         {"nu", s.nu},
                         {"nv", s.nv},
                         {"knots_u", s.knots_u},
                         {"knots_v", s.knots_v},
                         {"control_points", std::move(ctrl)},
                         {"weights", s.weights},
                         {"control_map", std::move(map)}});
}

SimilarityTransform read_similarity(const fs::path& path) {
    const json j = load_json(path);
    SimilarityTransform T;
    try {
        T.scale = j.at("scale").get<double>();
        const auto R = j.at("rotation").get<std::vector<std::vector<double>>>();
        if (R.size() != 3 || R[0].size() != 3 || R[1].size() != 3 || R[2].size() != 3)
            parse_fail(path, "'rotation' must be a 3x3 matrix");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                T.rotation(r, c) = R[r][c];
        const auto t = j.at("translation").get<std::vector<double>>();
        if (t.size() != 3)
            parse_fail(path, "'translation' must have 3 entries");
        T.translation = Vec3(t[0], t[1], t[2]);
    } catch (const json::exception& e) {
        parse_fail(path, e.what());
    }
    try {
        validate_transform(T);
    } catch (const Error& e) {
        parse_fail(path, e.what());
    }
    return T;
}

void write_similarity(const fs::path& path, const SimilarityTransform& T,
                      const AlignmentReport* report) {
    json j{{"scale", T.scale},
           {"rotation",
            {{T.rotation(0, 0), T.rotation(0, 1), T.rotation(0, 2)},
             {T.rotation(1, 0), T.rotation(1, 1), T.rotation(1, 2)},
             {T.rotation(2, 0), T.rotation(2, 1), T.rotation(2, 2)}}},
           {"translation", {T.translation.x(), T.translation.y(), T.translation.z()}}};
    if (report) {
        j["iterations"] = report->iterations;
        j["final_rms_mm"] = report->final_rms;
        j["rms_history_mm"] = report->rms_history;
    }
    dump_json(path, j);
}

WarpedRegion read_warped_region(const fs::path& path) {
    const json j = load_json(path);
    if (!j.contains("points") || !j["points"].is_array())
        parse_fail(path, "missing 'points' array");
    WarpedRegion warped;
    for (const json& p : j["points"]) {
        if (!p.is_array() || p.size() != 3)
            parse_fail(path, "points must be [x,y,z] triples");
        warped.points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    if (warped.points.empty())
        parse_fail(path, "warped region has no points");
    return warped;
}

void write_warped_region(const fs::path& path, const WarpedRegion& warped) {
    json pts = json::array();
    for (const Vec3& p : warped.points)
        pts.push_back({p.x(), p.y(), p.z()});
    dump_json(path, json{{"points", std::move(pts)}});
}

void write_pressure_report(const fs::path& path, const PressureReport& report) {
    std::ofstream out = open_output(path);
    char buf[64];
    for (size_t v = 0; v < report.pressure.size(); ++v) {
        std::snprintf(buf, sizeof buf, "%zu %.9g\n", v, report.pressure[v]);
        out << buf;
    }
    out << "# summary\n";
    out << "# rim_count " << report.rim.count << '\n';
    std::snprintf(buf, sizeof buf, "%.9g", report.rim.mean);
    out << "# rim_mean " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.9g", report.rim.stddev);
    out << "# rim_stddev " << buf << '\n';
    if (report.rim.cv_defined) {
        std::snprintf(buf, sizeof buf, "%.9g", report.rim.cv);
        out << "# rim_cv " << buf << '\n';
    } else {
        out << "# rim_cv undefined\n";
    }
    std::snprintf(buf, sizeof buf, "%.9g %.9g", report.rim.min, report.rim.max);
    out << "# rim_min_max " << buf << '\n';
    out << "# no_contact " << (report.no_contact ? 1 : 0) << '\n';
}

AssetBundle load_asset_bundle(const fs::path& dir) {
    AssetBundle bundle;
    bundle.template_mesh = read_mesh(dir / "template_face.obj");
    compute_vertex_normals(bundle.template_mesh);

    const std::vector<RawLandmark> raw = read_landmarks(dir / "template_landmarks.json");
    for (const RawLandmark& lm : raw) {
        if (!lm.position || !lm.template_vertex)
            throw ParseError((dir / "template_landmarks.json").string() + ": landmark '" +
                             lm.name + "' needs (x,y,z) and template_vertex");
        bundle.template_landmarks.entries.push_back({lm.name, *lm.position, *lm.template_vertex});
    }
    validate_landmark_set(bundle.template_landmarks,
                          static_cast<int>(bundle.template_mesh.vertices.size()));

    bundle.region = read_region(dir / "contact_region.json");
    validate_region(bundle.region, bundle.template_mesh);

    NurbsAsset asset = read_nurbs(dir / "generic_interface.json");
    bundle.generic_interface = std::move(asset.surface);
    bundle.control_map = std::move(asset.map);
    validate_control_map(bundle.control_map, bundle.generic_interface,
                         bundle.region.vertex_indices.size());
    return bundle;
}

} // namespace maskfit

// Compares the OpenMP kernels against their serial reference
// implementations: wall time and maximum absolute difference.

#include "maskfit/contact.hpp"
#include "maskfit/correspondence.hpp"
#include "maskfit/cotangent.hpp"
#include "maskfit/kdtree.hpp"
#include "maskfit/mesh.hpp"
#include "maskfit/nonrigid.hpp"
#include "maskfit/nurbs.hpp"
#include "maskfit/synthetic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>

using namespace maskfit;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
double time_ms(F&& fn, int repeats) {
    fn(); // warm up
    const auto t0 = Clock::now();
    for (int r = 0; r < repeats; ++r)
        fn();
    return ms_since(t0) / repeats;
}

void row(const char* name, size_t n, double serial_ms, double parallel_ms, double max_diff) {
    std::printf("%-22s n=%-8zu serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   max|diff| %.3g\n",
                name, n, serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

double max_vec_diff(std::span<const Vec3> a, std::span<const Vec3> b) {
    double m = 0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, (a[i] - b[i]).cwiseAbs().maxCoeff());
    return m;
}

} // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const int grid = quick ? 40 : 160;
    const int repeats = quick ? 1 : 5;

#ifdef _OPENMP
    std::printf("openmp: %d threads\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif

    SyntheticFaceSpec spec;
    spec.grid_x = spec.grid_y = grid;
    TriangleMesh face = synthetic_face(spec);
    const VertexFaceAdjacency adj = build_vertex_face_adjacency(face);

    // vertex normals
    {
        std::vector<Vec3> ser, par;
        const double t_ser = time_ms([&] { ser = serial::vertex_normals(face, adj); }, repeats);
        const double t_par = time_ms([&] { par = vertex_normals(face, adj); }, repeats);
        row("vertex_normals", face.vertices.size(), t_ser, t_par, max_vec_diff(ser, par));
    }

    // closest-point matching through the KD-tree
    TriangleMesh scan_mesh = apply_bumps(face, default_patient_bumps());
    RangeScan scan;
    scan.points = scan_mesh.vertices;
    scan.normals = scan_mesh.normals;
    KdTree tree{std::span<const Vec3>(scan.points)};
    {
        std::vector<CorrespondencePair> ser, par;
        const double t_ser = time_ms(
            [&] { ser = serial::match_closest(face, scan, scan.normals, &tree); }, repeats);
        const double t_par = time_ms(
            [&] { par = match_closest(face, scan, scan.normals, &tree); }, repeats);
        double diff = ser.size() == par.size() ? 0.0 : 1.0;
        for (size_t i = 0; diff == 0.0 && i < ser.size(); ++i)
            diff = std::max({diff, std::abs(ser[i].distance - par[i].distance),
                             ser[i].scan_point == par[i].scan_point ? 0.0 : 1.0});
        row("match_closest", face.vertices.size(), t_ser, t_par, diff);
    }

    // energy evaluation
    CotangentWeights cot = CotangentWeights::build(face);
    {
        std::vector<CorrespondencePair> pairs = match_closest(face, scan, scan.normals, &tree);
        DisplacementField d(face.vertices.size());
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        for (Vec3& v : d)
            v = Vec3(uni(rng), uni(rng), uni(rng));
        EnergyProblem prob{&face, pairs, {}, &cot, scan.points, scan.normals, {}};
        double e_ser = 0, e_par = 0;
        const double t_ser = time_ms([&] { e_ser = serial::energy_value(prob, d); }, repeats);
        const double t_par = time_ms([&] { e_par = energy_value(prob, d); }, repeats);
        row("energy_value", pairs.size(), t_ser, t_par, std::abs(e_ser - e_par));
    }

    // NURBS tessellation
    {
        ContactRegion region = synthetic_region(face, spec);
        NurbsAsset asset = synthetic_interface(face, region);
        const int ru = quick ? 48 : 200, rv = quick ? 12 : 100;
        TriangleMesh ser, par;
        const double t_ser = time_ms([&] { ser = serial::tessellate(asset.surface, ru, rv); }, repeats);
        const double t_par = time_ms([&] { par = tessellate(asset.surface, ru, rv); }, repeats);
        row("tessellate", ser.vertices.size(), t_ser, t_par,
            max_vec_diff(ser.vertices, par.vertices));
    }

    // press gap queries
    {
        ContactRegion region = synthetic_region(face, spec);
        NurbsAsset asset = synthetic_interface(face, region);
        TriangleMesh interface = tessellate(asset.surface, quick ? 48 : 160, quick ? 12 : 40);
        for (Vec3& v : interface.vertices)
            v.z() += 5.0;
        const Vec3 approach(0, 0, -1);
        std::vector<double> ser, par;
        const double t_ser = time_ms(
            [&] { ser = serial::interface_gaps(face, interface, approach); }, repeats);
        const double t_par = time_ms(
            [&] { par = interface_gaps(face, interface, approach); }, repeats);
        double diff = 0;
        for (size_t i = 0; i < ser.size(); ++i) {
            if (std::isnan(ser[i]) != std::isnan(par[i]))
                diff = std::max(diff, 1.0);
            else if (!std::isnan(ser[i]))
                diff = std::max(diff, std::abs(ser[i] - par[i]));
        }
        row("interface_gaps", face.vertices.size(), t_ser, t_par, diff);
    }

    return 0;
}

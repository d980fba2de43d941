#include "maskfit/nurbs.hpp"
#include "maskfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace maskfit {

std::pair<double, double> NurbsSurface::domain_u() const {
    return {knots_u[degree_u], knots_u[nu]};
}
std::pair<double, double> NurbsSurface::domain_v() const {
    return {knots_v[degree_v], knots_v[nv]};
}

namespace {

void validate_knots(const std::vector<double>& knots, int n, int degree, const char* dir) {
    const std::string where = std::string("knot vector ") + dir;
    if (degree < 1)
        throw InvalidArgument(where + ": degree must be >= 1");
    if (static_cast<int>(knots.size()) != n + degree + 1)
        throw InvalidArgument(where + ": expected " + std::to_string(n + degree + 1) +
                              " knots (control count + degree + 1), got " +
                              std::to_string(knots.size()));
    for (size_t k = 1; k < knots.size(); ++k)
        if (knots[k] < knots[k - 1])
            throw InvalidArgument(where + ": knots must be non-decreasing");
    for (int k = 0; k <= degree; ++k) {
        if (knots[k] != knots[0] || knots[knots.size() - 1 - k] != knots.back())
            throw InvalidArgument(where + ": must be clamped (first and last knot "
                                          "repeated degree+1 times)");
    }
    if (knots.front() == knots.back())
        throw InvalidArgument(where + ": empty parameter domain");
    // end multiplicities must be exactly degree+1 or span lookup degenerates
    if (knots[degree] == knots[degree + 1] || knots[n - 1] == knots[n])
        throw InvalidArgument(where + ": end knot multiplicity exceeds degree+1");
}

// Index of the knot span containing u, with the closed right end mapped back
// to the last non-empty span so the domain endpoint is reachable.
int find_span(const std::vector<double>& knots, int n, int degree, double u) {
    if (u == knots[n])
        return n - 1;
    // binary search over [degree, n)
    int lo = degree, hi = n;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (u < knots[mid])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

// Nonzero B-spline basis functions N_{span-degree..span}(u), Cox-de Boor in
// the standard triangular form.
void basis_funcs(const std::vector<double>& knots, int span, int degree, double u,
                 std::vector<double>& N) {
    N.assign(degree + 1, 0.0);
    std::vector<double> left(degree + 1), right(degree + 1);
    N[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom != 0.0 ? N[r] / denom : 0.0;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }
}

} // namespace

void validate_surface(const NurbsSurface& s) {
    if (s.nu < s.degree_u + 1 || s.nv < s.degree_v + 1)
        throw InvalidArgument("control grid too small for the degrees");
    validate_knots(s.knots_u, s.nu, s.degree_u, "u");
    validate_knots(s.knots_v, s.nv, s.degree_v, "v");
    const size_t expected = static_cast<size_t>(s.nu) * s.nv;
    if (s.control.size() != expected || s.weights.size() != expected)
        throw InvalidArgument("control/weight grid size must be nu*nv = " +
                              std::to_string(expected));
    for (double w : s.weights)
        if (!(w > 0.0))
            throw InvalidArgument("all weights must be strictly positive");
}

Vec3 evaluate_surface(const NurbsSurface& s, double u, double v) {
    const auto [u0, u1] = s.domain_u();
    const auto [v0, v1] = s.domain_v();
    if (u < u0 || u > u1 || v < v0 || v > v1)
        throw OutOfDomain("(u,v) = (" + std::to_string(u) + "," + std::to_string(v) +
                          ") outside [" + std::to_string(u0) + "," + std::to_string(u1) +
                          "]x[" + std::to_string(v0) + "," + std::to_string(v1) + "]");

    const int span_u = find_span(s.knots_u, s.nu, s.degree_u, u);
    const int span_v = find_span(s.knots_v, s.nv, s.degree_v, v);
    std::vector<double> Nu, Nv;
    basis_funcs(s.knots_u, span_u, s.degree_u, u, Nu);
    basis_funcs(s.knots_v, span_v, s.degree_v, v, Nv);

    Vec3 num = Vec3::Zero();
    double den = 0.0;
    for (int a = 0; a <= s.degree_u; ++a) {
        const int i = span_u - s.degree_u + a;
        for (int b = 0; b <= s.degree_v; ++b) {
            const int j = span_v - s.degree_v + b;
            const double wN = Nu[a] * Nv[b] * s.weights[s.ctrl_index(i, j)];
            num += wN * s.control[s.ctrl_index(i, j)];
            den += wN;
        }
    }
    return num / den;
}

void validate_control_map(const ControlMap& map, const NurbsSurface& s, size_t region_size) {
    std::set<std::pair<int, int>> seen;
    for (const ControlMap::Entry& e : map.entries) {
        if (e.i < 0 || e.i >= s.nu || e.j < 0 || e.j >= s.nv)
            throw MapOutOfRange("control index (" + std::to_string(e.i) + "," +
                                std::to_string(e.j) + ") outside the " +
                                std::to_string(s.nu) + "x" + std::to_string(s.nv) + " grid");
        if (!seen.insert({e.i, e.j}).second)
            throw MapOutOfRange("control index (" + std::to_string(e.i) + "," +
                                std::to_string(e.j) + ") mapped twice");
        if (e.k < 0 || static_cast<size_t>(e.k) >= region_size)
            throw MapOutOfRange("region ordinal " + std::to_string(e.k) +
                                " outside [0," + std::to_string(region_size) + ")");
    }
}

NurbsSurface fit_interface(const NurbsSurface& generic, const ControlMap& map,
                           const WarpedRegion& warped) {
    validate_surface(generic);
    validate_control_map(map, generic, warped.points.size());
    NurbsSurface fitted = generic;
    for (const ControlMap::Entry& e : map.entries)
        fitted.control[fitted.ctrl_index(e.i, e.j)] = warped.points[e.k];
    return fitted;
}

namespace {

TriangleMesh tessellation_topology(const NurbsSurface& s, int res_u, int res_v) {
    if (res_u < 2 || res_v < 2)
        throw InvalidArgument("tessellation resolution must be >= 2 per direction");
    validate_surface(s);
    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<size_t>(res_u) * res_v);
    mesh.faces.reserve(2 * static_cast<size_t>(res_u - 1) * (res_v - 1));
    for (int a = 0; a + 1 < res_u; ++a) {
        for (int b = 0; b + 1 < res_v; ++b) {
            const int p00 = a * res_v + b, p01 = a * res_v + b + 1;
            const int p10 = (a + 1) * res_v + b, p11 = (a + 1) * res_v + b + 1;
            mesh.faces.push_back({p00, p10, p11});
            mesh.faces.push_back({p00, p11, p01});
        }
    }
    return mesh;
}

inline Vec3 sample_at(const NurbsSurface& s, int res_u, int res_v, int a, int b) {
    const auto [u0, u1] = s.domain_u();
    const auto [v0, v1] = s.domain_v();
    const double u = u0 + (u1 - u0) * a / (res_u - 1);
    const double v = v0 + (v1 - v0) * b / (res_v - 1);
    return evaluate_surface(s, std::min(u, u1), std::min(v, v1));
}

} // namespace

TriangleMesh tessellate(const NurbsSurface& s, int res_u, int res_v) {
    TriangleMesh mesh = tessellation_topology(s, res_u, res_v);
#pragma omp parallel for schedule(static)
    for (int idx = 0; idx < static_cast<int>(mesh.vertices.size()); ++idx)
        mesh.vertices[idx] = sample_at(s, res_u, res_v, idx / res_v, idx % res_v);
    return mesh;
}

namespace serial {
TriangleMesh tessellate(const NurbsSurface& s, int res_u, int res_v) {
    TriangleMesh mesh = tessellation_topology(s, res_u, res_v);
    for (int idx = 0; idx < static_cast<int>(mesh.vertices.size()); ++idx)
        mesh.vertices[idx] = sample_at(s, res_u, res_v, idx / res_v, idx % res_v);
    return mesh;
}
} // namespace serial

} // namespace maskfit

#include "maskfit/nonrigid.hpp"
#include "maskfit/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace maskfit {

void validate_weights(const EnergyWeights& w) {
    if (w.p2point < 0 || w.p2plane < 0 || w.memb < 0 || w.ref < 0)
        throw InvalidArgument("energy weights must be non-negative");
    if (w.p2point <= 0 && w.p2plane <= 0 && w.ref <= 0)
        throw InvalidArgument("at least one data weight (p2point, p2plane, ref) "
                              "must be strictly positive");
}

void validate_schedule(const ScheduleConfig& cfg) {
    if (!(cfg.step_norm_threshold > 0))
        throw InvalidArgument("step norm threshold must be positive");
    if (!(cfg.decay_factor > 0 && cfg.decay_factor < 1))
        throw InvalidArgument("decay factor must lie in (0,1)");
    if (cfg.max_outer_iterations < 0)
        throw InvalidArgument("iteration cap must be non-negative");
}

double EnergyTerms::total() const { return p2point + p2plane + memb + ref; }

namespace {

struct TermPieces {
    double p2point, p2plane;
};

inline TermPieces pair_terms(const EnergyProblem& prob, std::span<const Vec3> d,
                             const CorrespondencePair& p) {
    const Vec3 r = prob.tpl->vertices[p.template_vertex] + d[p.template_vertex] -
                   prob.scan_points[p.scan_point];
    const double along = prob.scan_normals[p.scan_point].dot(r);
    return {r.squaredNorm(), along * along};
}

inline double memb_term(std::span<const Vec3> d, const CotangentWeights::Edge& e) {
    // the weight sits inside the squared norm, so it enters squared; each
    // undirected edge appears twice in the double sum over neighborhoods
    return 2.0 * e.w * e.w * (d[e.i] - d[e.j]).squaredNorm();
}

inline double ref_term(std::span<const Vec3> d, const LandmarkPair& lm,
                       const EnergyProblem& prob) {
    return (prob.tpl->vertices[lm.template_vertex] + d[lm.template_vertex] - lm.scan_pos)
        .squaredNorm();
}

void check_problem(const EnergyProblem& prob, std::span<const Vec3> d) {
    if (prob.tpl == nullptr || prob.cot == nullptr)
        throw InvalidArgument("energy problem is missing geometry");
    if (d.size() != prob.tpl->vertices.size())
        throw InvalidArgument("displacement field length does not match the template");
}

} // namespace

EnergyTerms energy_terms(const EnergyProblem& prob, std::span<const Vec3> d) {
    check_problem(prob, d);
    const auto& edges = prob.cot->edges();

    std::vector<TermPieces> pair_vals(prob.pairs.size());
    std::vector<double> memb_vals(edges.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < static_cast<int>(prob.pairs.size()); ++i)
        pair_vals[i] = pair_terms(prob, d, prob.pairs[i]);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < static_cast<int>(edges.size()); ++e)
        memb_vals[e] = memb_term(d, edges[e]);

    EnergyTerms terms;
    for (const TermPieces& t : pair_vals) { // fixed order keeps the sum deterministic
        terms.p2point += t.p2point;
        terms.p2plane += t.p2plane;
    }
    terms.memb = std::accumulate(memb_vals.begin(), memb_vals.end(), 0.0);
    for (const LandmarkPair& lm : prob.landmarks)
        terms.ref += ref_term(d, lm, prob);

    terms.p2point *= prob.weights.p2point;
    terms.p2plane *= prob.weights.p2plane;
    terms.memb *= prob.weights.memb;
    terms.ref *= prob.weights.ref;
    return terms;
}

double energy_value(const EnergyProblem& prob, std::span<const Vec3> d) {
    return energy_terms(prob, d).total();
}

namespace serial {
double energy_value(const EnergyProblem& prob, std::span<const Vec3> d) {
    check_problem(prob, d);
    double p2point = 0, p2plane = 0, memb = 0, ref = 0;
    for (const CorrespondencePair& p : prob.pairs) {
        const TermPieces t = pair_terms(prob, d, p);
        p2point += t.p2point;
        p2plane += t.p2plane;
    }
    for (const CotangentWeights::Edge& e : prob.cot->edges())
        memb += memb_term(d, e);
    for (const LandmarkPair& lm : prob.landmarks)
        ref += ref_term(d, lm, prob);
    return prob.weights.p2point * p2point + prob.weights.p2plane * p2plane +
           prob.weights.memb * memb + prob.weights.ref * ref;
}
} // namespace serial

DisplacementField energy_gradient(const EnergyProblem& prob, std::span<const Vec3> d) {
    check_problem(prob, d);
    const size_t n = prob.tpl->vertices.size();
    DisplacementField grad(n, Vec3::Zero());

    for (const CorrespondencePair& p : prob.pairs) {
        const Vec3 r = prob.tpl->vertices[p.template_vertex] + d[p.template_vertex] -
                       prob.scan_points[p.scan_point];
        const Vec3& nrm = prob.scan_normals[p.scan_point];
        grad[p.template_vertex] += 2.0 * prob.weights.p2point * r;
        grad[p.template_vertex] += 2.0 * prob.weights.p2plane * nrm.dot(r) * nrm;
    }
    for (const CotangentWeights::Edge& e : prob.cot->edges()) {
        const Vec3 g = 4.0 * prob.weights.memb * e.w * e.w * (d[e.i] - d[e.j]);
        grad[e.i] += g;
        grad[e.j] -= g;
    }
    for (const LandmarkPair& lm : prob.landmarks) {
        const Vec3 r = prob.tpl->vertices[lm.template_vertex] + d[lm.template_vertex] -
                       lm.scan_pos;
        grad[lm.template_vertex] += 2.0 * prob.weights.ref * r;
    }
    return grad;
}

DisplacementField solve_displacement(const EnergyProblem& prob) {
    if (prob.tpl == nullptr || prob.cot == nullptr)
        throw InvalidArgument("energy problem is missing geometry");
    validate_weights(prob.weights);
    if (prob.pairs.empty() && prob.landmarks.empty())
        throw InvalidArgument("no data terms: need at least one pair or landmark");

    const int n = static_cast<int>(prob.tpl->vertices.size());
    const auto& edges = prob.cot->edges();
    using Trip = Eigen::Triplet<double>;

    // Writing E(d) = d^T A d - 2 b^T d + c, the minimizer solves A d = b.
    // Every pair/edge/landmark owns a fixed triplet slot, so the assembly
    // order (and the summed matrix) is independent of the thread count.
    const size_t pair_base = 0;
    const size_t edge_base = pair_base + prob.pairs.size() * 9;
    const size_t lm_base = edge_base + edges.size() * 12;
    std::vector<Trip> trips(lm_base + prob.landmarks.size() * 3);

#pragma omp parallel for schedule(static)
    for (int i = 0; i < static_cast<int>(prob.pairs.size()); ++i) {
        const CorrespondencePair& p = prob.pairs[i];
        const Vec3& nrm = prob.scan_normals[p.scan_point];
        const Mat3 block = prob.weights.p2point * Mat3::Identity() +
                           prob.weights.p2plane * (nrm * nrm.transpose());
        const int base = 3 * p.template_vertex;
        size_t slot = pair_base + static_cast<size_t>(i) * 9;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                trips[slot++] = Trip(base + r, base + c, block(r, c));
    }
#pragma omp parallel for schedule(static)
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        const double w2 = 2.0 * prob.weights.memb * edges[e].w * edges[e].w;
        const int bi = 3 * edges[e].i, bj = 3 * edges[e].j;
        size_t slot = edge_base + static_cast<size_t>(e) * 12;
        for (int c = 0; c < 3; ++c) {
            trips[slot++] = Trip(bi + c, bi + c, w2);
            trips[slot++] = Trip(bj + c, bj + c, w2);
            trips[slot++] = Trip(bi + c, bj + c, -w2);
            trips[slot++] = Trip(bj + c, bi + c, -w2);
        }
    }
    for (size_t l = 0; l < prob.landmarks.size(); ++l) {
        const int base = 3 * prob.landmarks[l].template_vertex;
        size_t slot = lm_base + l * 3;
        for (int c = 0; c < 3; ++c)
            trips[slot++] = Trip(base + c, base + c, prob.weights.ref);
    }

    Eigen::VectorXd b = Eigen::VectorXd::Zero(3 * n);
    for (const CorrespondencePair& p : prob.pairs) {
        const Vec3 e = prob.scan_points[p.scan_point] - prob.tpl->vertices[p.template_vertex];
        const Vec3& nrm = prob.scan_normals[p.scan_point];
        const Vec3 rhs = prob.weights.p2point * e +
                         prob.weights.p2plane * nrm.dot(e) * nrm;
        b.segment<3>(3 * p.template_vertex) += rhs;
    }
    for (const LandmarkPair& lm : prob.landmarks) {
        const Vec3 e = lm.scan_pos - prob.tpl->vertices[lm.template_vertex];
        b.segment<3>(3 * lm.template_vertex) += prob.weights.ref * e;
    }

    Eigen::SparseMatrix<double> A(3 * n, 3 * n);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw SingularSystem("sparse Cholesky factorization failed");
    Eigen::VectorXd x = solver.solve(b);
    if (solver.info() != Eigen::Success || !x.allFinite())
        throw SingularSystem("sparse solve produced no finite solution");

    const double bnorm = b.norm();
    const double resid = (A * x - b).norm();
    if (resid > 1e-10 * std::max(bnorm, 1.0))
        throw SingularSystem("normal equations are rank-deficient: relative residual " +
                             std::to_string(resid / std::max(bnorm, 1.0)));

    DisplacementField d(n);
    for (int i = 0; i < n; ++i)
        d[i] = x.segment<3>(3 * i);
    return d;
}

namespace {
double rms_step(std::span<const Vec3> a, std::span<const Vec3> b) {
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        sum += (a[i] - b[i]).squaredNorm();
    return std::sqrt(sum / static_cast<double>(a.size()));
}
} // namespace

RegistrationResult register_nonrigid(const TriangleMesh& tpl, const RangeScan& scan,
                                     std::span<const LandmarkPair> landmarks,
                                     const EnergyWeights& initial_weights,
                                     const ScheduleConfig& schedule,
                                     const PruneConfig& prune) {
    validate_weights(initial_weights);
    validate_schedule(schedule);
    validate_prune_config(prune);
    if (schedule.max_outer_iterations == 0)
        throw ConvergenceFailure("iteration cap is 0; no registration performed");

    TriangleMesh current = tpl; // rest pose stays in tpl
    if (!current.has_normals())
        compute_vertex_normals(current);

    std::vector<Vec3> scan_normals = scan.normals;
    if (scan_normals.size() != scan.points.size()) {
        if (!scan.has_grid())
            throw InvalidArgument("scan carries neither normals nor a grid to "
                                  "estimate them from");
        scan_normals = estimate_scan_normals(scan);
    }

    std::unique_ptr<KdTree> tree;
    if (!scan.has_grid())
        tree = std::make_unique<KdTree>(std::span<const Vec3>(scan.points));

    CotangentWeights cot = CotangentWeights::build(tpl);

    RegistrationResult result;
    DisplacementField d(tpl.vertices.size(), Vec3::Zero());
    EnergyWeights w = initial_weights;

    for (int it = 1; it <= schedule.max_outer_iterations; ++it) {
        std::vector<CorrespondencePair> matched =
            match_closest(current, scan, scan_normals, tree.get());
        std::vector<CorrespondencePair> kept;
        try {
            kept = prune_pairs(matched, prune);
        } catch (const AllPairsPruned& e) {
            throw AllPairsPruned("iteration " + std::to_string(it) + ": " + e.what());
        }

        EnergyProblem prob{&tpl, kept, landmarks, &cot,
                           scan.points, scan_normals, w};
        DisplacementField d_new = solve_displacement(prob);
        const double step = rms_step(d_new, d);
        d = std::move(d_new);

        for (size_t i = 0; i < tpl.vertices.size(); ++i)
            current.vertices[i] = tpl.vertices[i] + d[i];
        compute_vertex_normals(current);

        result.log.push_back({it, matched.size(), kept.size(),
                              energy_value(prob, d), step, w});

        const bool at_floors = w.memb <= schedule.min_memb && w.ref <= schedule.min_ref;
        if (step < schedule.converged_step_norm)
            break;
        if (step < schedule.step_norm_threshold) {
            if (at_floors)
                break;
            w.memb = std::max(schedule.min_memb, w.memb * schedule.decay_factor);
            w.ref = std::max(schedule.min_ref, w.ref * schedule.decay_factor);
        }
        if (it == schedule.max_outer_iterations)
            result.hit_iteration_cap = true;
    }

    result.deformed = tpl;
    for (size_t i = 0; i < tpl.vertices.size(); ++i)
        result.deformed.vertices[i] = tpl.vertices[i] + d[i];
    compute_vertex_normals(result.deformed);
    result.displacement = std::move(d);
    return result;
}

} // namespace maskfit

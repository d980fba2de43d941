#pragma once

#include "maskfit/core.hpp"
#include "maskfit/correspondence.hpp"
#include "maskfit/cotangent.hpp"
#include "maskfit/landmarks.hpp"
#include "maskfit/mesh.hpp"
#include "maskfit/scan.hpp"

namespace maskfit {

/// Per-template-vertex displacement, mm.
using DisplacementField = std::vector<Vec3>;

/// Weights of the four quadratic energy terms. At least one of p2point,
/// p2plane, ref must be strictly positive or the system loses its data
/// anchoring and becomes singular.
struct EnergyWeights {
    double p2point = 0.1;
    double p2plane = 1.0;
    double memb = 100.0;
    double ref = 10.0;
};
void validate_weights(const EnergyWeights& w);

struct ScheduleConfig {
    double step_norm_threshold = 1e-2; // mm, RMS displacement change per iteration
    double decay_factor = 0.5;         // applied to memb and ref on trigger
    int max_outer_iterations = 30;
    double min_memb = 1e-3;
    double min_ref = 1e-3;
    // A step this small means the solution stopped moving entirely; the run
    // terminates without waiting for the weight floors.
    double converged_step_norm = 1e-8;
};
void validate_schedule(const ScheduleConfig& cfg);

/// Everything the quadratic energy needs besides the displacement field.
/// Geometry references must outlive the view.
struct EnergyProblem {
    const TriangleMesh* tpl = nullptr;                 // rest-pose template
    std::span<const CorrespondencePair> pairs;         // pruned
    std::span<const LandmarkPair> landmarks;           // template_vertex bound
    const CotangentWeights* cot = nullptr;
    std::span<const Vec3> scan_points;
    std::span<const Vec3> scan_normals;
    EnergyWeights weights;
};

struct EnergyTerms {
    double p2point = 0, p2plane = 0, memb = 0, ref = 0;
    double total() const;
};

/// Evaluates the four energy terms at displacement d (unweighted values are
/// in the struct, total() applies the weights).
EnergyTerms energy_terms(const EnergyProblem& prob, std::span<const Vec3> d);
double energy_value(const EnergyProblem& prob, std::span<const Vec3> d);

namespace serial {
double energy_value(const EnergyProblem& prob, std::span<const Vec3> d);
} // namespace serial

/// Analytic gradient of the weighted energy at d.
DisplacementField energy_gradient(const EnergyProblem& prob, std::span<const Vec3> d);

/// Exact minimizer of the quadratic energy: assembles the sparse normal
/// equations over the 3n displacement unknowns and solves them with a sparse
/// Cholesky factorization, verified to relative residual < 1e-10.
/// Throws SingularSystem when the normal matrix is rank-deficient.
DisplacementField solve_displacement(const EnergyProblem& prob);

struct IterationRecord {
    int iteration = 0;         // 1-based
    size_t pairs_matched = 0;
    size_t pairs_kept = 0;
    double energy = 0.0;
    double step_norm = 0.0;    // mm, RMS over vertices
    EnergyWeights weights;
};

struct RegistrationResult {
    TriangleMesh deformed;         // rest vertices + displacement, exactly
    DisplacementField displacement;
    std::vector<IterationRecord> log;
    bool hit_iteration_cap = false;
};

/// Iterative closest point loop: match, prune, solve for the total
/// displacement field, then decay the smoothness and landmark weights by
/// decay_factor whenever the RMS step falls below the threshold. Terminates
/// when both weights sit at their floors and the step is below threshold,
/// when the field stops moving, or at the iteration cap.
///
/// The template must already carry the similarity pre-alignment. Scan
/// normals are estimated from the grid when not supplied.
RegistrationResult register_nonrigid(const TriangleMesh& tpl, const RangeScan& scan,
                                     std::span<const LandmarkPair> landmarks,
                                     const EnergyWeights& initial_weights,
                                     const ScheduleConfig& schedule,
                                     const PruneConfig& prune);

} // namespace maskfit

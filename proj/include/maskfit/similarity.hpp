#pragma once

#include "maskfit/core.hpp"
#include "maskfit/landmarks.hpp"

namespace maskfit {

/// Uniform scale + rotation + translation, applied as p -> scale*R*p + t.
struct SimilarityTransform {
    double scale = 1.0;
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// Checks scale > 0, R orthonormal within 1e-9 and det(R) > 0.
void validate_transform(const SimilarityTransform& T);

struct AlignmentReport {
    int iterations = 0;
    double final_rms = 0.0;            // mm
    std::vector<double> rms_history;   // non-increasing
};

/// Closed-form least-squares scale from pairwise distances:
/// alpha = sum d_t*d_s / sum d_t^2 over unordered landmark pairs.
double estimate_initial_scale(std::span<const LandmarkPair> pairs);

/// Orthogonal Procrustes step: the exact (R, t) minimizer of
/// sum ||alpha*R*p_i + t - q_i||^2 for fixed alpha, reflection-corrected.
/// Throws DegenerateConfiguration for collinear template landmarks.
std::pair<Mat3, Vec3> fit_rigid_given_scale(std::span<const LandmarkPair> pairs,
                                            double alpha);

/// Closed-form scale step for fixed (R, t):
/// alpha = sum (R p_i).(q_i - t) / sum ||R p_i||^2.
double fit_scale_given_rigid(std::span<const LandmarkPair> pairs,
                             const Mat3& R, const Vec3& t);

struct AlignOptions {
    int max_iterations = 50;
    double rms_change_tolerance = 1e-8; // mm
};

/// Alternating minimization over (R, t) and alpha, initialized by the
/// pairwise-distance scale estimate. The landmark RMS residual is recorded
/// after every iteration and never increases.
std::pair<SimilarityTransform, AlignmentReport>
align_similarity(std::span<const LandmarkPair> pairs, const AlignOptions& opts = {});

} // namespace maskfit

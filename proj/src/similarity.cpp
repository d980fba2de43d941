#include "maskfit/similarity.hpp"
#include "maskfit/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace maskfit {

void validate_transform(const SimilarityTransform& T) {
    if (!(T.scale > 0.0))
        throw InvalidArgument("similarity scale must be positive");
    const Mat3 err = T.rotation.transpose() * T.rotation - Mat3::Identity();
    if (err.cwiseAbs().maxCoeff() >= 1e-9)
        throw InvalidArgument("rotation is not orthonormal within 1e-9");
    if (T.rotation.determinant() <= 0.0)
        throw InvalidArgument("rotation has non-positive determinant");
}

double estimate_initial_scale(std::span<const LandmarkPair> pairs) {
    if (pairs.size() < 2)
        throw InvalidArgument("need at least 2 landmark pairs to estimate scale");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < pairs.size(); ++i) {
        for (size_t j = i + 1; j < pairs.size(); ++j) {
            const double dt = (pairs[i].template_pos - pairs[j].template_pos).norm();
            const double ds = (pairs[i].scan_pos - pairs[j].scan_pos).norm();
            num += dt * ds;
            den += dt * dt;
        }
    }
    if (den < 1e-12)
        throw DegenerateScale("template landmarks are coincident");
    if (num <= 0.0)
        throw DegenerateScale("scan landmarks are coincident");
    return num / den;
}

std::pair<Mat3, Vec3> fit_rigid_given_scale(std::span<const LandmarkPair> pairs,
                                            double alpha) {
    if (pairs.size() < 3)
        throw InvalidArgument("need at least 3 landmark pairs for a rigid fit");

    Vec3 ct = Vec3::Zero(), cs = Vec3::Zero();
    for (const LandmarkPair& p : pairs) {
        ct += p.template_pos;
        cs += p.scan_pos;
    }
    ct /= static_cast<double>(pairs.size());
    cs /= static_cast<double>(pairs.size());

    Mat3 cov = Mat3::Zero();       // template-to-scan covariance
    Mat3 spread = Mat3::Zero();    // template scatter, for the collinearity check
    for (const LandmarkPair& p : pairs) {
        const Vec3 dt = p.template_pos - ct;
        cov += dt * (p.scan_pos - cs).transpose();
        spread += dt * dt.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Mat3> es(spread);
    const Vec3 ev = es.eigenvalues(); // ascending
    if (ev[1] <= 1e-9 * std::max(ev[2], 1e-30))
        throw DegenerateConfiguration("landmarks are collinear; rotation about the "
                                      "line is unobservable");

    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 D = Mat3::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0)
        D(2, 2) = -1.0;
    const Mat3 R = svd.matrixV() * D * svd.matrixU().transpose();
    const Vec3 t = cs - alpha * (R * ct);
    return {R, t};
}

double fit_scale_given_rigid(std::span<const LandmarkPair> pairs,
                             const Mat3& R, const Vec3& t) {
    if (pairs.empty())
        throw InvalidArgument("need at least 1 landmark pair");
    double num = 0.0, den = 0.0;
    for (const LandmarkPair& p : pairs) {
        const Vec3 rp = R * p.template_pos;
        num += rp.dot(p.scan_pos - t);
        den += rp.squaredNorm();
    }
    if (den < 1e-12)
        throw DegenerateScale("template landmarks collapse to the origin");
    const double alpha = num / den;
    if (alpha <= 0.0)
        throw DegenerateScale("least-squares scale is non-positive");
    return alpha;
}

namespace {
double rms_residual(std::span<const LandmarkPair> pairs, const SimilarityTransform& T) {
    double sum = 0.0;
    for (const LandmarkPair& p : pairs)
        sum += (T.apply(p.template_pos) - p.scan_pos).squaredNorm();
    return std::sqrt(sum / static_cast<double>(pairs.size()));
}
} // namespace

std::pair<SimilarityTransform, AlignmentReport>
align_similarity(std::span<const LandmarkPair> pairs, const AlignOptions& opts) {
    SimilarityTransform T;
    T.scale = estimate_initial_scale(pairs);

    AlignmentReport report;
    double prev_rms = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iterations; ++it) {
        auto [R, t] = fit_rigid_given_scale(pairs, T.scale);
        T.rotation = R;
        T.translation = t;
        T.scale = fit_scale_given_rigid(pairs, R, t);

        const double rms = rms_residual(pairs, T);
        report.rms_history.push_back(rms);
        report.iterations = it + 1;
        if (rms < 1e-12 || std::abs(prev_rms - rms) < opts.rms_change_tolerance)
            break;
        prev_rms = rms;
    }
    report.final_rms = report.rms_history.back();
    return {T, report};
}

} // namespace maskfit

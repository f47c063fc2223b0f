#include "wristview/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "wristview/errors.hpp"
#include "wristview/parallel.hpp"
#include "wristview/rng.hpp"

namespace wristview {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr double kShrink = 0.5;
constexpr int kMaxBacktracks = 80;
constexpr double kStepMax = 1e8;
constexpr double kStepMin = 1e-12;

PoseSE3 retract(const Twist6& t, const PoseSE3& base) {
    PoseSE3 next = compose(se3_exp(t), base);
    next.rotation = orthonormalize(next.rotation);
    return next;
}

double loss_or_inf(const std::vector<Track>& tracks, const PoseSE3& pose,
                   const Intrinsics& K, const SpcConfig& cfg, SpcBreakdown& out) {
    try {
        out = spc_loss(tracks, pose, K, cfg);
    } catch (const AllSkipped&) {
        return std::numeric_limits<double>::infinity();
    }
    return out.l_proj;
}

} // namespace

PoseSE3 linear_init(const std::vector<Track>& tracks, const Intrinsics& K) {
    const std::size_t n = tracks.size();
    if (n < 6) {
        throw DegenerateConfiguration("linear_init needs at least 6 tracks, got " +
                                      std::to_string(n));
    }

    // Hartley-style conditioning of the 3D points
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const Track& t : tracks) centroid += t.point;
    centroid /= static_cast<double>(n);
    double mean_dist = 0.0;
    for (const Track& t : tracks) mean_dist += (t.point - centroid).norm();
    mean_dist /= static_cast<double>(n);
    const double scale = mean_dist > 0.0 ? mean_dist / std::sqrt(3.0) : 1.0;

    Eigen::MatrixXd a(2 * n, 12);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d xp = (tracks[i].point - centroid) / scale;
        const double x = (tracks[i].wrist_pixel.u - K.cx) / K.fx;
        const double y = (tracks[i].wrist_pixel.v - K.cy) / K.fy;
        Eigen::Matrix<double, 1, 4> xt;
        xt << xp.x(), xp.y(), xp.z(), 1.0;
        a.row(2 * i).setZero();
        a.row(2 * i).segment<4>(0) = xt;
        a.row(2 * i).segment<4>(8) = -x * xt;
        a.row(2 * i + 1).setZero();
        a.row(2 * i + 1).segment<4>(4) = xt;
        a.row(2 * i + 1).segment<4>(8) = -y * xt;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(10) < 1e-8 * sv(0)) {
        throw DegenerateConfiguration(
            "rank-deficient design matrix (relative singular value " +
            std::to_string(sv(10) / sv(0)) + ")");
    }
    Eigen::VectorXd v = svd.matrixV().col(11);

    Eigen::Matrix3d r_est;
    r_est << v(0), v(1), v(2),
             v(4), v(5), v(6),
             v(8), v(9), v(10);
    Eigen::Vector3d t_est(v(3), v(7), v(11));

    // the null vector's global sign is arbitrary; pick the one with
    // mostly-positive depths
    double depth_sum = 0.0;
    for (const Track& t : tracks) {
        const Eigen::Vector3d xp = (t.point - centroid) / scale;
        depth_sum += r_est.row(2).dot(xp) + t_est.z();
    }
    if (depth_sum < 0.0) {
        r_est = -r_est;
        t_est = -t_est;
    }

    Eigen::JacobiSVD<Eigen::Matrix3d> rsvd(r_est, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double sigma_sum = rsvd.singularValues().sum();
    if (sigma_sum <= 0.0) {
        throw DegenerateConfiguration("zero rotation block in DLT solution");
    }

    PoseSE3 pose;
    pose.rotation = orthonormalize(r_est);
    const Eigen::Vector3d t_scaled = (3.0 / sigma_sum) * t_est;
    pose.translation = scale * t_scaled - pose.rotation * centroid;
    return pose;
}

PoseEstimate solve_wrist_pose(const std::vector<Track>& tracks, const Intrinsics& K,
                              const SpcConfig& spc_cfg, const SolverConfig& solver_cfg,
                              const PoseSE3& init, std::vector<SolverStep>* trace) {
    if (tracks.empty()) throw NumericalError("solve_wrist_pose: no tracks");
    if (!init.valid(1e-6)) throw NumericalError("solve_wrist_pose: invalid initial pose");

    PoseEstimate best;
    best.pose = init;
    best.final_loss = spc_loss(tracks, init, K, spc_cfg); // AllSkipped propagates
    if (!std::isfinite(best.final_loss.l_proj)) {
        throw NonFinite("initial loss is not finite");
    }

    // cloud scale bounds normal trial steps so descent cannot hop basins
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const Track& t : tracks) centroid += t.point;
    centroid /= static_cast<double>(tracks.size());
    double cloud_radius = 0.0;
    for (const Track& t : tracks) {
        cloud_radius = std::max(cloud_radius, (t.point - centroid).norm());
    }
    if (cloud_radius == 0.0) cloud_radius = 1.0;

    PoseSE3 pose = init;
    SpcBreakdown f = best.final_loss;
    Eigen::Matrix<double, 6, 1> prev_g = Eigen::Matrix<double, 6, 1>::Zero();
    Eigen::Matrix<double, 6, 1> prev_s = Eigen::Matrix<double, 6, 1>::Zero();
    double prev_alpha = solver_cfg.initial_step;
    bool have_prev = false;
    int small_decrease_streak = 0;

    PoseEstimate result;
    result.pose = pose;
    result.final_loss = f;
    if (trace) trace->push_back({pose, f});

    for (int iter = 0; iter < solver_cfg.max_iterations; ++iter) {
        const Twist6 grad = spc_gradient(tracks, pose, K, spc_cfg);
        if (!grad.finite()) throw NonFinite("gradient is not finite");
        const Eigen::Matrix<double, 6, 1> g = grad.vec();
        const double gnorm2 = g.squaredNorm();
        if (gnorm2 == 0.0) {
            result.converged = true;
            break;
        }

        // Barzilai-Borwein trial step; falls back to growing the last
        // accepted step when the curvature estimate is unusable.
        double alpha = solver_cfg.initial_step;
        if (have_prev) {
            const Eigen::Matrix<double, 6, 1> y = g - prev_g;
            const double sy = prev_s.dot(y);
            alpha = sy > 0.0 ? prev_s.squaredNorm() / sy : prev_alpha * 2.0;
        }
        if (f.n_front == 0) {
            // Nothing projects in front, so the loss is the bare depth
            // drive: monotone along the descent ray until the cloud crosses
            // the image plane, where reprojection blows up. Backtracking
            // from the largest step finds the far side of that wall; small
            // steps would park the cloud against it.
            alpha = kStepMax;
        } else {
            alpha = std::min(alpha, cloud_radius / std::sqrt(gnorm2));
        }
        alpha = std::clamp(alpha, kStepMin, kStepMax);

        bool accepted = false;
        PoseSE3 cand;
        SpcBreakdown f_cand;
        double alpha_used = alpha;
        if (solver_cfg.line_search == LineSearch::fixed) {
            alpha_used = solver_cfg.initial_step;
            cand = retract(Twist6::from_vec(-alpha_used * g), pose);
            f_cand = spc_loss(tracks, cand, K, spc_cfg);
            accepted = true;
        } else {
            for (int k = 0; k < kMaxBacktracks; ++k) {
                cand = retract(Twist6::from_vec(-alpha_used * g), pose);
                SpcBreakdown fb;
                const double lp = loss_or_inf(tracks, cand, K, spc_cfg, fb);
                if (lp <= f.l_proj - kArmijoC * alpha_used * gnorm2) {
                    f_cand = fb;
                    accepted = true;
                    break;
                }
                alpha_used *= kShrink;
                if (alpha_used < kStepMin) break;
            }
        }
        if (!accepted) {
            // no descending step left at this resolution
            result.converged = true;
            break;
        }
        if (!std::isfinite(f_cand.l_proj)) throw NonFinite("loss is not finite");

        const double decrease = f.l_proj - f_cand.l_proj;
        prev_s = -alpha_used * g;
        prev_g = g;
        prev_alpha = alpha_used;
        have_prev = true;
        pose = cand;
        f = f_cand;
        result.iterations = iter + 1;
        if (trace) trace->push_back({pose, f});

        if (f.l_proj < result.final_loss.l_proj ||
            (solver_cfg.line_search == LineSearch::fixed &&
             f.l_proj <= result.final_loss.l_proj)) {
            result.pose = pose;
            result.final_loss = f;
        }

        const double step_norm = alpha_used * std::sqrt(gnorm2);
        if (step_norm < solver_cfg.step_tolerance) {
            result.converged = true;
            break;
        }
        const double rel = decrease / std::max(std::abs(f.l_proj) + decrease, 1e-300);
        if (rel < solver_cfg.loss_tolerance) {
            if (++small_decrease_streak >= 3) {
                result.converged = true;
                break;
            }
        } else {
            small_decrease_streak = 0;
        }
    }
    return result;
}

PoseEstimate multi_start(const std::vector<Track>& tracks, const Intrinsics& K,
                         const SpcConfig& spc_cfg, const SolverConfig& solver_cfg,
                         int threads) {
    if (solver_cfg.n_starts < 1) throw NumericalError("multi_start: n_starts must be >= 1");
    if (tracks.empty()) throw NumericalError("multi_start: no tracks");

    // cloud statistics for the random-start translation ball
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const Track& t : tracks) centroid += t.point;
    centroid /= static_cast<double>(tracks.size());
    double radius = 0.0;
    for (const Track& t : tracks) radius = std::max(radius, (t.point - centroid).norm());
    if (radius == 0.0) radius = 1.0;

    // all starts are drawn up front so parallel execution cannot change them
    std::vector<PoseSE3> inits;
    std::vector<int> start_indices;
    std::string dlt_failure;
    try {
        inits.push_back(linear_init(tracks, K));
        start_indices.push_back(0);
    } catch (const DegenerateConfiguration& e) {
        dlt_failure = e.what();
    }
    Rng rng(solver_cfg.seed, "multi_start");
    for (int i = 1; i < solver_cfg.n_starts; ++i) {
        PoseSE3 p;
        p.rotation = rng.rotation();
        const Eigen::Vector3d cam_center = centroid + 1.5 * radius * rng.in_unit_ball();
        p.translation = -(p.rotation * cam_center);
        inits.push_back(p);
        start_indices.push_back(i);
    }
    if (inits.empty()) {
        throw DegenerateConfiguration("multi_start: no usable start (" + dlt_failure + ")");
    }

    std::vector<PoseEstimate> results(inits.size());
    std::vector<std::string> failures(inits.size());
    parallel_for(inits.size(), threads, [&](std::size_t i) {
        try {
            results[i] = solve_wrist_pose(tracks, K, spc_cfg, solver_cfg, inits[i]);
            results[i].start_index = start_indices[i];
        } catch (const Error& e) {
            failures[i] = e.what();
            results[i].final_loss.l_proj = std::numeric_limits<double>::infinity();
            results[i].start_index = start_indices[i];
        }
    });

    const PoseEstimate* best = nullptr;
    for (const PoseEstimate& r : results) {
        if (!std::isfinite(r.final_loss.l_proj)) continue;
        if (best == nullptr || r.final_loss.l_proj < best->final_loss.l_proj) best = &r;
    }
    if (best == nullptr) {
        std::string msg = "multi_start: every start failed:";
        if (!dlt_failure.empty()) msg += " [dlt] " + dlt_failure;
        for (std::size_t i = 0; i < failures.size(); ++i) {
            if (!failures[i].empty()) {
                msg += " [start " + std::to_string(start_indices[i]) + "] " + failures[i];
            }
        }
        throw NumericalError(msg);
    }
    return *best;
}

} // namespace wristview

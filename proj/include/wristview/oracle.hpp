#pragma once

#include <cstdint>
#include <vector>

#include "wristview/geometry.hpp"
#include "wristview/spc.hpp"

namespace wristview {

enum class SceneKind { box_room, random_blobs, planar };
enum class TrajectoryKind { arc, spline, static_pose };

struct SceneParams {
    int n_points = 5000;
    SceneKind scene_kind = SceneKind::box_room;
    int n_anchors = 2;
    int trajectory_frames = 16;
    TrajectoryKind trajectory_kind = TrajectoryKind::arc;
    double pixel_noise_sigma = 0.0;
    double outlier_rate = 0.0;
    std::uint64_t seed = 0;
};

// Ground-truth bundle: a colored cloud in a unit room, anchor cameras 2-3
// units out looking in, and a wrist trajectory inside the room.
struct SyntheticScene {
    std::vector<Point3> cloud;
    std::vector<PoseSE3> anchor_poses;
    Intrinsics anchor_intrinsics;
    std::vector<PoseSE3> wrist_trajectory;
    Intrinsics wrist_intrinsics;
};

// Deterministic in params.seed; same seed, same scene, bit for bit.
// Throws InfeasibleScene if an anchor cannot reach 50% front-facing
// coverage of the cloud in 100 placement attempts.
SyntheticScene generate_scene(const SceneParams& params);

// World-to-camera pose looking from `eye` toward `target` (+z forward,
// image y down, z-up world).
PoseSE3 look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target);

// Index of the cloud point winning each anchor pixel under a radius-0
// z-buffer, -1 where empty. Defines anchor-side visibility: a point is
// matchable only where it is the visible surface.
std::vector<std::int32_t> anchor_winner_map(const SyntheticScene& scene, int anchor_index);

// Dense per-pixel point map for one anchor, built from the winner map.
AnchorPointMap make_anchor_point_map(const SyntheticScene& scene, int anchor_index);

struct CorrespondenceSet {
    std::vector<Correspondence2D2D> correspondences;
    std::vector<Track> tracks; // exact 3D points, observed (possibly noisy) wrist pixels
    PoseSE3 ground_truth;
    int frame_index = 0;
};

// Samples m points visible in the wrist frustum and on a visible anchor
// surface. Wrist pixels are exact projections plus Gaussian pixel noise;
// round(outlier_rate*m) of them (seed-fixed choice) are replaced by uniform
// random pixels. Throws InfeasibleScene when fewer than 6 co-visible points
// exist.
CorrespondenceSet generate_correspondences(const SyntheticScene& scene, int frame_index,
                                           const SceneParams& params, int m);

struct GridSample {
    Twist6 tangent;
    double l_proj = 0.0;
};

// Evaluates spc_loss on a regular steps^6 tangent grid of half-width
// `extent` around `center`. Samples where every track is skipped carry
// l_proj = +inf. Throws GridTooLarge when steps^6 > 1e7.
std::vector<GridSample> brute_force_pose_grid(const std::vector<Track>& tracks,
                                              const Intrinsics& K, const SpcConfig& spc_cfg,
                                              const PoseSE3& center, double extent, int steps);

} // namespace wristview

#include "wristview/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wristview/errors.hpp"
#include "wristview/rng.hpp"

namespace wristview {

namespace {

// room interior spans [-kRoomHalf, kRoomHalf]^3
constexpr double kRoomHalf = 0.5;
constexpr double kWristOrbitRadius = 0.42;
constexpr double kWristHeight = 0.12;

int round_half_up(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

Eigen::Vector3d quantized_color(Rng& rng) {
    // colors on the 1/255 lattice so PLY round-trips reproduce them exactly
    return Eigen::Vector3d(static_cast<double>(rng.uniform_index(256)) / 255.0,
                           static_cast<double>(rng.uniform_index(256)) / 255.0,
                           static_cast<double>(rng.uniform_index(256)) / 255.0);
}

Point3 sample_surface_point(SceneKind kind, Rng& rng) {
    Eigen::Vector3d p;
    if (kind == SceneKind::planar) {
        p = {rng.uniform(-kRoomHalf, kRoomHalf), rng.uniform(-kRoomHalf, kRoomHalf), -0.2};
    } else {
        // box_room: uniform over the six inner faces
        const std::uint64_t face = rng.uniform_index(6);
        const double a = rng.uniform(-kRoomHalf, kRoomHalf);
        const double b = rng.uniform(-kRoomHalf, kRoomHalf);
        const double s = (face & 1) ? kRoomHalf : -kRoomHalf;
        switch (face / 2) {
            case 0: p = {s, a, b}; break;
            case 1: p = {a, s, b}; break;
            default: p = {a, b, s}; break;
        }
    }
    return Point3(p, quantized_color(rng));
}

bool visible_in(const Intrinsics& K, const PoseSE3& pose, const Eigen::Vector3d& p) {
    const Projection pr = project(K, pose, p);
    return pr.pixel_valid && pr.depth > kZEps && pr.pixel.u >= 0.0 &&
           pr.pixel.u <= K.width - 1.0 && pr.pixel.v >= 0.0 && pr.pixel.v <= K.height - 1.0;
}

double front_fraction(const std::vector<Point3>& cloud, const PoseSE3& pose) {
    std::size_t front = 0;
    for (const Point3& pt : cloud) {
        if (transform_to_camera(pose, pt.pos).z() > kZEps) ++front;
    }
    return cloud.empty() ? 0.0 : static_cast<double>(front) / cloud.size();
}

// Catmull-Rom with doubled endpoints; interpolates matrix entries and
// positions, caller re-orthonormalizes rotations.
template <typename T>
T catmull_rom(const T& p0, const T& p1, const T& p2, const T& p3, double t) {
    const double t2 = t * t, t3 = t2 * t;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

} // namespace

PoseSE3 look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
    Eigen::Vector3d forward = target - eye;
    const double n = forward.norm();
    forward = n > 1e-12 ? Eigen::Vector3d(forward / n) : Eigen::Vector3d(0, 0, -1);
    Eigen::Vector3d up_hint(0, 0, 1);
    if (std::abs(forward.dot(up_hint)) > 1.0 - 1e-6) up_hint = Eigen::Vector3d(1, 0, 0);
    const Eigen::Vector3d right = forward.cross(up_hint).normalized();
    const Eigen::Vector3d down = forward.cross(right);
    PoseSE3 pose;
    pose.rotation.row(0) = right;
    pose.rotation.row(1) = down;
    pose.rotation.row(2) = forward;
    pose.translation = -(pose.rotation * eye);
    return pose;
}

SyntheticScene generate_scene(const SceneParams& params) {
    if (params.n_points < 1 || params.n_anchors < 1 || params.trajectory_frames < 1) {
        throw InputError("generate_scene: n_points, n_anchors, trajectory_frames must be >= 1");
    }

    SyntheticScene scene;
    scene.anchor_intrinsics = {500.0, 500.0, 319.5, 239.5, 640, 480};
    scene.wrist_intrinsics = {600.0, 600.0, 319.5, 239.5, 640, 480};

    Rng cloud_rng(params.seed, "cloud");
    scene.cloud.reserve(params.n_points);
    if (params.scene_kind == SceneKind::random_blobs) {
        constexpr int kBlobs = 5;
        Eigen::Vector3d centers[kBlobs];
        for (auto& c : centers) {
            c = Eigen::Vector3d(cloud_rng.uniform(-0.35, 0.35), cloud_rng.uniform(-0.35, 0.35),
                                cloud_rng.uniform(-0.35, 0.35));
        }
        for (int i = 0; i < params.n_points; ++i) {
            const Eigen::Vector3d offset = 0.08 * cloud_rng.normal3();
            scene.cloud.emplace_back(centers[i % kBlobs] + offset, quantized_color(cloud_rng));
        }
    } else {
        for (int i = 0; i < params.n_points; ++i) {
            scene.cloud.push_back(sample_surface_point(params.scene_kind, cloud_rng));
        }
    }

    // anchors on a ring 2-3 units out, rejection-sampled against the
    // visibility invariant
    Rng anchor_rng(params.seed, "anchors");
    const double two_pi = 6.283185307179586476925286766559;
    for (int i = 0; i < params.n_anchors; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
            const double azimuth =
                two_pi * (static_cast<double>(i) / params.n_anchors) + anchor_rng.uniform(-0.3, 0.3);
            const double elevation = anchor_rng.uniform(0.15, 0.6);
            const double dist = anchor_rng.uniform(2.0, 3.0);
            const Eigen::Vector3d eye(dist * std::cos(elevation) * std::cos(azimuth),
                                      dist * std::cos(elevation) * std::sin(azimuth),
                                      dist * std::sin(elevation));
            const PoseSE3 pose = look_at(eye, Eigen::Vector3d::Zero());
            if (front_fraction(scene.cloud, pose) >= 0.5) {
                scene.anchor_poses.push_back(pose);
                placed = true;
            }
        }
        if (!placed) {
            throw InfeasibleScene("anchor " + std::to_string(i) +
                                  ": could not reach 50% front-facing coverage in 100 attempts");
        }
    }

    Rng traj_rng(params.seed, "trajectory");
    const int frames = params.trajectory_frames;
    switch (params.trajectory_kind) {
        case TrajectoryKind::static_pose: {
            const double azimuth = traj_rng.uniform(0.0, two_pi);
            const Eigen::Vector3d eye(kWristOrbitRadius * std::cos(azimuth),
                                      kWristOrbitRadius * std::sin(azimuth), kWristHeight);
            const PoseSE3 pose = look_at(eye, Eigen::Vector3d::Zero());
            scene.wrist_trajectory.assign(frames, pose);
            break;
        }
        case TrajectoryKind::arc: {
            const double start = traj_rng.uniform(0.0, two_pi);
            const double span = two_pi / 6.0; // 60 degrees at constant speed
            for (int t = 0; t < frames; ++t) {
                const double theta =
                    frames == 1 ? start : start + span * static_cast<double>(t) / (frames - 1);
                const Eigen::Vector3d eye(kWristOrbitRadius * std::cos(theta),
                                          kWristOrbitRadius * std::sin(theta), kWristHeight);
                scene.wrist_trajectory.push_back(look_at(eye, Eigen::Vector3d::Zero()));
            }
            break;
        }
        case TrajectoryKind::spline: {
            constexpr int kKeys = 4;
            Eigen::Vector3d key_pos[kKeys];
            Eigen::Matrix3d key_rot[kKeys];
            for (int k = 0; k < kKeys; ++k) {
                key_pos[k] = Eigen::Vector3d(traj_rng.uniform(-0.3, 0.3),
                                             traj_rng.uniform(-0.3, 0.3),
                                             traj_rng.uniform(0.0, 0.25));
                key_rot[k] = look_at(key_pos[k], Eigen::Vector3d::Zero()).rotation;
            }
            for (int t = 0; t < frames; ++t) {
                const double s = frames == 1 ? 0.0
                                             : static_cast<double>(t) / (frames - 1) * (kKeys - 1);
                int seg = std::min(static_cast<int>(s), kKeys - 2);
                const double u = s - seg;
                const auto at = [&](int k) { return std::clamp(k, 0, kKeys - 1); };
                const Eigen::Vector3d pos =
                    catmull_rom(key_pos[at(seg - 1)], key_pos[at(seg)], key_pos[at(seg + 1)],
                                key_pos[at(seg + 2)], u);
                const Eigen::Matrix3d raw =
                    catmull_rom(key_rot[at(seg - 1)], key_rot[at(seg)], key_rot[at(seg + 1)],
                                key_rot[at(seg + 2)], u);
                PoseSE3 pose;
                pose.rotation = orthonormalize(raw);
                pose.translation = -(pose.rotation * pos);
                scene.wrist_trajectory.push_back(pose);
            }
            break;
        }
    }
    return scene;
}

std::vector<std::int32_t> anchor_winner_map(const SyntheticScene& scene, int anchor_index) {
    const Intrinsics& K = scene.anchor_intrinsics;
    const PoseSE3& pose = scene.anchor_poses.at(anchor_index);
    std::vector<std::int32_t> winner(static_cast<std::size_t>(K.width) * K.height, -1);
    std::vector<float> depth(winner.size(), 0.0f);
    for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
        const Projection pr = project(K, pose, scene.cloud[i].pos);
        if (!pr.pixel_valid || pr.depth <= kZEps) continue;
        const int u = round_half_up(pr.pixel.u);
        const int v = round_half_up(pr.pixel.v);
        if (u < 0 || u >= K.width || v < 0 || v >= K.height) continue;
        const std::size_t px = static_cast<std::size_t>(v) * K.width + u;
        const float z = static_cast<float>(pr.depth);
        if (winner[px] >= 0 && !(z < depth[px] - 1e-9)) continue;
        winner[px] = static_cast<std::int32_t>(i);
        depth[px] = z;
    }
    return winner;
}

AnchorPointMap make_anchor_point_map(const SyntheticScene& scene, int anchor_index) {
    const std::vector<std::int32_t> winner = anchor_winner_map(scene, anchor_index);
    const Intrinsics& K = scene.anchor_intrinsics;
    AnchorPointMap map;
    map.resize(K.width, K.height);
    for (std::size_t px = 0; px < winner.size(); ++px) {
        if (winner[px] < 0) continue;
        map.points[px] = scene.cloud[winner[px]].pos;
        map.valid[px] = 1;
    }
    return map;
}

CorrespondenceSet generate_correspondences(const SyntheticScene& scene, int frame_index,
                                           const SceneParams& params, int m) {
    if (frame_index < 0 ||
        static_cast<std::size_t>(frame_index) >= scene.wrist_trajectory.size()) {
        throw InputError("generate_correspondences: frame_index out of range");
    }
    if (m < 1) throw InputError("generate_correspondences: m must be >= 1");

    const PoseSE3& gt = scene.wrist_trajectory[frame_index];
    const Intrinsics& wristK = scene.wrist_intrinsics;
    const Intrinsics& anchorK = scene.anchor_intrinsics;

    // anchor-side visibility: the point must be the visible surface sample
    // at its own pixel in at least one anchor
    std::vector<std::int32_t> anchor_of(scene.cloud.size(), -1);
    for (std::size_t a = 0; a < scene.anchor_poses.size(); ++a) {
        const std::vector<std::int32_t> winner = anchor_winner_map(scene, static_cast<int>(a));
        for (const std::int32_t idx : winner) {
            if (idx >= 0 && anchor_of[idx] < 0) anchor_of[idx] = static_cast<std::int32_t>(a);
        }
    }

    std::vector<std::uint32_t> candidates;
    for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
        if (anchor_of[i] < 0) continue;
        if (visible_in(wristK, gt, scene.cloud[i].pos)) {
            candidates.push_back(static_cast<std::uint32_t>(i));
        }
    }
    if (candidates.size() < 6) {
        throw InfeasibleScene("frame " + std::to_string(frame_index) + ": only " +
                              std::to_string(candidates.size()) + " co-visible points");
    }

    Rng rng(params.seed, "correspondences/" + std::to_string(frame_index));
    std::vector<std::uint32_t> chosen;
    chosen.reserve(m);
    if (static_cast<std::size_t>(m) <= candidates.size()) {
        rng.partial_shuffle(candidates, m);
        chosen.assign(candidates.begin(), candidates.begin() + m);
    } else {
        for (int j = 0; j < m; ++j) {
            chosen.push_back(candidates[rng.uniform_index(candidates.size())]);
        }
    }

    CorrespondenceSet out;
    out.ground_truth = gt;
    out.frame_index = frame_index;
    out.correspondences.reserve(m);
    out.tracks.reserve(m);
    for (const std::uint32_t idx : chosen) {
        const Eigen::Vector3d& p = scene.cloud[idx].pos;
        const Projection wrist_proj = project(wristK, gt, p);
        Pixel wrist_px = wrist_proj.pixel;
        wrist_px.u += params.pixel_noise_sigma * rng.normal();
        wrist_px.v += params.pixel_noise_sigma * rng.normal();

        const int anchor = anchor_of[idx];
        const Projection anchor_proj = project(anchorK, scene.anchor_poses[anchor], p);

        Correspondence2D2D c;
        c.anchor_view_index = anchor;
        c.anchor_pixel = anchor_proj.pixel;
        c.wrist_pixel = wrist_px;
        out.correspondences.push_back(c);

        Track t;
        t.point = p;
        t.wrist_pixel = wrist_px;
        out.tracks.push_back(t);
    }

    // outliers: seed-fixed selection, exact count
    const int n_outliers = static_cast<int>(std::floor(params.outlier_rate * m + 0.5));
    if (n_outliers > 0) {
        std::vector<std::uint32_t> order(m);
        std::iota(order.begin(), order.end(), 0);
        rng.partial_shuffle(order, n_outliers);
        for (int j = 0; j < n_outliers; ++j) {
            Pixel junk{rng.uniform(0.0, wristK.width - 1.0), rng.uniform(0.0, wristK.height - 1.0)};
            out.correspondences[order[j]].wrist_pixel = junk;
            out.tracks[order[j]].wrist_pixel = junk;
        }
    }
    return out;
}

std::vector<GridSample> brute_force_pose_grid(const std::vector<Track>& tracks,
                                              const Intrinsics& K, const SpcConfig& spc_cfg,
                                              const PoseSE3& center, double extent, int steps) {
    if (steps < 1) throw InputError("brute_force_pose_grid: steps must be >= 1");
    if (extent < 0.0) throw InputError("brute_force_pose_grid: extent must be >= 0");

    std::vector<GridSample> samples;
    const auto eval = [&](const Twist6& t) {
        GridSample s;
        s.tangent = t;
        try {
            s.l_proj = spc_loss(tracks, compose(se3_exp(t), center), K, spc_cfg).l_proj;
        } catch (const AllSkipped&) {
            s.l_proj = std::numeric_limits<double>::infinity();
        }
        return s;
    };

    if (extent == 0.0 || steps == 1) {
        samples.push_back(eval(Twist6::zero()));
        return samples;
    }

    const double total = std::pow(static_cast<double>(steps), 6);
    if (total > 1e7) {
        throw GridTooLarge("brute_force_pose_grid: steps^6 = " + std::to_string(total) +
                           " exceeds 1e7");
    }
    std::vector<double> offsets(steps);
    for (int i = 0; i < steps; ++i) {
        offsets[i] = -extent + 2.0 * extent * static_cast<double>(i) / (steps - 1);
    }
    samples.reserve(static_cast<std::size_t>(total));
    Twist6 t;
    for (double wx : offsets) {
        for (double wy : offsets) {
            for (double wz : offsets) {
                for (double tx : offsets) {
                    for (double ty : offsets) {
                        for (double tz : offsets) {
                            t.omega = {wx, wy, wz};
                            t.tau = {tx, ty, tz};
                            samples.push_back(eval(t));
                        }
                    }
                }
            }
        }
    }
    return samples;
}

} // namespace wristview

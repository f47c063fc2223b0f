#pragma once

// Deliberately naive reference implementations, independent of the library
// code paths they are used to check. Keep these dumb: straight loops,
// no shared helpers with src/.

#include <vector>

#include "wristview/geometry.hpp"
#include "wristview/image.hpp"
#include "wristview/render.hpp"
#include "wristview/spc.hpp"

namespace ref {

using wristview::ConditionMap;
using wristview::Image;
using wristview::Intrinsics;
using wristview::Pixel;
using wristview::Point3;
using wristview::PoseSE3;
using wristview::SpcConfig;
using wristview::Track;
using wristview::Twist6;

// element-by-element R*p + T
Eigen::Vector3d transform_naive(const PoseSE3& pose, const Eigen::Vector3d& p);

struct LossValues {
    double l_u = 0.0;
    double l_depth = 0.0;
    double l_proj = 0.0;
    std::size_t n_front = 0;
    std::size_t n_back = 0;
    std::size_t n_skipped = 0;
};

// two-pass straight-line evaluation of the projection-consistency loss
LossValues loss_naive(const std::vector<Track>& tracks, const PoseSE3& pose,
                      const Intrinsics& K, const SpcConfig& cfg);

// central finite differences of the library loss through the library
// retraction, step h per tangent component
Twist6 fd_gradient(const std::vector<Track>& tracks, const PoseSE3& pose, const Intrinsics& K,
                   const SpcConfig& cfg, double h);

// per-pixel loop over the whole cloud; same documented conventions as the
// library rasterizer (round half-up centers, in-bounds center required,
// float depth buffer, eps ties keep the lowest index)
ConditionMap render_naive(const std::vector<Point3>& cloud, const PoseSE3& pose,
                          const Intrinsics& K, int radius_px, double depth_test_eps);

// rotation angle between two rotation matrices, in degrees, via unit
// quaternions
double rotation_angle_deg_quat(const Eigen::Matrix3d& ra, const Eigen::Matrix3d& rb);

// two-pass scalar SSIM (means first, then centered moments)
double ssim_naive(const Image& a, const Image& b);

} // namespace ref

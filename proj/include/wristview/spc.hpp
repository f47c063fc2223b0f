#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wristview/geometry.hpp"

namespace wristview {

// One matched pixel pair between an anchor view and the wrist view.
struct Correspondence2D2D {
    int anchor_view_index = 0;
    Pixel anchor_pixel;
    Pixel wrist_pixel;
};

// A 3D scene point paired with the wrist pixel it was observed at.
struct Track {
    Eigen::Vector3d point = Eigen::Vector3d::Zero();
    Pixel wrist_pixel;
    double weight = 1.0;
};

// Dense per-pixel 3D points for one anchor view. Entries with valid=0 carry
// no point; they are flagged rather than NaN-filled.
struct AnchorPointMap {
    int width = 0;
    int height = 0;
    std::vector<Eigen::Vector3d> points;
    std::vector<std::uint8_t> valid;

    void resize(int w, int h) {
        width = w;
        height = h;
        points.assign(static_cast<std::size_t>(w) * h, Eigen::Vector3d::Zero());
        valid.assign(static_cast<std::size_t>(w) * h, 0);
    }
    std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * width + u;
    }
    bool in_bounds(int u, int v) const {
        return u >= 0 && u < width && v >= 0 && v < height;
    }
};

enum class Normalization { none, image_diagonal };

struct SpcConfig {
    double lambda_u = 1.0;
    double lambda_depth = 0.1;
    Normalization normalization = Normalization::image_diagonal;
    double z_eps = kZEps;
};

// Loss values plus how the tracks split across the partition.
// l_proj is stored as exactly lambda_u*l_u + lambda_depth*l_depth.
struct SpcBreakdown {
    double l_u = 0.0;
    double l_depth = 0.0;
    double l_proj = 0.0;
    std::size_t n_front = 0;
    std::size_t n_back = 0;
    std::size_t n_skipped = 0;
};

struct LiftResult {
    std::vector<Track> tracks;
    std::size_t dropped = 0;
};

// Looks up the 3D point under each correspondence's anchor pixel (nearest
// lattice pixel, round half-up; interpolating points across depth edges
// would fabricate geometry) and pairs it with the wrist pixel.
// Throws InputError on out-of-range view index or out-of-bounds anchor
// pixel, EmptyResult when every correspondence lands on an invalid entry.
LiftResult lift_correspondences(const std::vector<Correspondence2D2D>& corrs,
                                const std::vector<AnchorPointMap>& anchor_maps);

struct Partition {
    std::vector<std::size_t> front;
    std::vector<std::size_t> back;
    std::vector<std::size_t> skipped;
};

// Splits track indices by wrist-frame depth: front if z > z_eps, back if
// z < -z_eps, skipped otherwise.
Partition partition_front_back(const std::vector<Track>& tracks, const PoseSE3& pose,
                               const Intrinsics& K, double z_eps);

// Weighted loss over the partition:
//   l_u     = weighted mean squared pixel distance over front tracks,
//             divided by width^2+height^2 under image_diagonal normalization
//   l_depth = negative weighted mean depth over back tracks
// Empty partitions contribute 0 to their term. Summation is fixed
// left-to-right in track order. Throws AllSkipped when no track clears
// |z| > z_eps.
SpcBreakdown spc_loss(const std::vector<Track>& tracks, const PoseSE3& pose,
                      const Intrinsics& K, const SpcConfig& cfg);

// Analytic gradient of l_proj with respect to the tangent at the given
// pose, i.e. d/d(omega,tau) of spc_loss(tracks, se3_exp(t) * pose) at t=0.
Twist6 spc_gradient(const std::vector<Track>& tracks, const PoseSE3& pose,
                    const Intrinsics& K, const SpcConfig& cfg);

} // namespace wristview

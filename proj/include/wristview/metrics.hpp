#pragma once

#include <vector>

#include "wristview/geometry.hpp"
#include "wristview/image.hpp"
#include "wristview/spc.hpp"

namespace wristview {

struct PoseError {
    double rotation_deg = 0.0; // geodesic angle between the rotations
    double translation = 0.0;  // Euclidean distance between translations
};

PoseError pose_error(const PoseSE3& a, const PoseSE3& b);

// 10*log10(1/MSE) over all pixels and channels, dynamic range 1.
// Identical images return +infinity; aggregate code must report those
// separately instead of averaging them in.
double psnr(const Image& a, const Image& b);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03,
// dynamic range 1, mean over valid window positions, per channel then
// averaged. Requires min(H, W) >= 11.
double ssim(const Image& a, const Image& b);

// Root weighted mean squared pixel distance over front-facing tracks.
// Throws NoFrontPoints when nothing is in front.
double reprojection_rmse(const std::vector<Track>& tracks, const PoseSE3& pose,
                         const Intrinsics& K);

} // namespace wristview

#include "wristview/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wristview/errors.hpp"

namespace wristview {

PoseError pose_error(const PoseSE3& a, const PoseSE3& b) {
    const Eigen::Matrix3d rel = a.rotation * b.rotation.transpose();
    const double arg = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
    PoseError e;
    e.rotation_deg = std::acos(arg) * 180.0 / 3.14159265358979323846;
    e.translation = (a.translation - b.translation).norm();
    return e;
}

double psnr(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw DimensionMismatch("psnr: image shapes differ");
    }
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = a.data[i] - b.data[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
    if (!a.same_shape(b)) {
        throw DimensionMismatch("ssim: image shapes differ");
    }
    constexpr int kWin = 11;
    if (a.width < kWin || a.height < kWin) {
        throw TooSmall("ssim: images must be at least 11x11, got " +
                       std::to_string(a.width) + "x" + std::to_string(a.height));
    }

    double window[kWin][kWin];
    double wsum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
            const double di = i - (kWin - 1) / 2.0;
            const double dj = j - (kWin - 1) / 2.0;
            window[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
            wsum += window[i][j];
        }
    }
    for (auto& row : window) {
        for (double& w : row) w /= wsum;
    }

    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;

    double channel_sum = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        double acc = 0.0;
        std::size_t positions = 0;
        for (int v = 0; v + kWin <= a.height; ++v) {
            for (int u = 0; u + kWin <= a.width; ++u) {
                double mu_a = 0.0, mu_b = 0.0;
                double aa = 0.0, bb = 0.0, ab = 0.0;
                for (int i = 0; i < kWin; ++i) {
                    for (int j = 0; j < kWin; ++j) {
                        const double w = window[i][j];
                        const double x = a.at(u + j, v + i, c);
                        const double y = b.at(u + j, v + i, c);
                        mu_a += w * x;
                        mu_b += w * y;
                        aa += w * x * x;
                        bb += w * y * y;
                        ab += w * x * y;
                    }
                }
                const double var_a = aa - mu_a * mu_a;
                const double var_b = bb - mu_b * mu_b;
                const double cov = ab - mu_a * mu_b;
                const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                acc += num / den;
                ++positions;
            }
        }
        channel_sum += acc / static_cast<double>(positions);
    }
    return channel_sum / a.channels;
}

double reprojection_rmse(const std::vector<Track>& tracks, const PoseSE3& pose,
                         const Intrinsics& K) {
    double err_sum = 0.0, wsum = 0.0;
    for (const Track& t : tracks) {
        const Eigen::Vector3d q = transform_to_camera(pose, t.point);
        if (q.z() <= kZEps) continue;
        const double du = K.fx * q.x() / q.z() + K.cx - t.wrist_pixel.u;
        const double dv = K.fy * q.y() / q.z() + K.cy - t.wrist_pixel.v;
        err_sum += t.weight * (du * du + dv * dv);
        wsum += t.weight;
    }
    if (wsum == 0.0) {
        throw NoFrontPoints("reprojection_rmse: no front-facing tracks at this pose");
    }
    return std::sqrt(err_sum / wsum);
}

} // namespace wristview

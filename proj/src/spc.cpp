#include "wristview/spc.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "wristview/errors.hpp"

namespace wristview {

namespace {

int round_half_up(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

} // namespace

LiftResult lift_correspondences(const std::vector<Correspondence2D2D>& corrs,
                                const std::vector<AnchorPointMap>& anchor_maps) {
    LiftResult out;
    out.tracks.reserve(corrs.size());
    for (std::size_t i = 0; i < corrs.size(); ++i) {
        const Correspondence2D2D& c = corrs[i];
        if (c.anchor_view_index < 0 ||
            static_cast<std::size_t>(c.anchor_view_index) >= anchor_maps.size()) {
            throw InputError("correspondence " + std::to_string(i) +
                             ": anchor view index " + std::to_string(c.anchor_view_index) +
                             " out of range (have " + std::to_string(anchor_maps.size()) +
                             " maps)");
        }
        const AnchorPointMap& map = anchor_maps[c.anchor_view_index];
        const int u = round_half_up(c.anchor_pixel.u);
        const int v = round_half_up(c.anchor_pixel.v);
        if (!map.in_bounds(u, v)) {
            throw InputError("correspondence " + std::to_string(i) + ": anchor pixel (" +
                             std::to_string(c.anchor_pixel.u) + ", " +
                             std::to_string(c.anchor_pixel.v) + ") outside anchor image bounds");
        }
        const std::size_t idx = map.index(u, v);
        if (!map.valid[idx]) {
            ++out.dropped;
            continue;
        }
        Track t;
        t.point = map.points[idx];
        t.wrist_pixel = c.wrist_pixel;
        out.tracks.push_back(t);
    }
    if (out.tracks.empty() && !corrs.empty()) {
        throw EmptyResult("all " + std::to_string(corrs.size()) +
                          " correspondences landed on invalid point-map entries");
    }
    return out;
}

Partition partition_front_back(const std::vector<Track>& tracks, const PoseSE3& pose,
                               const Intrinsics& /*K*/, double z_eps) {
    Partition p;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        const double z = transform_to_camera(pose, tracks[i].point).z();
        if (z > z_eps) {
            p.front.push_back(i);
        } else if (z < -z_eps) {
            p.back.push_back(i);
        } else {
            p.skipped.push_back(i);
        }
    }
    return p;
}

SpcBreakdown spc_loss(const std::vector<Track>& tracks, const PoseSE3& pose,
                      const Intrinsics& K, const SpcConfig& cfg) {
    const double norm_div =
        cfg.normalization == Normalization::image_diagonal ? K.diag_sq() : 1.0;

    SpcBreakdown out;
    double err_sum = 0.0, front_wsum = 0.0;
    double depth_sum = 0.0, back_wsum = 0.0;
    for (const Track& t : tracks) {
        const Eigen::Vector3d q = transform_to_camera(pose, t.point);
        const double z = q.z();
        if (z > cfg.z_eps) {
            const double du = K.fx * q.x() / z + K.cx - t.wrist_pixel.u;
            const double dv = K.fy * q.y() / z + K.cy - t.wrist_pixel.v;
            err_sum += t.weight * (du * du + dv * dv);
            front_wsum += t.weight;
            ++out.n_front;
        } else if (z < -cfg.z_eps) {
            depth_sum += t.weight * z;
            back_wsum += t.weight;
            ++out.n_back;
        } else {
            ++out.n_skipped;
        }
    }
    if (out.n_front == 0 && out.n_back == 0) {
        throw AllSkipped("every track has |depth| <= z_eps at this pose");
    }
    out.l_u = out.n_front > 0 ? err_sum / (front_wsum * norm_div) : 0.0;
    out.l_depth = out.n_back > 0 ? -depth_sum / back_wsum : 0.0;
    out.l_proj = cfg.lambda_u * out.l_u + cfg.lambda_depth * out.l_depth;
    return out;
}

Twist6 spc_gradient(const std::vector<Track>& tracks, const PoseSE3& pose,
                    const Intrinsics& K, const SpcConfig& cfg) {
    const double norm_div =
        cfg.normalization == Normalization::image_diagonal ? K.diag_sq() : 1.0;

    // A tangent perturbation t acts as se3_exp(t) * pose, so a camera-frame
    // point q moves as dq/domega = -skew(q), dq/dtau = I.
    Eigen::Vector3d gu_omega = Eigen::Vector3d::Zero();
    Eigen::Vector3d gu_tau = Eigen::Vector3d::Zero();
    Eigen::Vector3d gd_omega = Eigen::Vector3d::Zero();
    Eigen::Vector3d gd_tau = Eigen::Vector3d::Zero();
    double front_wsum = 0.0, back_wsum = 0.0;
    std::size_t n_front = 0, n_back = 0;

    for (const Track& t : tracks) {
        const Eigen::Vector3d q = transform_to_camera(pose, t.point);
        const double z = q.z();
        if (z > cfg.z_eps) {
            const double inv_z = 1.0 / z;
            const double du = K.fx * q.x() * inv_z + K.cx - t.wrist_pixel.u;
            const double dv = K.fy * q.y() * inv_z + K.cy - t.wrist_pixel.v;
            // d(error^2)/dq = 2 * J_pixel^T * e with
            // J_pixel = [fx/z, 0, -fx*x/z^2; 0, fy/z, -fy*y/z^2]
            Eigen::Vector3d dq;
            dq.x() = 2.0 * du * K.fx * inv_z;
            dq.y() = 2.0 * dv * K.fy * inv_z;
            dq.z() = -2.0 * (du * K.fx * q.x() + dv * K.fy * q.y()) * inv_z * inv_z;
            dq *= t.weight;
            gu_omega += q.cross(dq); // dq/domega^T applied: -skew(q)^T v = q x v
            gu_tau += dq;
            front_wsum += t.weight;
            ++n_front;
        } else if (z < -cfg.z_eps) {
            // dz/domega = (q.y, -q.x, 0), dz/dtau = (0,0,1)
            gd_omega.x() += t.weight * q.y();
            gd_omega.y() -= t.weight * q.x();
            gd_tau.z() += t.weight;
            back_wsum += t.weight;
            ++n_back;
        }
    }
    if (n_front == 0 && n_back == 0) {
        throw AllSkipped("every track has |depth| <= z_eps at this pose");
    }

    Twist6 g;
    if (n_front > 0) {
        const double su = cfg.lambda_u / (front_wsum * norm_div);
        g.omega += su * gu_omega;
        g.tau += su * gu_tau;
    }
    if (n_back > 0) {
        const double sd = -cfg.lambda_depth / back_wsum;
        g.omega += sd * gd_omega;
        g.tau += sd * gd_tau;
    }
    return g;
}

} // namespace wristview

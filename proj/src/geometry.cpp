#include "wristview/geometry.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace wristview {

double PoseSE3::orthonormality_defect() const {
    const Eigen::Matrix3d defect = rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
    const double ortho = defect.cwiseAbs().maxCoeff();
    const double det = std::abs(rotation.determinant() - 1.0);
    return std::max(ortho, det);
}

Eigen::Vector3d transform_to_camera(const PoseSE3& pose, const Eigen::Vector3d& p) {
    return pose.rotation * p + pose.translation;
}

Projection project(const Intrinsics& K, const PoseSE3& pose, const Eigen::Vector3d& p) {
    const Eigen::Vector3d q = transform_to_camera(pose, p);
    Projection out;
    out.depth = q.z();
    if (std::abs(q.z()) < kZEps) {
        out.pixel_valid = false;
        return out;
    }
    out.pixel.u = K.fx * q.x() / q.z() + K.cx;
    out.pixel.v = K.fy * q.y() / q.z() + K.cy;
    out.pixel_valid = true;
    return out;
}

Eigen::Vector3d unproject(const Intrinsics& K, const PoseSE3& pose, const Pixel& px, double depth) {
    const Eigen::Vector3d q((px.u - K.cx) * depth / K.fx,
                            (px.v - K.cy) * depth / K.fy,
                            depth);
    const PoseSE3 inv = invert(pose);
    return transform_to_camera(inv, q);
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
        -v.y(), v.x(), 0.0;
    return m;
}

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& omega) {
    const double theta2 = omega.squaredNorm();
    const Eigen::Matrix3d w = skew(omega);
    if (theta2 < 1e-16) {
        // sin(t)/t ~ 1 - t^2/6, (1-cos(t))/t^2 ~ 1/2 - t^2/24
        return Eigen::Matrix3d::Identity() + (1.0 - theta2 / 6.0) * w +
               (0.5 - theta2 / 24.0) * (w * w);
    }
    const double theta = std::sqrt(theta2);
    return Eigen::Matrix3d::Identity() + (std::sin(theta) / theta) * w +
           ((1.0 - std::cos(theta)) / theta2) * (w * w);
}

PoseSE3 se3_exp(const Twist6& t) {
    PoseSE3 pose;
    pose.rotation = rodrigues(t.omega);
    pose.translation = t.tau;
    return pose;
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
    PoseSE3 out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

PoseSE3 invert(const PoseSE3& a) {
    PoseSE3 out;
    out.rotation = a.rotation.transpose();
    out.translation = -(out.rotation * a.translation);
    return out;
}

Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
        flip(2, 2) = -1.0;
        r = svd.matrixU() * flip * svd.matrixV().transpose();
    }
    return r;
}

} // namespace wristview

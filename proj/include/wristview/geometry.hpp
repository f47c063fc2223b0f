#pragma once

#include <optional>

#include <Eigen/Core>

namespace wristview {

// Points with |depth| below this are neither front- nor back-facing and are
// excluded from projection-based terms. Keeps 1/z out of blow-up range.
inline constexpr double kZEps = 1e-6;

// Pixel convention: continuous coordinates, (0,0) at the top-left pixel
// center. Fixed project-wide so condition maps are bit-exact.
struct Pixel {
    double u = 0.0;
    double v = 0.0;
};

struct Intrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    bool valid() const {
        return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 &&
               cx >= 0.0 && cx < width && cy >= 0.0 && cy < height;
    }

    double diag_sq() const {
        return static_cast<double>(width) * width + static_cast<double>(height) * height;
    }
};

// World point, optionally colored (channels in [0,1]).
struct Point3 {
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    std::optional<Eigen::Vector3d> rgb;

    Point3() = default;
    Point3(double x, double y, double z) : pos(x, y, z) {}
    explicit Point3(const Eigen::Vector3d& p) : pos(p) {}
    Point3(const Eigen::Vector3d& p, const Eigen::Vector3d& color) : pos(p), rgb(color) {}
};

// Rigid world-to-camera transform: q = R*p + T. The camera looks down +z of
// its own frame; q.z() is the depth used for front/back partitioning.
struct PoseSE3 {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static PoseSE3 identity() { return {}; }

    // camera center in world coordinates: -R^T * T
    Eigen::Vector3d center() const { return -rotation.transpose() * translation; }

    // max-norm of R^T R - I plus the det(R)-1 defect
    double orthonormality_defect() const;
    bool valid(double tol = 1e-9) const { return orthonormality_defect() < tol; }
};

// Tangent-space step: axis-angle rotation part and translation part.
struct Twist6 {
    Eigen::Vector3d omega = Eigen::Vector3d::Zero();
    Eigen::Vector3d tau = Eigen::Vector3d::Zero();

    static Twist6 zero() { return {}; }

    double norm() const { return std::sqrt(omega.squaredNorm() + tau.squaredNorm()); }
    bool finite() const { return omega.allFinite() && tau.allFinite(); }

    Eigen::Matrix<double, 6, 1> vec() const {
        Eigen::Matrix<double, 6, 1> v;
        v << omega, tau;
        return v;
    }
    static Twist6 from_vec(const Eigen::Matrix<double, 6, 1>& v) {
        Twist6 t;
        t.omega = v.head<3>();
        t.tau = v.tail<3>();
        return t;
    }
};

struct Projection {
    Pixel pixel;
    double depth = 0.0;
    // false when |depth| < kZEps and the pixel arithmetic is degenerate
    bool pixel_valid = false;
};

Eigen::Vector3d transform_to_camera(const PoseSE3& pose, const Eigen::Vector3d& p);

Projection project(const Intrinsics& K, const PoseSE3& pose, const Eigen::Vector3d& p);

// Inverse of project for pixel_valid projections with depth > 0:
// recovers the world point from (pixel, depth).
Eigen::Vector3d unproject(const Intrinsics& K, const PoseSE3& pose, const Pixel& px, double depth);

Eigen::Matrix3d skew(const Eigen::Vector3d& v);

// Rodrigues rotation with a small-angle series branch below 1e-8 rad.
Eigen::Matrix3d rodrigues(const Eigen::Vector3d& omega);

// Retraction onto SE(3): rotation = Rodrigues(omega), translation = tau
// added after composition. Not the full SE(3) exponential; any retraction
// serves a first-order solver.
PoseSE3 se3_exp(const Twist6& t);

// compose(a, b): apply b first, then a. R = Ra*Rb, T = Ra*Tb + Ta.
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);

PoseSE3 invert(const PoseSE3& a);

// Nearest rotation matrix (polar factor via SVD, det forced to +1).
// Solvers call this after every step to stop drift from accumulating.
Eigen::Matrix3d orthonormalize(const Eigen::Matrix3d& m);

} // namespace wristview

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wristview/geometry.hpp"
#include "wristview/spc.hpp"
#include "wristview/tensor.hpp"

namespace wristview::io {

// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);

// One record per line: anchor_view_index, anchor u, anchor v, wrist u,
// wrist v (comma-separated, '#' comments). Order preserved.
std::vector<Correspondence2D2D> load_correspondences(const std::filesystem::path& path);
void save_correspondences(const std::filesystem::path& path,
                          const std::vector<Correspondence2D2D>& corrs);

// One pose per line: 12 floats, rotation row-major then translation,
// '#' comments allowed.
std::vector<PoseSE3> load_trajectory(const std::filesystem::path& path);
void save_trajectory(const std::filesystem::path& path, const std::vector<PoseSE3>& poses);

enum class CameraRole { anchor, wrist };

struct CameraEntry {
    CameraRole role = CameraRole::anchor;
    Intrinsics intrinsics;
    bool has_extrinsics = false;
    PoseSE3 extrinsics;
};

struct CameraConfig {
    std::vector<CameraEntry> cameras;

    const CameraEntry& wrist() const;
    std::vector<const CameraEntry*> anchors() const;
};

// Strict JSON: unknown fields are rejected. `scale` multiplies fx, fy, cx,
// cy and the image size, for runs at a different resolution.
CameraConfig load_cameras(const std::filesystem::path& path, double scale = 1.0);
void save_cameras(const std::filesystem::path& path, const CameraConfig& config);

// Binary tensor container: magic "BTNSR001", u8 dtype (0=f64, 1=f32,
// 2=u8, 3=i64), u8 rank, u16 zero, rank x u64 dims, row-major payload,
// all little-endian.
enum class TensorDType : std::uint8_t { f64 = 0, f32 = 1, u8 = 2, i64 = 3 };

void save_tensor(const std::filesystem::path& path, const Tensor& tensor,
                 TensorDType dtype = TensorDType::f64);
Tensor load_tensor(const std::filesystem::path& path);

// Point maps travel as H x W x 4 tensors (x, y, z, valid flag).
void save_point_map(const std::filesystem::path& path, const AnchorPointMap& map);
AnchorPointMap load_point_map(const std::filesystem::path& path);

// metrics.txt ("name=value" per line, insertion order) plus a .json twin
// next to it.
using MetricReport = std::vector<std::pair<std::string, std::string>>;
void write_metric_report(const std::filesystem::path& txt_path, const MetricReport& report);

} // namespace wristview::io

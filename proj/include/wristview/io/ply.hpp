#pragma once

#include <filesystem>
#include <vector>

#include "wristview/geometry.hpp"

namespace wristview::io {

struct PlyLoadResult {
    std::vector<Point3> points;
    std::size_t rejected_nonfinite = 0;
};

// Reads ascii or binary_little_endian PLY with x,y,z (float or double) and
// optional red,green,blue (uchar). Colors come back normalized to [0,1].
// Non-finite vertices are dropped and counted. Throws ParseError with a
// line/offset position, UnsupportedProperty for anything else in the file.
PlyLoadResult load_point_cloud(const std::filesystem::path& path);

enum class PlyFormat { ascii, binary_little_endian };

// Positions as doubles (ascii uses 17 significant digits, so save/load
// round-trips bit-exactly); colors as uchar when every point has one.
void save_point_cloud(const std::filesystem::path& path, const std::vector<Point3>& cloud,
                      PlyFormat format);

} // namespace wristview::io

#pragma once

#include <cstdint>
#include <vector>

#include "wristview/geometry.hpp"

namespace wristview {

// Rasterized wrist-view guidance frame. Where mask is false, depth is 0 and
// rgb is black.
struct ConditionMap {
    int width = 0;
    int height = 0;
    std::vector<float> rgb;   // H*W*3, row-major, [0,1]
    std::vector<float> depth; // H*W, scene units, 0 = empty
    std::vector<std::uint8_t> mask;

    void resize(int w, int h) {
        width = w;
        height = h;
        rgb.assign(static_cast<std::size_t>(w) * h * 3, 0.0f);
        depth.assign(static_cast<std::size_t>(w) * h, 0.0f);
        mask.assign(static_cast<std::size_t>(w) * h, 0);
    }
    std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * width + u;
    }
    bool operator==(const ConditionMap& o) const {
        return width == o.width && height == o.height && rgb == o.rgb &&
               depth == o.depth && mask == o.mask;
    }
};

struct SplatConfig {
    int radius_px = 1;           // square splat half-width, <= 16
    double depth_test_eps = 1e-9;
};

// Projects each front-facing point (depth > kZEps) and paints a square of
// side 2*radius_px+1 around the rounded pixel center (round half-up, u then
// v). The z-buffer keeps the smallest depth; depths within depth_test_eps
// keep the lowest point index. Points whose rounded center is outside the
// image are skipped; splats of in-bounds centers are clipped at the edges.
ConditionMap render_condition_map(const std::vector<Point3>& cloud, const PoseSE3& pose,
                                  const Intrinsics& K, const SplatConfig& splat);

// One map per trajectory pose. `clouds` holds either a single static cloud
// or exactly one cloud per frame; anything else is a LengthMismatch.
// Frames are independent, so output is identical at any thread count.
std::vector<ConditionMap> render_sequence(const std::vector<std::vector<Point3>>& clouds,
                                          const std::vector<PoseSE3>& trajectory,
                                          const Intrinsics& K, const SplatConfig& splat,
                                          int threads = 1);

} // namespace wristview

#include "wristview/render.hpp"

#include <cmath>
#include <string>

#include "wristview/errors.hpp"
#include "wristview/parallel.hpp"

namespace wristview {

namespace {

int round_half_up(double x) {
    return static_cast<int>(std::floor(x + 0.5));
}

} // namespace

ConditionMap render_condition_map(const std::vector<Point3>& cloud, const PoseSE3& pose,
                                  const Intrinsics& K, const SplatConfig& splat) {
    if (splat.radius_px < 0 || splat.radius_px > 16) {
        throw InputError("splat radius_px must be in [0, 16], got " +
                         std::to_string(splat.radius_px));
    }
    ConditionMap map;
    map.resize(K.width, K.height);

    const int r = splat.radius_px;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Projection proj = project(K, pose, cloud[i].pos);
        if (!proj.pixel_valid || proj.depth <= kZEps) continue;
        const int cu = round_half_up(proj.pixel.u);
        const int cv = round_half_up(proj.pixel.v);
        if (cu < 0 || cu >= K.width || cv < 0 || cv >= K.height) continue;

        const float z = static_cast<float>(proj.depth);
        float cr = 0.0f, cg = 0.0f, cb = 0.0f;
        if (cloud[i].rgb) {
            cr = static_cast<float>(cloud[i].rgb->x());
            cg = static_cast<float>(cloud[i].rgb->y());
            cb = static_cast<float>(cloud[i].rgb->z());
        }
        const int u0 = std::max(0, cu - r), u1 = std::min(K.width - 1, cu + r);
        const int v0 = std::max(0, cv - r), v1 = std::min(K.height - 1, cv + r);
        for (int v = v0; v <= v1; ++v) {
            for (int u = u0; u <= u1; ++u) {
                const std::size_t px = map.index(u, v);
                // points are visited in index order, so on an eps-tie the
                // incumbent (lower index) stays
                if (map.mask[px] && !(z < map.depth[px] - splat.depth_test_eps)) continue;
                map.mask[px] = 1;
                map.depth[px] = z;
                map.rgb[px * 3 + 0] = cr;
                map.rgb[px * 3 + 1] = cg;
                map.rgb[px * 3 + 2] = cb;
            }
        }
    }
    return map;
}

std::vector<ConditionMap> render_sequence(const std::vector<std::vector<Point3>>& clouds,
                                          const std::vector<PoseSE3>& trajectory,
                                          const Intrinsics& K, const SplatConfig& splat,
                                          int threads) {
    const std::size_t frames = trajectory.size();
    if (frames == 0) throw InputError("render_sequence: empty trajectory");
    if (clouds.size() != 1 && clouds.size() != frames) {
        throw LengthMismatch("render_sequence: " + std::to_string(clouds.size()) +
                             " clouds for " + std::to_string(frames) + " trajectory poses");
    }
    std::vector<ConditionMap> maps(frames);
    parallel_for(frames, threads, [&](std::size_t t) {
        const std::vector<Point3>& cloud = clouds.size() == 1 ? clouds[0] : clouds[t];
        maps[t] = render_condition_map(cloud, trajectory[t], K, splat);
    });
    return maps;
}

} // namespace wristview

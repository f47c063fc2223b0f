#pragma once

#include <filesystem>

#include "wristview/image.hpp"
#include "wristview/render.hpp"

namespace wristview::io {

// 8-bit grayscale (1 channel) or RGB (3 channels) PNG. Values round
// half-up from [0,1]*255. The deflate stream uses stored blocks only, so
// output bytes depend on nothing but the pixels.
void write_png(const std::filesystem::path& path, const Image& image);

// Reads non-interlaced 8-bit grayscale/RGB/RGBA PNGs back to [0,1] floats.
Image read_png(const std::filesystem::path& path);

// Grayscale PFM, scale line "-1.0" (little-endian), rows bottom-up per the
// format convention. `data` is row-major top-down H*W.
void write_pfm(const std::filesystem::path& path, int width, int height,
               const std::vector<float>& data);

struct PfmImage {
    int width = 0;
    int height = 0;
    std::vector<float> data; // row-major top-down
};

PfmImage read_pfm(const std::filesystem::path& path);

// stem.png (RGB), stem.depth.pfm, stem.mask.png (0/255 gray).
void write_condition_outputs(const ConditionMap& map, const std::filesystem::path& stem);

Image condition_map_rgb(const ConditionMap& map);

} // namespace wristview::io

#pragma once

#include <cstddef>
#include <vector>

namespace wristview {

// Row-major H x W x C image with values in [0,1]. Doubles, so metric
// identities hold to full precision.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, fill) {}

    std::size_t index(int u, int v, int c = 0) const {
        return (static_cast<std::size_t>(v) * width + u) * channels + c;
    }
    double& at(int u, int v, int c = 0) { return data[index(u, v, c)]; }
    double at(int u, int v, int c = 0) const { return data[index(u, v, c)]; }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

} // namespace wristview

#include "wristview/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wristview/rng.hpp"

namespace wristview {

Tensor concat_latents(const LatentFrame& frame) {
    frame.z_w.require_rank(3, "concat_latents: z_w");
    frame.z_c.require_rank(3, "concat_latents: z_c");
    if (frame.z_w.dims != frame.z_c.dims) {
        throw ShapeMismatch("concat_latents: z_w and z_c shapes differ");
    }
    const std::size_t c = frame.z_w.dims[0];
    Tensor out({2 * c, frame.z_w.dims[1], frame.z_w.dims[2]});
    std::copy(frame.z_w.data.begin(), frame.z_w.data.end(), out.data.begin());
    std::copy(frame.z_c.data.begin(), frame.z_c.data.end(),
              out.data.begin() + static_cast<std::ptrdiff_t>(frame.z_w.size()));
    return out;
}

std::vector<double> stub_encode(const Image& image, std::size_t d_c) {
    constexpr int kGrid = 8;
    const int channels = image.channels > 0 ? image.channels : 1;
    std::vector<double> pooled(static_cast<std::size_t>(kGrid) * kGrid * channels, 0.0);

    for (int gy = 0; gy < kGrid; ++gy) {
        const int v0 = image.height * gy / kGrid;
        const int v1 = std::max(v0 + 1, image.height * (gy + 1) / kGrid);
        for (int gx = 0; gx < kGrid; ++gx) {
            const int u0 = image.width * gx / kGrid;
            const int u1 = std::max(u0 + 1, image.width * (gx + 1) / kGrid);
            for (int c = 0; c < channels; ++c) {
                double sum = 0.0;
                int count = 0;
                for (int v = v0; v < v1 && v < image.height; ++v) {
                    for (int u = u0; u < u1 && u < image.width; ++u) {
                        sum += image.at(u, v, c);
                        ++count;
                    }
                }
                pooled[(static_cast<std::size_t>(gy) * kGrid + gx) * channels + c] =
                    count > 0 ? sum / count : 0.0;
            }
        }
    }

    // fixed projection: one seeded stream regardless of caller
    Rng rng(0x57ab1e, "stub_encode");
    const double scale = 1.0 / std::sqrt(static_cast<double>(pooled.size()));
    std::vector<double> out(d_c, 0.0);
    for (std::size_t i = 0; i < d_c; ++i) {
        double acc = 0.0;
        for (double p : pooled) acc += scale * rng.normal() * p;
        out[i] = acc;
    }
    return out;
}

TokenBundle assemble_condition_tokens(const Tensor& features, const Tensor& text,
                                      const EmbeddingTable& tables) {
    features.require_rank(3, "assemble_condition_tokens: features");
    text.require_rank(2, "assemble_condition_tokens: text");
    tables.temporal.require_rank(2, "tables.temporal");
    tables.view.require_rank(2, "tables.view");
    tables.text_pos.require_rank(2, "tables.text_pos");
    tables.proj_clip.require_rank(2, "tables.proj_clip");
    tables.proj_text.require_rank(2, "tables.proj_text");

    const std::size_t n_views = features.dims[0];
    const std::size_t n_frames = features.dims[1];
    const std::size_t d_c = features.dims[2];
    const std::size_t n_text = text.dims[0];
    const std::size_t d_text = text.dims[1];
    const std::size_t d = tables.proj_clip.dims[0];

    if (tables.proj_clip.dims[1] != d_c) {
        throw ShapeMismatch("proj_clip is " + std::to_string(tables.proj_clip.dims[0]) + "x" +
                            std::to_string(tables.proj_clip.dims[1]) + " but features have d_c=" +
                            std::to_string(d_c));
    }
    if (tables.proj_text.dims[0] != d || tables.proj_text.dims[1] != d_text) {
        throw ShapeMismatch("proj_text shape does not match (d, d_text)");
    }
    if (tables.temporal.dims[0] != n_frames || tables.temporal.dims[1] != d) {
        throw ShapeMismatch("temporal table must be T x d");
    }
    if (tables.view.dims[0] != n_views || tables.view.dims[1] != d) {
        throw ShapeMismatch("view table must be N x d");
    }
    if (tables.text_pos.dims[0] != n_text || tables.text_pos.dims[1] != d) {
        throw ShapeMismatch("text_pos table must be L x d");
    }
    const std::size_t total = n_views * n_frames + n_text;
    if (total > kMaxConditionTokens) {
        throw InputError("condition token budget exceeded: " + std::to_string(total) + " > " +
                         std::to_string(kMaxConditionTokens));
    }

    TokenBundle out;
    out.d = d;
    out.clip_tokens = Tensor({n_views * n_frames, d});
    out.text_tokens = Tensor({n_text, d});

    for (std::size_t t = 0; t < n_frames; ++t) {
        for (std::size_t i = 0; i < n_views; ++i) {
            const std::size_t row = t * n_views + i;
            for (std::size_t k = 0; k < d; ++k) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d_c; ++j) {
                    acc += tables.proj_clip.at(k, j) * features.at(i, t, j);
                }
                out.clip_tokens.at(row, k) = acc + tables.temporal.at(t, k) + tables.view.at(i, k);
            }
        }
    }
    for (std::size_t j = 0; j < n_text; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            double acc = 0.0;
            for (std::size_t m = 0; m < d_text; ++m) {
                acc += tables.proj_text.at(k, m) * text.at(j, m);
            }
            out.text_tokens.at(j, k) = acc + tables.text_pos.at(j, k);
        }
    }
    return out;
}

EmbeddingTable make_random_tables(std::size_t n_views, std::size_t n_frames,
                                  std::size_t n_text, std::size_t d, std::size_t d_c,
                                  std::size_t d_text, std::uint64_t seed) {
    Rng rng(seed, "embedding_tables");
    const auto fill = [&](Tensor& t, std::vector<std::size_t> dims) {
        t = Tensor(std::move(dims));
        for (double& x : t.data) x = rng.normal();
    };
    EmbeddingTable tables;
    fill(tables.temporal, {n_frames, d});
    fill(tables.view, {n_views, d});
    fill(tables.text_pos, {n_text, d});
    fill(tables.proj_clip, {d, d_c});
    fill(tables.proj_text, {d, d_text});
    return tables;
}

} // namespace wristview

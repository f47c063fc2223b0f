#pragma once

#include <vector>

#include "wristview/image.hpp"
#include "wristview/tensor.hpp"

namespace wristview {

// Hard cap on conditioning sequence length (clip tokens plus text tokens).
inline constexpr std::size_t kMaxConditionTokens = 512;

// One frame's latent pair, both C x H' x W'.
struct LatentFrame {
    Tensor z_w; // wrist latent
    Tensor z_c; // condition-map latent
};

// Positional/projection tables; seeded constants here, stand-ins for the
// learned parameters of a full generation stack.
struct EmbeddingTable {
    Tensor temporal;  // T x d
    Tensor view;      // N x d
    Tensor text_pos;  // L x d
    Tensor proj_clip; // d x d_c
    Tensor proj_text; // d x d_text
};

struct TokenBundle {
    Tensor clip_tokens; // (N*T) x d, frame-major (t outer, i inner)
    Tensor text_tokens; // L x d
    std::size_t d = 0;

    std::size_t token_count() const {
        return (clip_tokens.size() ? clip_tokens.dims[0] : 0) +
               (text_tokens.size() ? text_tokens.dims[0] : 0);
    }
};

// Stacks the condition latent under the wrist latent along channels:
// channels [0,C) are z_w, [C,2C) are z_c.
Tensor concat_latents(const LatentFrame& frame);

// Deterministic stand-in for a learned image encoder: 8x8 average-pooled
// patch grid, flattened, projected to d_c by a fixed seeded random matrix.
std::vector<double> stub_encode(const Image& image, std::size_t d_c);

// Builds the conditioning sequence:
//   clip token (t,i) = proj_clip * features[i,t,:] + temporal[t] + view[i]
//   text token j     = proj_text * text[j,:] + text_pos[j]
// features is N x T x d_c; tokens are ordered frame-major. Enforces the
// 512-token budget and validates every table dimension.
TokenBundle assemble_condition_tokens(const Tensor& features, const Tensor& text,
                                      const EmbeddingTable& tables);

// Seeded tables with matching dimensions, for tests and the CLI.
EmbeddingTable make_random_tables(std::size_t n_views, std::size_t n_frames,
                                  std::size_t n_text, std::size_t d, std::size_t d_c,
                                  std::size_t d_text, std::uint64_t seed);

} // namespace wristview

#include <doctest.h>

#include <cmath>

#include "wristview/conditioning.hpp"
#include "wristview/errors.hpp"
#include "wristview/rng.hpp"

using namespace wristview;

namespace {

Tensor random_tensor(std::vector<std::size_t> dims, Rng& rng) {
    Tensor t(std::move(dims));
    for (double& x : t.data) x = rng.normal();
    return t;
}

} // namespace

TEST_CASE("concat_latents stacks wrist over condition channels") {
    LatentFrame frame;
    frame.z_w = Tensor({1, 1, 1});
    frame.z_c = Tensor({1, 1, 1});
    frame.z_w.data[0] = 1.0;
    frame.z_c.data[0] = 2.0;
    const Tensor out = concat_latents(frame);
    REQUIRE(out.dims == std::vector<std::size_t>{2, 1, 1});
    CHECK(out.data[0] == 1.0);
    CHECK(out.data[1] == 2.0);
}

TEST_CASE("concat_latents zero condition half stays zero") {
    Rng rng(1, "latents");
    LatentFrame frame;
    frame.z_w = random_tensor({3, 4, 5}, rng);
    frame.z_c = Tensor({3, 4, 5});
    const Tensor out = concat_latents(frame);
    for (std::size_t i = frame.z_w.size(); i < out.size(); ++i) CHECK(out.data[i] == 0.0);
}

TEST_CASE("concat_latents round-trips by slicing") {
    Rng rng(2, "latents");
    LatentFrame frame;
    frame.z_w = random_tensor({4, 8, 8}, rng);
    frame.z_c = random_tensor({4, 8, 8}, rng);
    const Tensor out = concat_latents(frame);
    REQUIRE(out.dims[0] == 8);
    for (std::size_t i = 0; i < frame.z_w.size(); ++i) {
        CHECK(out.data[i] == frame.z_w.data[i]);
        CHECK(out.data[frame.z_w.size() + i] == frame.z_c.data[i]);
    }
}

TEST_CASE("concat_latents rejects mismatched shapes") {
    LatentFrame frame;
    frame.z_w = Tensor({2, 4, 4});
    frame.z_c = Tensor({2, 4, 5});
    CHECK_THROWS_AS(concat_latents(frame), ShapeMismatch);
}

TEST_CASE("stub_encode determinism and sensitivity") {
    Image gray(32, 32, 3, 0.5);
    const std::vector<double> a = stub_encode(gray, 16);
    const std::vector<double> b = stub_encode(gray, 16);
    CHECK(a == b);

    Image tweaked = gray;
    tweaked.at(7, 9, 1) += 0.25;
    const std::vector<double> c = stub_encode(tweaked, 16);
    bool differs = false;
    for (std::size_t i = 0; i < c.size(); ++i) differs |= (c[i] != a[i]);
    CHECK(differs);

    // constant image: encoding equals the projection of the constant patch
    // vector, so doubling the constant doubles the encoding
    Image doubled(32, 32, 3, 1.0);
    const std::vector<double> d = stub_encode(doubled, 16);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d[i] == doctest::Approx(2.0 * a[i]).epsilon(1e-12));
    }
}

TEST_CASE("assemble_condition_tokens layout") {
    const std::size_t N = 2, T = 3, L = 4, d = 6, d_c = 5, d_text = 7;
    Rng rng(4, "tokens");
    const Tensor features = random_tensor({N, T, d_c}, rng);
    const Tensor text = random_tensor({L, d_text}, rng);
    const EmbeddingTable tables = make_random_tables(N, T, L, d, d_c, d_text, 11);

    const TokenBundle bundle = assemble_condition_tokens(features, text, tables);
    CHECK(bundle.token_count() == N * T + L);
    CHECK(bundle.d == d);
    REQUIRE(bundle.clip_tokens.dims == std::vector<std::size_t>{N * T, d});
    REQUIRE(bundle.text_tokens.dims == std::vector<std::size_t>{L, d});

    // reference loop, row (t, i) laid out frame-major
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                double expect = tables.temporal.at(t, k) + tables.view.at(i, k);
                for (std::size_t j = 0; j < d_c; ++j) {
                    expect += tables.proj_clip.at(k, j) * features.at(i, t, j);
                }
                CHECK(bundle.clip_tokens.at(t * N + i, k) ==
                      doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
    for (std::size_t j = 0; j < L; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            double expect = tables.text_pos.at(j, k);
            for (std::size_t m = 0; m < d_text; ++m) {
                expect += tables.proj_text.at(k, m) * text.at(j, m);
            }
            CHECK(bundle.text_tokens.at(j, k) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("single identity token reduces to the raw feature") {
    const std::size_t d = 4;
    Tensor features({1, 1, d});
    for (std::size_t j = 0; j < d; ++j) features.data[j] = 1.0 + j;
    Tensor text({0, 3});
    EmbeddingTable tables;
    tables.temporal = Tensor({1, d});
    tables.view = Tensor({1, d});
    tables.text_pos = Tensor({0, d});
    tables.proj_clip = Tensor({d, d});
    for (std::size_t k = 0; k < d; ++k) tables.proj_clip.at(k, k) = 1.0;
    tables.proj_text = Tensor({d, 3});

    const TokenBundle bundle = assemble_condition_tokens(features, text, tables);
    REQUIRE(bundle.token_count() == 1);
    for (std::size_t k = 0; k < d; ++k) {
        CHECK(bundle.clip_tokens.at(0, k) == features.data[k]);
    }
}

TEST_CASE("zero features expose the additive positional structure") {
    const std::size_t N = 2, T = 2, d = 3;
    Tensor features({N, T, 4});
    Tensor text({0, 2});
    EmbeddingTable tables = make_random_tables(N, T, 0, d, 4, 2, 8);
    const TokenBundle bundle = assemble_condition_tokens(features, text, tables);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                CHECK(bundle.clip_tokens.at(t * N + i, k) ==
                      tables.temporal.at(t, k) + tables.view.at(i, k));
            }
        }
    }
}

TEST_CASE("assembly is linear in the features") {
    const std::size_t N = 2, T = 4, L = 3, d = 8, d_c = 6, d_text = 5;
    Rng rng(9, "linearity");
    const Tensor features = random_tensor({N, T, d_c}, rng);
    const Tensor delta = random_tensor({N, T, d_c}, rng);
    Tensor shifted = features;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted.data[i] += delta.data[i];
    const Tensor text = random_tensor({L, d_text}, rng);
    const EmbeddingTable tables = make_random_tables(N, T, L, d, d_c, d_text, 10);

    const TokenBundle base = assemble_condition_tokens(features, text, tables);
    const TokenBundle moved = assemble_condition_tokens(shifted, text, tables);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                double wc_delta = 0.0;
                for (std::size_t j = 0; j < d_c; ++j) {
                    wc_delta += tables.proj_clip.at(k, j) * delta.at(i, t, j);
                }
                const double got =
                    moved.clip_tokens.at(t * N + i, k) - base.clip_tokens.at(t * N + i, k);
                CHECK(got == doctest::Approx(wc_delta).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("swapping the two views moves only view embeddings") {
    const std::size_t N = 2, T = 3, d = 5, d_c = 4;
    Rng rng(14, "views");
    const Tensor features = random_tensor({N, T, d_c}, rng);
    Tensor swapped = features;
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t j = 0; j < d_c; ++j) {
            std::swap(swapped.at(0, t, j), swapped.at(1, t, j));
        }
    }
    const Tensor text({0, 2});
    const EmbeddingTable tables = make_random_tables(N, T, 0, d, d_c, 2, 15);

    const TokenBundle base = assemble_condition_tokens(features, text, tables);
    const TokenBundle flip = assemble_condition_tokens(swapped, text, tables);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < d; ++k) {
            // token (t, 0) of the swapped input carries view 1's features
            // with view 0's embedding
            const double moved = flip.clip_tokens.at(t * N + 0, k) - tables.view.at(0, k);
            const double orig = base.clip_tokens.at(t * N + 1, k) - tables.view.at(1, k);
            CHECK(moved == doctest::Approx(orig).epsilon(1e-12));
        }
    }
}

TEST_CASE("frame permutation relabels temporal embeddings only") {
    const std::size_t N = 2, T = 4, d = 5, d_c = 3;
    Rng rng(21, "frames");
    const Tensor features = random_tensor({N, T, d_c}, rng);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    Tensor permuted({N, T, d_c});
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t j = 0; j < d_c; ++j) {
                permuted.at(i, t, j) = features.at(i, perm[t], j);
            }
        }
    }
    const Tensor text({1, 2});
    const EmbeddingTable tables = make_random_tables(N, T, 1, d, d_c, 2, 22);
    const TokenBundle base = assemble_condition_tokens(features, text, tables);
    const TokenBundle shuffled = assemble_condition_tokens(permuted, text, tables);

    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                const double lhs = shuffled.clip_tokens.at(t * N + i, k) -
                                   tables.temporal.at(t, k);
                const double rhs = base.clip_tokens.at(perm[t] * N + i, k) -
                                   tables.temporal.at(perm[t], k);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            }
        }
    }
    // text tokens are untouched by frame order
    CHECK(shuffled.text_tokens == base.text_tokens);
}

TEST_CASE("token budget is enforced") {
    const std::size_t N = 8, T = 64, L = 1; // 513 tokens
    Tensor features({N, T, 2});
    Tensor text({L, 2});
    const EmbeddingTable tables = make_random_tables(N, T, L, 4, 2, 2, 30);
    CHECK_THROWS_AS(assemble_condition_tokens(features, text, tables), InputError);

    // exactly at the cap is fine
    Tensor features_ok({N, T - 1, 2}); // 8*63 + 1 = 505
    const EmbeddingTable tables_ok = make_random_tables(N, T - 1, L, 4, 2, 2, 30);
    CHECK_NOTHROW(assemble_condition_tokens(features_ok, text, tables_ok));
}

TEST_CASE("table shape violations are rejected") {
    Rng rng(5, "shapes");
    const Tensor features = random_tensor({2, 2, 3}, rng);
    const Tensor text = random_tensor({1, 2}, rng);
    EmbeddingTable tables = make_random_tables(2, 2, 1, 4, 3, 2, 5);
    tables.view = Tensor({3, 4}); // wrong N
    CHECK_THROWS_AS(assemble_condition_tokens(features, text, tables), ShapeMismatch);
}

#include "physica/attention.hpp"

#include "physica/errors.hpp"
#include "physica/rng.hpp"
#include "reference.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace physica;
using namespace physica::testing;

namespace {

Mat random_mat(SplitMix64& rng, int rows, int cols, double scale = 1.0) {
  Mat m(rows, cols);
  for (auto& v : m.data) v = rng.uniform(-scale, scale);
  return m;
}

AttentionParams identity_params(int d) {
  AttentionParams p;
  p.w_q = Mat(d, d);
  p.w_k = Mat(d, d);
  p.w_v = Mat(d, d);
  for (int i = 0; i < d; ++i) {
    p.w_q.at(i, i) = 1.0;
    p.w_k.at(i, i) = 1.0;
    p.w_v.at(i, i) = 1.0;
  }
  p.scale = 1.0 / std::sqrt(static_cast<double>(d));
  return p;
}

}  // namespace

TEST_CASE("a single key/value token dominates every query") {
  SplitMix64 rng(1);
  const int d = 8;
  const AttentionParams params = AttentionParams::seeded(d, 2);
  const Mat queries = random_mat(rng, 4, d);
  const Mat kv = random_mat(rng, 1, d);

  const Mat out = cross_attention(queries, kv, params);
  Vec kv_row(kv.data);
  const Vec expected = matvec(params.w_v, kv_row);
  for (int i = 0; i < out.rows; ++i)
    for (int c = 0; c < d; ++c) CHECK(out.at(i, c) == expected[static_cast<std::size_t>(c)]);
}

TEST_CASE("key/value permutation leaves the output bit-identical") {
  SplitMix64 rng(3);
  const int d = 16;
  const AttentionParams params = AttentionParams::seeded(d, 4);
  const Mat queries = random_mat(rng, 5, d);
  Mat kv = random_mat(rng, 9, d);

  const Mat base = cross_attention(queries, kv, params);
  for (int trial = 0; trial < 10; ++trial) {
    // Fisher-Yates on rows
    for (int i = kv.rows - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
      for (int c = 0; c < d; ++c) std::swap(kv.at(i, c), kv.at(j, c));
    }
    const Mat shuffled = cross_attention(queries, kv, params);
    REQUIRE(shuffled.data == base.data);
  }
}

TEST_CASE("attention matches the naive double-loop oracle") {
  SplitMix64 rng(5);
  const AttentionParams params = AttentionParams::seeded(4, 6);
  const Mat queries = random_mat(rng, 3, 4);
  const Mat kv = random_mat(rng, 5, 4);

  const Mat got = cross_attention(queries, kv, params);
  const Mat expected = naive_attention(queries, kv, params.w_q, params.w_k, params.w_v,
                                       params.scale);
  for (std::size_t i = 0; i < got.data.size(); ++i)
    CHECK(std::abs(got.data[i] - expected.data[i]) < 1e-12);
}

TEST_CASE("attention matches the oracle across 50 random shapes") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = static_cast<int>(2 + rng.next_below(30));
    const int n = static_cast<int>(1 + rng.next_below(12));
    const int m = static_cast<int>(1 + rng.next_below(12));
    AttentionParams params = AttentionParams::seeded(d, rng.next());
    const Mat queries = random_mat(rng, n, d);
    const Mat kv = random_mat(rng, m, d);

    const Mat got = cross_attention(queries, kv, params);
    const Mat expected = naive_attention(queries, kv, params.w_q, params.w_k, params.w_v,
                                         params.scale);
    REQUIRE(got.rows == n);
    REQUIRE(got.cols == d);
    for (std::size_t i = 0; i < got.data.size(); ++i)
      REQUIRE(std::abs(got.data[i] - expected.data[i]) < 1e-12);
  }
}

TEST_CASE("attention weights are row-stochastic") {
  // With identity projections and basis-vector keys/values, each output row
  // is exactly that query's attention weight vector.
  SplitMix64 rng(9);
  const int m = 6;
  const AttentionParams params = identity_params(m);
  Mat kv(m, m);
  for (int j = 0; j < m; ++j) kv.at(j, j) = 1.0;
  const Mat queries = random_mat(rng, 8, m);

  const Mat weights = cross_attention(queries, kv, params);
  for (int i = 0; i < weights.rows; ++i) {
    double sum = 0.0;
    for (int c = 0; c < m; ++c) {
      CHECK(weights.at(i, c) >= 0.0);
      sum += weights.at(i, c);
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("softmax is invariant to constant logit shifts") {
  // kv rows share first coordinate 1, so shifting the query's first
  // coordinate adds a constant to every logit.
  SplitMix64 rng(11);
  const int d = 6;
  const AttentionParams params = identity_params(d);
  Mat kv = random_mat(rng, 7, d);
  for (int j = 0; j < kv.rows; ++j) kv.at(j, 0) = 1.0;

  Mat q(1, d);
  for (int c = 0; c < d; ++c) q.at(0, c) = rng.uniform(-1, 1);
  const Mat base = cross_attention(q, kv, params);

  Mat shifted = q;
  shifted.at(0, 0) += 37.5;  // adds 37.5 * scale to every score
  const Mat out = cross_attention(shifted, kv, params);
  for (int c = 0; c < d; ++c) CHECK(std::abs(out.at(0, c) - base.at(0, c)) < 1e-12);
}

TEST_CASE("attention rejects empty keys and width mismatches") {
  const AttentionParams params = AttentionParams::seeded(4, 1);
  CHECK_THROWS_AS(cross_attention(Mat(2, 4), Mat(0, 4), params), EmptyKeys);
  CHECK_THROWS_AS(cross_attention(Mat(2, 3), Mat(2, 3), params), DimMismatch);
}

TEST_CASE("fuse_vehicle adds box attention onto map tokens") {
  SplitMix64 rng(13);
  const int d = 8;
  const AttentionParams params = AttentionParams::seeded(d, 3);
  const Mat map_tokens = random_mat(rng, 6, d);
  const Mat box_tokens = random_mat(rng, 6, d);

  SUBCASE("no boxes leaves the map tokens untouched") {
    const Mat out = fuse_vehicle(map_tokens, box_tokens, Mat(0, d), params);
    CHECK(out.data == map_tokens.data);
  }
  SUBCASE("one coordinate vector broadcasts W_V u onto every token") {
    const Mat u = random_mat(rng, 1, d);
    const Mat out = fuse_vehicle(map_tokens, box_tokens, u, params);
    Vec u_row(u.data);
    const Vec wu = matvec(params.w_v, u_row);
    for (int i = 0; i < out.rows; ++i)
      for (int c = 0; c < d; ++c)
        CHECK(out.at(i, c) == doctest::Approx(map_tokens.at(i, c) + wu[static_cast<std::size_t>(c)])
                                  .epsilon(1e-15));
  }
  SUBCASE("general case equals map + naive attention") {
    const Mat coor = random_mat(rng, 4, d);
    const Mat out = fuse_vehicle(map_tokens, box_tokens, coor, params);
    const Mat attn = naive_attention(box_tokens, coor, params.w_q, params.w_k, params.w_v,
                                     params.scale);
    for (std::size_t i = 0; i < out.data.size(); ++i)
      CHECK(std::abs(out.data[i] - (map_tokens.data[i] + attn.data[i])) < 1e-12);
  }
}

TEST_CASE("fuse_condition concatenates vehicle and camera queries") {
  SplitMix64 rng(17);
  const int d = 8;
  const AttentionParams params = AttentionParams::seeded(d, 5);
  const Mat h_vehicle = random_mat(rng, 6, d);
  const Mat h_c = random_mat(rng, 2, d);

  SUBCASE("single world token pins every output row to W_V token") {
    const Mat world = random_mat(rng, 1, d);
    const Mat out = fuse_condition(h_vehicle, h_c, world, params);
    REQUIRE(out.rows == 8);  // n + V
    Vec world_row(world.data);
    const Vec expected = matvec(params.w_v, world_row);
    for (int i = 0; i < out.rows; ++i)
      for (int c = 0; c < d; ++c) CHECK(out.at(i, c) == expected[static_cast<std::size_t>(c)]);
  }
  SUBCASE("matches naive attention over the concatenated queries") {
    const Mat world = random_mat(rng, 5, d);
    const Mat out = fuse_condition(h_vehicle, h_c, world, params);
    Mat queries(8, d);
    std::copy(h_vehicle.data.begin(), h_vehicle.data.end(), queries.data.begin());
    std::copy(h_c.data.begin(), h_c.data.end(), queries.data.begin() + 6 * d);
    const Mat expected = naive_attention(queries, world, params.w_q, params.w_k, params.w_v,
                                         params.scale);
    for (std::size_t i = 0; i < out.data.size(); ++i)
      CHECK(std::abs(out.data[i] - expected.data[i]) < 1e-12);
  }
  SUBCASE("empty world tokens raise EmptyKeys") {
    CHECK_THROWS_AS(fuse_condition(h_vehicle, h_c, Mat(0, d), params), EmptyKeys);
  }
}

TEST_CASE("view inflation layout and identity") {
  SUBCASE("single view is an identity reshape") {
    TokenGrid g(2, 3, 4, 2);
    std::iota(g.data.begin(), g.data.end(), 0.0);
    const TokenGrid inflated = inflate_views({g});
    CHECK(inflated.data == g.data);
    CHECK(inflated.views == 1);
    CHECK(inflated.inflated);
  }
  SUBCASE("two views concatenate along width in camera order") {
    TokenGrid a(1, 1, 3, 1), b(1, 1, 3, 1);
    for (int x = 0; x < 3; ++x) {
      a.at(0, 0, x, 0) = x;
      b.at(0, 0, x, 0) = 10 + x;
    }
    const TokenGrid inflated = inflate_views({a, b});
    REQUIRE(inflated.w == 6);
    const std::vector<double> expected{0, 1, 2, 10, 11, 12};
    CHECK(inflated.data == expected);
  }
  SUBCASE("mismatched dims are rejected") {
    CHECK_THROWS_AS(inflate_views({TokenGrid(1, 2, 2, 1), TokenGrid(1, 2, 3, 1)}),
                    DimMismatch);
  }
}

TEST_CASE("inflate/deinflate round-trips random grids bit-identically") {
  SplitMix64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const int v = static_cast<int>(1 + rng.next_below(6));
    const int t = static_cast<int>(1 + rng.next_below(4));
    const int h = static_cast<int>(1 + rng.next_below(8));
    const int w = static_cast<int>(1 + rng.next_below(14));
    const int c = static_cast<int>(1 + rng.next_below(8));
    std::vector<TokenGrid> grids(static_cast<std::size_t>(v), TokenGrid(t, h, w, c));
    for (auto& g : grids)
      for (auto& x : g.data) x = rng.uniform(-5, 5);

    const TokenGrid inflated = inflate_views(grids);
    REQUIRE(inflated.w == w * v);
    const auto back = deinflate_views(inflated);
    REQUIRE(back.size() == grids.size());
    for (std::size_t i = 0; i < grids.size(); ++i) REQUIRE(back[i].data == grids[i].data);
  }
}

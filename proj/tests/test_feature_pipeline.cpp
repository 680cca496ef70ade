// Copyright 2026 The etcml Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

#include "etcml/cipher.hpp"
#include "etcml/dataset.hpp"
#include "etcml/error.hpp"
#include "etcml/features.hpp"
#include "etcml/kernel.hpp"
#include "etcml/rng.hpp"

using namespace etcml;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an etcml::Error");
}

// Relative agreement with an absolute floor of 1, so exact zeros compare
// cleanly against exact zeros.
bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("flatten is row-major and injective") {
  GrayscaleImage image = make_image(2, 2);
  image.pixels = {0, 1, 2, 3};
  CHECK(flatten(image) == FeatureVector{0.0, 1.0, 2.0, 3.0});

  const GrayscaleImage large = make_image(192, 160);
  CHECK(flatten(large).size() == 30720);

  GrayscaleImage other = image;
  other.pixels[3] = 4;
  CHECK(flatten(other) != flatten(image));
}

TEST_CASE("fit_zscore hand values") {
  FeatureMatrix data;
  data.push_row({0.0, 5.0});
  data.push_row({2.0, 5.0});
  const ZScoreStats stats = fit_zscore(data);
  CHECK(stats.mean[0] == doctest::Approx(1.0));
  CHECK(stats.std[0] == doctest::Approx(1.0));  // population convention
  CHECK_FALSE(stats.constant_mask[0]);
  CHECK(stats.std[1] == 0.0);
  CHECK(stats.constant_mask[1]);

  FeatureMatrix single;
  single.push_row({1.0});
  CHECK(code_of([&] { (void)fit_zscore(single); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("fit_zscore affine rule under 255 - x") {
  SplitMix64 rng(88);
  FeatureMatrix data, flipped;
  for (int i = 0; i < 12; ++i) {
    FeatureVector row(6), neg(6);
    for (std::size_t j = 0; j < 6; ++j) {
      row[j] = static_cast<double>(rng.next_below(256));
      neg[j] = 255.0 - row[j];
    }
    data.push_row(row);
    flipped.push_row(neg);
  }
  const ZScoreStats a = fit_zscore(data);
  const ZScoreStats b = fit_zscore(flipped);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(b.mean[j] == doctest::Approx(255.0 - a.mean[j]).epsilon(1e-12));
    CHECK(b.std[j] == doctest::Approx(a.std[j]).epsilon(1e-12));
  }
}

TEST_CASE("apply_zscore basics") {
  FeatureMatrix data;
  data.push_row({0.0, 3.0});
  data.push_row({2.0, 3.0});
  const ZScoreStats stats = fit_zscore(data);

  CHECK(apply_zscore(FeatureVector{1.0, 3.0}, stats) == FeatureVector{0.0, 0.0});
  CHECK(apply_zscore(FeatureVector{3.0, 3.0}, stats)[0] == doctest::Approx(2.0));
  CHECK(code_of([&] { (void)apply_zscore(FeatureVector{1.0}, stats); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("negative-positive cancels through z-scoring, single feature") {
  SplitMix64 rng(17);
  FeatureMatrix data, flipped;
  for (int i = 0; i < 20; ++i) {
    const double v = static_cast<double>(rng.next_below(256));
    data.push_row({v});
    flipped.push_row({255.0 - v});
  }
  const ZScoreStats sp = fit_zscore(data);
  const ZScoreStats se = fit_zscore(flipped);
  for (int i = 0; i < 20; ++i) {
    const double zp = apply_zscore(FeatureVector{data.values[i]}, sp)[0];
    const double ze = apply_zscore(FeatureVector{255.0 - data.values[i]}, se)[0];
    CHECK(close_rel(ze, -zp, 1e-12));
  }
}

TEST_CASE("fit_reducer shapes and determinism") {
  const Reducer paper_scale = fit_reducer(ReducerKind::kSubsample, 30720, 1536, 3);
  CHECK(paper_scale.out_dim == 1536);
  CHECK(paper_scale.indices.size() == 1536);
  CHECK(std::is_sorted(paper_scale.indices.begin(), paper_scale.indices.end()));
  std::set<std::size_t> distinct(paper_scale.indices.begin(), paper_scale.indices.end());
  CHECK(distinct.size() == 1536);

  const Reducer again = fit_reducer(ReducerKind::kSubsample, 30720, 1536, 3);
  CHECK(again.indices == paper_scale.indices);

  const Reducer identity = fit_reducer(ReducerKind::kIdentity, 7, 7, 0);
  const FeatureVector v{1, 2, 3, 4, 5, 6, 7};
  CHECK(apply_reducer(identity, v) == v);

  CHECK(code_of([] { (void)fit_reducer(ReducerKind::kSubsample, 4, 5, 0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { (void)fit_reducer(ReducerKind::kSubsample, 4, 0, 0); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("apply_reducer selection and projection") {
  const Reducer pick = subsample_reducer_from_indices(3, {0, 2});
  CHECK(apply_reducer(pick, {7.0, 8.0, 9.0}) == FeatureVector{7.0, 9.0});

  const Reducer gaussian = fit_reducer(ReducerKind::kGaussian, 16, 4, 12);
  CHECK(apply_reducer(gaussian, FeatureVector(16, 0.0)) == FeatureVector(4, 0.0));
  CHECK(code_of([&] { (void)apply_reducer(gaussian, FeatureVector(15, 0.0)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("gaussian reducer concentrates pairwise distances") {
  // Monte-Carlo check of the projection's distance distortion at
  // 1024 -> 256: at this shape the squared-distance ratio should fall in
  // [0.7, 1.3] for at least 99% of pairs.
  const Reducer reducer = fit_reducer(ReducerKind::kGaussian, 1024, 256, 2026);
  SplitMix64 rng(1001);
  int within = 0;
  const int pairs = 1000;
  for (int t = 0; t < pairs; ++t) {
    FeatureVector x(1024), y(1024);
    for (std::size_t j = 0; j < 1024; ++j) {
      x[j] = rng.next_gaussian();
      y[j] = rng.next_gaussian();
    }
    const FeatureVector px = apply_reducer(reducer, x);
    const FeatureVector py = apply_reducer(reducer, y);
    double d_full = 0.0, d_proj = 0.0;
    for (std::size_t j = 0; j < 1024; ++j) {
      const double d = x[j] - y[j];
      d_full += d * d;
    }
    for (std::size_t j = 0; j < 256; ++j) {
      const double d = px[j] - py[j];
      d_proj += d * d;
    }
    const double ratio = d_proj / d_full;
    within += ratio >= 0.7 && ratio <= 1.3;
  }
  CHECK(static_cast<double>(within) / pairs >= 0.99);
}

TEST_CASE("pull_back_indices identity and size") {
  PixelMap identity;
  identity.perm.resize(16);
  identity.flip.assign(16, false);
  for (std::size_t j = 0; j < 16; ++j) identity.perm[j] = j;

  const Reducer reducer = subsample_reducer_from_indices(16, {1, 5, 11});
  CHECK(pull_back_indices(reducer, identity) == std::vector<std::size_t>{1, 5, 11});

  const PixelMap map = induced_pixel_map(keygen(3), 8, 8, 8);
  const Reducer r2 = fit_reducer(ReducerKind::kSubsample, 64, 16, 9);
  CHECK(pull_back_indices(r2, map).size() == 16);

  const Reducer gaussian = fit_reducer(ReducerKind::kGaussian, 64, 16, 9);
  CHECK(code_of([&] { (void)pull_back_indices(gaussian, map); }) ==
        ErrorCode::kInvalidArgument);
}

namespace {

struct EquivalenceFixture {
  LabeledDataset data;
  EtcKey key;
  PixelMap map;
  SignedPermutation sp;
  FeatureMatrix plain;
  FeatureMatrix cipher;
  ZScoreStats stats_p;
  ZScoreStats stats_e;

  explicit EquivalenceFixture(std::uint64_t seed, bool constant_corner = false)
      : data(synth_dataset(4, 6, 16, 16, 2.0, seed)), key(keygen(seed ^ 0xabc)) {
    if (constant_corner)
      for (auto& image : data.images) image.pixels[0] = 128;
    map = induced_pixel_map(key, 16, 16, 8);
    sp = to_signed_permutation(map);
    std::vector<GrayscaleImage> enc;
    for (const auto& image : data.images) enc.push_back(encrypt(image, key, 8));
    plain = flatten_all(data.images);
    cipher = flatten_all(enc);
    stats_p = fit_zscore(plain);
    stats_e = fit_zscore(cipher);
  }
};

}  // namespace

TEST_CASE("I-Z1: z-scored encryption is the signed permutation of z-scored plain") {
  for (bool constant_corner : {false, true}) {
    const EquivalenceFixture fx(41, constant_corner);
    for (std::size_t i = 0; i < fx.plain.rows; ++i) {
      const FeatureVector zp = apply_zscore(
          FeatureVector(fx.plain.row(i).begin(), fx.plain.row(i).end()), fx.stats_p);
      const FeatureVector ze = apply_zscore(
          FeatureVector(fx.cipher.row(i).begin(), fx.cipher.row(i).end()), fx.stats_e);
      const FeatureVector mapped = fx.sp.apply(zp);
      for (std::size_t j = 0; j < ze.size(); ++j)
        REQUIRE(close_rel(ze[j], mapped[j], 1e-12));
    }
  }
}

TEST_CASE("I-Z2: inner products and distances survive encryption") {
  const EquivalenceFixture fx(42);
  const FeatureMatrix zp = apply_zscore(fx.plain, fx.stats_p);
  const FeatureMatrix ze = apply_zscore(fx.cipher, fx.stats_e);
  for (std::size_t i = 0; i < zp.rows; ++i)
    for (std::size_t j = i; j < zp.rows; ++j) {
      double dot_p = 0, dot_e = 0, dist_p = 0, dist_e = 0;
      for (std::size_t k = 0; k < zp.dim; ++k) {
        dot_p += zp.row(i)[k] * zp.row(j)[k];
        dot_e += ze.row(i)[k] * ze.row(j)[k];
        const double dp = zp.row(i)[k] - zp.row(j)[k];
        const double de = ze.row(i)[k] - ze.row(j)[k];
        dist_p += dp * dp;
        dist_e += de * de;
      }
      REQUIRE(std::fabs(dot_p - dot_e) < 1e-9);
      REQUIRE(std::fabs(std::sqrt(dist_p) - std::sqrt(dist_e)) < 1e-9);
    }
}

TEST_CASE("subsampled encrypted Gram equals pulled-back plain Gram") {
  const EquivalenceFixture fx(43);
  const Reducer enc_reducer = fit_reducer(ReducerKind::kSubsample, 256, 64, 77);
  const Reducer plain_reducer = subsample_reducer_from_indices(
      256, pull_back_indices(enc_reducer, fx.map));

  // Each domain reduces first, then z-scores with stats fitted on its own
  // reduced training matrix.
  const FeatureMatrix red_e = apply_reducer(enc_reducer, fx.cipher);
  const FeatureMatrix red_p = apply_reducer(plain_reducer, fx.plain);
  const FeatureMatrix ze = apply_zscore(red_e, fit_zscore(red_e));
  const FeatureMatrix zp = apply_zscore(red_p, fit_zscore(red_p));

  for (KernelKind kind : {KernelKind::kLinear, KernelKind::kRbf}) {
    KernelSpec spec;
    spec.kind = kind;
    spec.gamma = kind == KernelKind::kRbf ? 1.0 / 64.0 : 0.0;
    const std::vector<double> ge = gram(spec, ze, ze);
    const std::vector<double> gp = gram(spec, zp, zp);
    for (std::size_t k = 0; k < ge.size(); ++k)
      REQUIRE(std::fabs(ge[k] - gp[k]) < 1e-9);
  }
}

TEST_CASE("reducer json round trip") {
  const Reducer sub = fit_reducer(ReducerKind::kSubsample, 100, 25, 5);
  const Reducer sub2 = reducer_from_json(reducer_to_json(sub));
  CHECK(sub2.indices == sub.indices);
  CHECK(sub2.out_dim == sub.out_dim);

  const Reducer gauss = fit_reducer(ReducerKind::kGaussian, 32, 8, 5);
  const Reducer gauss2 = reducer_from_json(reducer_to_json(gauss));
  CHECK(gauss2.matrix == gauss.matrix);  // re-realized from the stored seed

  const ZScoreStats stats = [&] {
    FeatureMatrix m;
    m.push_row({1.0, 2.0, 2.0});
    m.push_row({3.0, 2.0, 4.0});
    return fit_zscore(m);
  }();
  const ZScoreStats stats2 = zscore_from_json(zscore_to_json(stats));
  CHECK(stats2.mean == stats.mean);
  CHECK(stats2.std == stats.std);
  CHECK(stats2.constant_mask == stats.constant_mask);
}

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

#ifndef ETCML_FEATURES_HPP
#define ETCML_FEATURES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "etcml/cipher.hpp"
#include "etcml/image.hpp"

namespace etcml {

using FeatureVector = std::vector<double>;

// Dense row-major sample matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // rows * dim

  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  std::span<double> row(std::size_t i) {
    return {values.data() + i * dim, dim};
  }
  void push_row(const FeatureVector& v);
};

// Row-major pixel intensities as reals.
FeatureVector flatten(const GrayscaleImage& image);
FeatureMatrix flatten_all(const std::vector<GrayscaleImage>& images);

// Per-feature mean and population (divide-by-n) standard deviation.
// Features with zero variance are masked and normalize to 0.
struct ZScoreStats {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<bool> constant_mask;

  std::size_t dim() const { return mean.size(); }
};

ZScoreStats fit_zscore(const FeatureMatrix& data);
FeatureVector apply_zscore(const FeatureVector& v, const ZScoreStats& stats);
FeatureMatrix apply_zscore(const FeatureMatrix& data, const ZScoreStats& stats);

enum class ReducerKind { kIdentity, kSubsample, kGaussian };

const char* reducer_kind_name(ReducerKind kind);
ReducerKind reducer_kind_from_name(const std::string& name);

// Dimensionality reduction applied in whichever domain the caller lives in
// (the cloud applies it to encrypted pixels). subsample keeps a sorted
// random coordinate subset; gaussian is a dense random projection with
// i.i.d. N(0, 1/out_dim) entries realized deterministically from the seed.
struct Reducer {
  ReducerKind kind = ReducerKind::kIdentity;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> indices;  // subsample only, sorted, distinct
  std::vector<double> matrix;        // gaussian only, out_dim x in_dim
};

Reducer fit_reducer(ReducerKind kind, std::size_t in_dim, std::size_t out_dim,
                    std::uint64_t seed);

// Subsample reducer over an explicit (sorted, distinct) coordinate set.
Reducer subsample_reducer_from_indices(std::size_t in_dim,
                                       std::vector<std::size_t> indices);

FeatureVector apply_reducer(const Reducer& reducer, const FeatureVector& v);
FeatureMatrix apply_reducer(const Reducer& reducer, const FeatureMatrix& data);

// Plain-domain coordinates that an encrypted-domain subsampler actually
// reads: {perm^-1(i) : i in reducer.indices}, sorted.
std::vector<std::size_t> pull_back_indices(const Reducer& reducer,
                                           const PixelMap& map);

// JSON round trip. Gaussian realizations are stored as seed + dims only
// and re-realized on load.
std::string reducer_to_json(const Reducer& reducer);
Reducer reducer_from_json(const std::string& text);
std::string zscore_to_json(const ZScoreStats& stats);
ZScoreStats zscore_from_json(const std::string& text);

}  // namespace etcml

#endif  // ETCML_FEATURES_HPP

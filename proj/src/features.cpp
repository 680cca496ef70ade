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

#include "etcml/features.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "etcml/error.hpp"
#include "etcml/rng.hpp"

namespace etcml {

void FeatureMatrix::push_row(const FeatureVector& v) {
  if (rows == 0 && dim == 0) dim = v.size();
  if (v.size() != dim)
    fail(ErrorCode::kDimensionMismatch, "push_row: dimension mismatch");
  values.insert(values.end(), v.begin(), v.end());
  ++rows;
}

FeatureVector flatten(const GrayscaleImage& image) {
  validate(image);
  FeatureVector v(image.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = static_cast<double>(image.pixels[i]);
  return v;
}

FeatureMatrix flatten_all(const std::vector<GrayscaleImage>& images) {
  FeatureMatrix m;
  for (const GrayscaleImage& image : images) m.push_row(flatten(image));
  return m;
}

ZScoreStats fit_zscore(const FeatureMatrix& data) {
  if (data.rows < 2)
    fail(ErrorCode::kInvalidArgument, "fit_zscore needs at least 2 rows");
  const std::size_t d = data.dim;
  const double n = static_cast<double>(data.rows);
  ZScoreStats stats;
  stats.mean.assign(d, 0.0);
  stats.std.assign(d, 0.0);
  stats.constant_mask.assign(d, false);

  for (std::size_t i = 0; i < data.rows; ++i) {
    std::span<const double> row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) stats.mean[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) stats.mean[j] /= n;

  for (std::size_t i = 0; i < data.rows; ++i) {
    std::span<const double> row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = row[j] - stats.mean[j];
      stats.std[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    stats.std[j] = std::sqrt(stats.std[j] / n);
    if (stats.std[j] == 0.0) stats.constant_mask[j] = true;
  }
  return stats;
}

FeatureVector apply_zscore(const FeatureVector& v, const ZScoreStats& stats) {
  if (v.size() != stats.dim())
    fail(ErrorCode::kDimensionMismatch, "apply_zscore: dimension mismatch");
  FeatureVector z(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    z[j] = stats.constant_mask[j] ? 0.0 : (v[j] - stats.mean[j]) / stats.std[j];
  return z;
}

FeatureMatrix apply_zscore(const FeatureMatrix& data, const ZScoreStats& stats) {
  if (data.dim != stats.dim())
    fail(ErrorCode::kDimensionMismatch, "apply_zscore: dimension mismatch");
  FeatureMatrix out;
  out.rows = data.rows;
  out.dim = data.dim;
  out.values.resize(data.values.size());
  for (std::size_t i = 0; i < data.rows; ++i) {
    std::span<const double> row = data.row(i);
    std::span<double> dst = out.row(i);
    for (std::size_t j = 0; j < data.dim; ++j)
      dst[j] = stats.constant_mask[j] ? 0.0 : (row[j] - stats.mean[j]) / stats.std[j];
  }
  return out;
}

const char* reducer_kind_name(ReducerKind kind) {
  switch (kind) {
    case ReducerKind::kIdentity: return "identity";
    case ReducerKind::kSubsample: return "subsample";
    case ReducerKind::kGaussian: return "gaussian";
  }
  fail(ErrorCode::kInternal, "unknown reducer kind");
}

ReducerKind reducer_kind_from_name(const std::string& name) {
  if (name == "identity") return ReducerKind::kIdentity;
  if (name == "subsample") return ReducerKind::kSubsample;
  if (name == "gaussian") return ReducerKind::kGaussian;
  fail(ErrorCode::kBadConfig, "unknown reducer kind: " + name);
}

Reducer fit_reducer(ReducerKind kind, std::size_t in_dim, std::size_t out_dim,
                    std::uint64_t seed) {
  if (out_dim == 0) fail(ErrorCode::kInvalidArgument, "reducer out_dim is zero");
  if (out_dim > in_dim)
    fail(ErrorCode::kInvalidArgument, "reducer out_dim exceeds in_dim");
  Reducer reducer;
  reducer.kind = kind;
  reducer.in_dim = in_dim;
  reducer.out_dim = out_dim;
  reducer.seed = seed;

  switch (kind) {
    case ReducerKind::kIdentity:
      if (out_dim != in_dim)
        fail(ErrorCode::kInvalidArgument, "identity reducer requires out_dim == in_dim");
      break;
    case ReducerKind::kSubsample: {
      SplitMix64 rng = seeded_stream(seed, domain::kReducer);
      std::vector<std::size_t> all = random_permutation(in_dim, rng);
      reducer.indices.assign(all.begin(), all.begin() + static_cast<long>(out_dim));
      std::sort(reducer.indices.begin(), reducer.indices.end());
      break;
    }
    case ReducerKind::kGaussian: {
      SplitMix64 rng = seeded_stream(seed, domain::kReducer);
      const double scale = 1.0 / std::sqrt(static_cast<double>(out_dim));
      reducer.matrix.resize(out_dim * in_dim);
      for (double& entry : reducer.matrix) entry = scale * rng.next_gaussian();
      break;
    }
  }
  return reducer;
}

Reducer subsample_reducer_from_indices(std::size_t in_dim,
                                       std::vector<std::size_t> indices) {
  if (indices.empty()) fail(ErrorCode::kInvalidArgument, "empty index set");
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
    fail(ErrorCode::kInvalidArgument, "duplicate subsample index");
  if (indices.back() >= in_dim)
    fail(ErrorCode::kInvalidArgument, "subsample index out of range");
  Reducer reducer;
  reducer.kind = ReducerKind::kSubsample;
  reducer.in_dim = in_dim;
  reducer.out_dim = indices.size();
  reducer.indices = std::move(indices);
  return reducer;
}

FeatureVector apply_reducer(const Reducer& reducer, const FeatureVector& v) {
  if (v.size() != reducer.in_dim)
    fail(ErrorCode::kDimensionMismatch, "apply_reducer: dimension mismatch");
  switch (reducer.kind) {
    case ReducerKind::kIdentity:
      return v;
    case ReducerKind::kSubsample: {
      FeatureVector out(reducer.out_dim);
      for (std::size_t t = 0; t < reducer.out_dim; ++t) out[t] = v[reducer.indices[t]];
      return out;
    }
    case ReducerKind::kGaussian: {
      FeatureVector out(reducer.out_dim, 0.0);
      for (std::size_t r = 0; r < reducer.out_dim; ++r) {
        const double* row = reducer.matrix.data() + r * reducer.in_dim;
        double acc = 0.0;
        for (std::size_t j = 0; j < reducer.in_dim; ++j) acc += row[j] * v[j];
        out[r] = acc;
      }
      return out;
    }
  }
  fail(ErrorCode::kInternal, "unknown reducer kind");
}

FeatureMatrix apply_reducer(const Reducer& reducer, const FeatureMatrix& data) {
  if (data.dim != reducer.in_dim)
    fail(ErrorCode::kDimensionMismatch, "apply_reducer: dimension mismatch");
  FeatureMatrix out;
  out.rows = data.rows;
  out.dim = reducer.out_dim;
  out.values.resize(out.rows * out.dim);
  for (std::size_t i = 0; i < data.rows; ++i) {
    FeatureVector v(data.row(i).begin(), data.row(i).end());
    FeatureVector reduced = apply_reducer(reducer, v);
    std::copy(reduced.begin(), reduced.end(), out.row(i).begin());
  }
  return out;
}

std::vector<std::size_t> pull_back_indices(const Reducer& reducer,
                                           const PixelMap& map) {
  if (reducer.kind != ReducerKind::kSubsample)
    fail(ErrorCode::kInvalidArgument, "pull_back_indices requires a subsample reducer");
  if (reducer.in_dim != map.perm.size())
    fail(ErrorCode::kDimensionMismatch, "pull_back_indices: map size mismatch");
  // Invert the permutation once, then gather.
  std::vector<std::size_t> inverse(map.perm.size());
  for (std::size_t j = 0; j < map.perm.size(); ++j) inverse[map.perm[j]] = j;
  std::vector<std::size_t> pulled(reducer.out_dim);
  for (std::size_t t = 0; t < reducer.out_dim; ++t)
    pulled[t] = inverse[reducer.indices[t]];
  std::sort(pulled.begin(), pulled.end());
  return pulled;
}

std::string reducer_to_json(const Reducer& reducer) {
  nlohmann::json doc;
  doc["format"] = "etcml-reducer/1";
  doc["kind"] = reducer_kind_name(reducer.kind);
  doc["in_dim"] = reducer.in_dim;
  doc["out_dim"] = reducer.out_dim;
  doc["seed"] = reducer.seed;
  if (reducer.kind == ReducerKind::kSubsample) doc["indices"] = reducer.indices;
  return doc.dump(2);
}

Reducer reducer_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBadConfig, std::string("reducer json: ") + e.what());
  }
  const ReducerKind kind = reducer_kind_from_name(doc.at("kind").get<std::string>());
  const auto in_dim = doc.at("in_dim").get<std::size_t>();
  const auto out_dim = doc.at("out_dim").get<std::size_t>();
  const auto seed = doc.at("seed").get<std::uint64_t>();
  if (kind == ReducerKind::kSubsample && doc.contains("indices"))
    return subsample_reducer_from_indices(
        in_dim, doc["indices"].get<std::vector<std::size_t>>());
  return fit_reducer(kind, in_dim, out_dim, seed);
}

std::string zscore_to_json(const ZScoreStats& stats) {
  nlohmann::json doc;
  doc["format"] = "etcml-zscore/1";
  doc["mean"] = stats.mean;
  doc["std"] = stats.std;
  return doc.dump();
}

ZScoreStats zscore_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBadConfig, std::string("zscore json: ") + e.what());
  }
  ZScoreStats stats;
  stats.mean = doc.at("mean").get<std::vector<double>>();
  stats.std = doc.at("std").get<std::vector<double>>();
  if (stats.mean.size() != stats.std.size())
    fail(ErrorCode::kBadConfig, "zscore json: mean/std length mismatch");
  stats.constant_mask.resize(stats.std.size());
  for (std::size_t j = 0; j < stats.std.size(); ++j)
    stats.constant_mask[j] = stats.std[j] == 0.0;
  return stats;
}

}  // namespace etcml

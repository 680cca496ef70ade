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

#include "etcml/kernel.hpp"

#include <cmath>

#include "etcml/error.hpp"

namespace etcml {

const char* kernel_kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::kLinear: return "linear";
    case KernelKind::kRbf: return "rbf";
    case KernelKind::kPoly: return "poly";
  }
  fail(ErrorCode::kInternal, "unknown kernel kind");
}

KernelKind kernel_kind_from_name(const std::string& name) {
  if (name == "linear") return KernelKind::kLinear;
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "poly") return KernelKind::kPoly;
  fail(ErrorCode::kBadConfig, "unknown kernel kind: " + name);
}

double KernelSpec::effective_gamma(std::size_t dim) const {
  if (gamma > 0.0) return gamma;
  if (gamma < 0.0) fail(ErrorCode::kInvalidArgument, "gamma must be positive");
  if (dim == 0) fail(ErrorCode::kInvalidArgument, "cannot derive gamma for dim 0");
  return 1.0 / static_cast<double>(dim);
}

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

namespace {

// Dispatch without the finiteness scan; callers validate once up front.
double eval_unchecked(const KernelSpec& spec, std::span<const double> x,
                      std::span<const double> y) {
  switch (spec.kind) {
    case KernelKind::kLinear:
      return dot(x, y);
    case KernelKind::kRbf:
      return std::exp(-spec.effective_gamma(x.size()) * squared_distance(x, y));
    case KernelKind::kPoly: {
      if (spec.degree < 1) fail(ErrorCode::kInvalidArgument, "poly degree must be >= 1");
      const double base = spec.effective_gamma(x.size()) * dot(x, y) + spec.coef0;
      double acc = 1.0;
      for (unsigned k = 0; k < spec.degree; ++k) acc *= base;
      return acc;
    }
  }
  fail(ErrorCode::kInternal, "unknown kernel kind");
}

void require_finite(std::span<const double> values) {
  for (double v : values)
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidArgument, "non-finite input");
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  if (x.size() != y.size())
    fail(ErrorCode::kDimensionMismatch, "kernel_eval: dimension mismatch");
  require_finite(x);
  require_finite(y);
  return eval_unchecked(spec, x, y);
}

std::vector<double> gram(const KernelSpec& spec, const FeatureMatrix& a,
                         const FeatureMatrix& b) {
  if (a.dim != b.dim)
    fail(ErrorCode::kDimensionMismatch, "gram: feature dimension mismatch");
  require_finite(a.values);
  require_finite(b.values);
  std::vector<double> g(a.rows * b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j)
      g[i * b.rows + j] = eval_unchecked(spec, a.row(i), b.row(j));
  return g;
}

KernelCache::KernelCache(KernelSpec spec, const FeatureMatrix& data)
    : spec_(spec), data_(data), n_(data.rows) {
  if (n_ <= kFullGramLimit) full_ = gram(spec_, data_, data_);
}

double KernelCache::at(std::size_t i, std::size_t j) const {
  if (!full_.empty()) return full_[i * n_ + j];
  return kernel_eval(spec_, data_.row(i), data_.row(j));
}

}  // namespace etcml

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

#ifndef ETCML_KERNEL_HPP
#define ETCML_KERNEL_HPP

#include <span>
#include <string>
#include <vector>

#include "etcml/features.hpp"

namespace etcml {

enum class KernelKind { kLinear, kRbf, kPoly };

const char* kernel_kind_name(KernelKind kind);
KernelKind kernel_kind_from_name(const std::string& name);

struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  double gamma = 0.0;  // rbf/poly; 0 means "1/dim at use site"
  double coef0 = 0.0;  // poly
  unsigned degree = 3;  // poly

  // gamma resolved against a concrete feature dimension.
  double effective_gamma(std::size_t dim) const;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

// G[i*b.rows + j] = k(a_i, b_j)
std::vector<double> gram(const KernelSpec& spec, const FeatureMatrix& a,
                         const FeatureMatrix& b);

// Immutable kernel lookup over one sample set. Materializes the full
// matrix up to kFullGramLimit rows; larger sets compute entries on demand.
class KernelCache {
 public:
  static constexpr std::size_t kFullGramLimit = 4096;

  KernelCache(KernelSpec spec, const FeatureMatrix& data);

  double at(std::size_t i, std::size_t j) const;
  std::size_t size() const { return n_; }
  const KernelSpec& spec() const { return spec_; }

 private:
  KernelSpec spec_;
  const FeatureMatrix& data_;
  std::size_t n_;
  std::vector<double> full_;  // empty when n_ > kFullGramLimit
};

}  // namespace etcml

#endif  // ETCML_KERNEL_HPP

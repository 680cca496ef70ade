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

#ifndef ETCML_SVM_HPP
#define ETCML_SVM_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "etcml/kernel.hpp"

namespace etcml {

struct TrainConfig {
  double c = 1.0;
  double kkt_tol = 1e-5;
  // Cap on pairwise updates; 0 selects the default of 10000 * n.
  std::size_t max_passes = 0;
};

// Soft-margin binary SVM in dual form. dual_coef[i] = alpha_i * y_i over
// the support vectors only.
struct SvmModel {
  FeatureMatrix support_vectors;
  std::vector<double> dual_coef;
  double bias = 0.0;
  KernelSpec kernel;
  double c = 1.0;
  bool converged = true;
  // Rows of the training set the support vectors came from; in-memory
  // metadata for shared-Gram scoring, not part of the file format.
  std::vector<std::size_t> sv_indices;
};

// Summary of one SMO run; non-convergence is reported here rather than
// thrown, so the partial model stays usable.
struct SmoSummary {
  bool converged = true;
  std::size_t updates = 0;
  double dual_objective = 0.0;
};

// Solves the dual by sequential minimal optimization using the maximal
// KKT violating pair as the working set. Deterministic: ties resolve to
// the lowest index, so equal Gram matrices give identical runs.
SvmModel train_binary_smo(const FeatureMatrix& x, const std::vector<int>& y,
                          const TrainConfig& cfg, const KernelSpec& spec,
                          SmoSummary* summary = nullptr);

// Same, over a caller-provided kernel cache for x (shared across the
// one-vs-rest models).
SvmModel train_binary_smo(const FeatureMatrix& x, const std::vector<int>& y,
                          const TrainConfig& cfg, const KernelCache& cache,
                          SmoSummary* summary = nullptr);

double decision_value(const SvmModel& model, std::span<const double> x);

// One-vs-rest multiclass wrapper; class order is sorted ascending.
struct OvRModel {
  std::vector<int> classes;
  std::vector<SvmModel> models;
};

OvRModel train_one_vs_rest(const FeatureMatrix& x, const std::vector<int>& labels,
                           const TrainConfig& cfg, const KernelSpec& spec);

// Raw decision value of every class model on x, in class order.
std::vector<double> ovr_scores(const OvRModel& model, std::span<const double> x);
int ovr_predict(const OvRModel& model, std::span<const double> x);

// k-NN on Euclidean distance. Majority label among the k nearest; ties
// break to the smallest mean distance, then the smallest label.
int knn_predict(const FeatureMatrix& train, const std::vector<int>& labels,
                std::span<const double> query, std::size_t k);

// Model files, versioned JSON.
void save_svm(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_svm(const std::filesystem::path& path);
void save_ovr(const OvRModel& model, const std::filesystem::path& path);
OvRModel load_ovr(const std::filesystem::path& path);

}  // namespace etcml

#endif  // ETCML_SVM_HPP

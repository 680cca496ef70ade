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

#include "etcml/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include <json.hpp>

#include "etcml/error.hpp"
#include "etcml/fsio.hpp"

namespace etcml {

namespace {

void check_binary_labels(const std::vector<int>& y) {
  if (y.empty()) fail(ErrorCode::kEmptyInput, "no training samples");
  bool has_pos = false, has_neg = false;
  for (int label : y) {
    if (label == 1) has_pos = true;
    else if (label == -1) has_neg = true;
    else fail(ErrorCode::kInvalidArgument, "labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    fail(ErrorCode::kSingleClass, "training data contains a single class");
}

}  // namespace

SvmModel train_binary_smo(const FeatureMatrix& x, const std::vector<int>& y,
                          const TrainConfig& cfg, const KernelSpec& spec,
                          SmoSummary* summary) {
  KernelCache cache(spec, x);
  return train_binary_smo(x, y, cfg, cache, summary);
}

SvmModel train_binary_smo(const FeatureMatrix& x, const std::vector<int>& y,
                          const TrainConfig& cfg, const KernelCache& cache,
                          SmoSummary* summary) {
  if (x.rows < 2) fail(ErrorCode::kEmptyInput, "need at least 2 samples");
  if (y.size() != x.rows)
    fail(ErrorCode::kDimensionMismatch, "label count does not match rows");
  check_binary_labels(y);
  if (cfg.c <= 0.0) fail(ErrorCode::kInvalidArgument, "C must be positive");
  if (cfg.kkt_tol <= 0.0) fail(ErrorCode::kInvalidArgument, "kkt_tol must be positive");

  const std::size_t n = x.rows;
  const double c = cfg.c;
  const std::size_t max_updates = cfg.max_passes != 0 ? cfg.max_passes : 10000 * n;

  // Dual: minimize f(a) = 1/2 a'Qa - sum(a), 0 <= a <= C, y'a = 0, with
  // Q_ij = y_i y_j K_ij. grad[i] = (Qa)_i - 1.
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  const auto yd = [&](std::size_t i) { return static_cast<double>(y[i]); };

  // i may move up in the y*alpha direction, j down; the maximal violating
  // pair maximizes (-y_i grad_i) - (-y_j grad_j).
  const auto in_up = [&](std::size_t t) {
    return y[t] == 1 ? alpha[t] < c : alpha[t] > 0.0;
  };
  const auto in_low = [&](std::size_t t) {
    return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < c;
  };

  bool converged = false;
  std::size_t updates = 0;
  double final_m = 0.0, final_big_m = 0.0;

  while (updates < max_updates) {
    double m = -std::numeric_limits<double>::infinity();
    double big_m = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -yd(t) * grad[t];
      if (in_up(t) && v > m) {
        m = v;
        i = t;
      }
      if (in_low(t) && v < big_m) {
        big_m = v;
        j = t;
      }
    }
    final_m = m;
    final_big_m = big_m;
    if (i == n || j == n || m - big_m <= cfg.kkt_tol) {
      converged = true;
      break;
    }

    // Two-variable analytic step (Platt), errors expressed via gradients:
    // E_t = y_t * grad_t.
    const double e_i = yd(i) * grad[i];
    const double e_j = yd(j) * grad[j];
    double eta = cache.at(i, i) + cache.at(j, j) - 2.0 * cache.at(i, j);
    if (eta < 1e-12) eta = 1e-12;  // duplicate points; step lands on the box

    double lo, hi;
    if (y[i] != y[j]) {
      lo = std::max(0.0, alpha[j] - alpha[i]);
      hi = std::min(c, c + alpha[j] - alpha[i]);
    } else {
      lo = std::max(0.0, alpha[i] + alpha[j] - c);
      hi = std::min(c, alpha[i] + alpha[j]);
    }

    // Rounding in a clipped update can leave a coordinate one ulp inside
    // the box, which keeps it selectable while no representable step
    // remains; snapping such values onto the exact bound prevents the
    // stall. The equality constraint drifts by at most the snap width.
    const double snap = 1e-12 * c;
    const auto snap_to_box = [&](double a) {
      if (a < snap) return 0.0;
      if (a > c - snap) return c;
      return a;
    };

    double aj = alpha[j] + yd(j) * (e_i - e_j) / eta;
    aj = snap_to_box(std::min(hi, std::max(lo, aj)));
    const double delta_j = aj - alpha[j];
    if (delta_j == 0.0) break;  // box-degenerate pair: no progress possible
    const double ai = snap_to_box(alpha[i] - yd(i) * yd(j) * delta_j);
    const double delta_i = ai - alpha[i];

    for (std::size_t t = 0; t < n; ++t)
      grad[t] += yd(t) * (yd(i) * delta_i * cache.at(i, t) +
                          yd(j) * delta_j * cache.at(j, t));
    alpha[i] = ai;
    alpha[j] = aj;
    ++updates;
  }

  // Bias from free support vectors: y_t = f(x_t) there. Falls back to the
  // midpoint of the optimal interval when every alpha sits on the box.
  double bias = 0.0;
  std::size_t free_count = 0;
  const double bound_eps = 1e-9 * c;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > bound_eps && alpha[t] < c - bound_eps) {
      // grad_t = y_t * f_nob(x_t) - 1, so f_nob = y_t (grad_t + 1).
      bias += yd(t) - yd(t) * (grad[t] + 1.0);
      ++free_count;
    }
  }
  if (free_count > 0) {
    bias /= static_cast<double>(free_count);
  } else {
    bias = (final_m + final_big_m) / 2.0;
  }

  double objective = 0.0;  // dual objective sum(a) - 1/2 a'Qa
  for (std::size_t t = 0; t < n; ++t)
    objective += alpha[t] - 0.5 * alpha[t] * (grad[t] + 1.0);

  SvmModel model;
  model.kernel = cache.spec();
  model.c = c;
  model.bias = bias;
  model.converged = converged;
  model.support_vectors.dim = x.dim;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_row(FeatureVector(x.row(t).begin(), x.row(t).end()));
      model.dual_coef.push_back(alpha[t] * yd(t));
      model.sv_indices.push_back(t);
    }
  }
  if (model.dual_coef.empty())
    fail(ErrorCode::kInternal, "SMO produced no support vectors");

  if (summary) {
    summary->converged = converged;
    summary->updates = updates;
    summary->dual_objective = objective;
  }
  return model;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.support_vectors.dim)
    fail(ErrorCode::kDimensionMismatch, "decision_value: dimension mismatch");
  double acc = model.bias;
  for (std::size_t i = 0; i < model.dual_coef.size(); ++i)
    acc += model.dual_coef[i] * kernel_eval(model.kernel, model.support_vectors.row(i), x);
  return acc;
}

OvRModel train_one_vs_rest(const FeatureMatrix& x, const std::vector<int>& labels,
                           const TrainConfig& cfg, const KernelSpec& spec) {
  if (labels.size() != x.rows)
    fail(ErrorCode::kDimensionMismatch, "label count does not match rows");
  std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    fail(ErrorCode::kSingleClass, "one-vs-rest needs at least 2 classes");

  OvRModel ovr;
  ovr.classes.assign(distinct.begin(), distinct.end());
  KernelCache cache(spec, x);
  std::vector<int> binary(labels.size());
  for (int cls : ovr.classes) {
    for (std::size_t t = 0; t < labels.size(); ++t)
      binary[t] = labels[t] == cls ? 1 : -1;
    ovr.models.push_back(train_binary_smo(x, binary, cfg, cache));
  }
  return ovr;
}

std::vector<double> ovr_scores(const OvRModel& model, std::span<const double> x) {
  std::vector<double> scores(model.models.size());
  for (std::size_t m = 0; m < model.models.size(); ++m)
    scores[m] = decision_value(model.models[m], x);
  return scores;
}

int ovr_predict(const OvRModel& model, std::span<const double> x) {
  const std::vector<double> scores = ovr_scores(model, x);
  std::size_t best = 0;
  for (std::size_t m = 1; m < scores.size(); ++m)
    if (scores[m] > scores[best]) best = m;
  return model.classes[best];
}

int knn_predict(const FeatureMatrix& train, const std::vector<int>& labels,
                std::span<const double> query, std::size_t k) {
  if (labels.size() != train.rows)
    fail(ErrorCode::kDimensionMismatch, "label count does not match rows");
  if (k < 1 || k > train.rows)
    fail(ErrorCode::kInvalidArgument, "k out of range");
  if (query.size() != train.dim)
    fail(ErrorCode::kDimensionMismatch, "query dimension mismatch");

  std::vector<std::pair<double, std::size_t>> dist(train.rows);
  for (std::size_t i = 0; i < train.rows; ++i) {
    double acc = 0.0;
    std::span<const double> row = train.row(i);
    for (std::size_t j = 0; j < train.dim; ++j) {
      const double d = row[j] - query[j];
      acc += d * d;
    }
    dist[i] = {acc, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<long>(k), dist.end());

  struct Tally {
    std::size_t votes = 0;
    double dist_sum = 0.0;
  };
  std::map<int, Tally> tallies;
  for (std::size_t t = 0; t < k; ++t) {
    Tally& tally = tallies[labels[dist[t].second]];
    ++tally.votes;
    tally.dist_sum += std::sqrt(dist[t].first);
  }
  int best_label = 0;
  bool first = true;
  std::size_t best_votes = 0;
  double best_mean = 0.0;
  for (const auto& [label, tally] : tallies) {
    const double mean = tally.dist_sum / static_cast<double>(tally.votes);
    const bool wins = first || tally.votes > best_votes ||
                      (tally.votes == best_votes && mean < best_mean);
    if (wins) {
      best_label = label;
      best_votes = tally.votes;
      best_mean = mean;
      first = false;
    }
  }
  return best_label;
}

namespace {

nlohmann::json svm_to_json(const SvmModel& model) {
  nlohmann::json doc;
  doc["format"] = "etcml-svm/1";
  doc["kernel"] = {{"kind", kernel_kind_name(model.kernel.kind)},
                   {"gamma", model.kernel.gamma},
                   {"coef0", model.kernel.coef0},
                   {"degree", model.kernel.degree}};
  doc["c"] = model.c;
  doc["bias"] = model.bias;
  doc["converged"] = model.converged;
  doc["dual_coef"] = model.dual_coef;
  doc["support_vectors"] = {{"rows", model.support_vectors.rows},
                            {"dim", model.support_vectors.dim},
                            {"values", model.support_vectors.values}};
  return doc;
}

SvmModel svm_from_json(const nlohmann::json& doc) {
  SvmModel model;
  const auto& kernel = doc.at("kernel");
  model.kernel.kind = kernel_kind_from_name(kernel.at("kind").get<std::string>());
  model.kernel.gamma = kernel.at("gamma").get<double>();
  model.kernel.coef0 = kernel.at("coef0").get<double>();
  model.kernel.degree = kernel.at("degree").get<unsigned>();
  model.c = doc.at("c").get<double>();
  model.bias = doc.at("bias").get<double>();
  model.converged = doc.value("converged", true);
  model.dual_coef = doc.at("dual_coef").get<std::vector<double>>();
  const auto& sv = doc.at("support_vectors");
  model.support_vectors.rows = sv.at("rows").get<std::size_t>();
  model.support_vectors.dim = sv.at("dim").get<std::size_t>();
  model.support_vectors.values = sv.at("values").get<std::vector<double>>();
  if (model.support_vectors.values.size() !=
      model.support_vectors.rows * model.support_vectors.dim)
    fail(ErrorCode::kBadConfig, "svm json: support vector shape mismatch");
  if (model.dual_coef.size() != model.support_vectors.rows)
    fail(ErrorCode::kBadConfig, "svm json: dual_coef length mismatch");
  return model;
}

}  // namespace

void save_svm(const SvmModel& model, const std::filesystem::path& path) {
  atomic_write_file(path, svm_to_json(model).dump(2) + "\n");
}

SvmModel load_svm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBadConfig, path.string() + ": " + e.what());
  }
  return svm_from_json(doc);
}

void save_ovr(const OvRModel& model, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "etcml-ovr/1";
  doc["classes"] = model.classes;
  doc["models"] = nlohmann::json::array();
  for (const SvmModel& m : model.models) doc["models"].push_back(svm_to_json(m));
  atomic_write_file(path, doc.dump(2) + "\n");
}

OvRModel load_ovr(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBadConfig, path.string() + ": " + e.what());
  }
  OvRModel model;
  model.classes = doc.at("classes").get<std::vector<int>>();
  for (const auto& m : doc.at("models")) model.models.push_back(svm_from_json(m));
  if (model.classes.size() != model.models.size())
    fail(ErrorCode::kBadConfig, "ovr json: class/model count mismatch");
  return model;
}

}  // namespace etcml

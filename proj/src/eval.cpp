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

#include "etcml/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <set>

#include <json.hpp>

#include "etcml/cipher.hpp"
#include "etcml/error.hpp"
#include "etcml/fsio.hpp"
#include "etcml/rng.hpp"

namespace etcml {

const char* impostor_kind_name(ImpostorKind kind) {
  switch (kind) {
    case ImpostorKind::kOtherPersonSameKey: return "other-person-same-key";
    case ImpostorKind::kSamePersonOtherKey: return "same-person-other-key";
    case ImpostorKind::kOtherPersonOtherKey: return "other-person-other-key";
  }
  fail(ErrorCode::kInternal, "unknown impostor kind");
}

RocCurve sweep(const ScoreSet& scores, std::size_t n_thresholds) {
  if (scores.genuine.empty() || scores.impostor.empty())
    fail(ErrorCode::kEmptyInput, "sweep needs genuine and impostor scores");
  if (n_thresholds < 2)
    fail(ErrorCode::kInvalidArgument, "sweep needs at least 2 thresholds");
  for (double s : scores.genuine)
    if (!std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "non-finite score");
  for (double s : scores.impostor)
    if (!std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "non-finite score");

  double lo = scores.genuine.front(), hi = scores.genuine.front();
  for (double s : scores.genuine) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  for (double s : scores.impostor) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double eps = (hi - lo) > 0.0 ? (hi - lo) * 1e-6 : 1.0;
  lo -= eps;
  hi += eps;

  std::set<double> grid;
  for (std::size_t k = 0; k < n_thresholds; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n_thresholds - 1);
    grid.insert(lo + t * (hi - lo));
  }
  grid.insert(scores.genuine.begin(), scores.genuine.end());
  grid.insert(scores.impostor.begin(), scores.impostor.end());

  std::vector<double> genuine_sorted = scores.genuine;
  std::vector<double> impostor_sorted = scores.impostor;
  std::sort(genuine_sorted.begin(), genuine_sorted.end());
  std::sort(impostor_sorted.begin(), impostor_sorted.end());
  const double n_gen = static_cast<double>(genuine_sorted.size());
  const double n_imp = static_cast<double>(impostor_sorted.size());

  RocCurve curve;
  curve.thresholds.assign(grid.begin(), grid.end());
  curve.far.reserve(curve.thresholds.size());
  curve.frr.reserve(curve.thresholds.size());
  for (double threshold : curve.thresholds) {
    const auto below_gen =
        std::lower_bound(genuine_sorted.begin(), genuine_sorted.end(), threshold) -
        genuine_sorted.begin();
    const auto below_imp =
        std::lower_bound(impostor_sorted.begin(), impostor_sorted.end(), threshold) -
        impostor_sorted.begin();
    curve.frr.push_back(static_cast<double>(below_gen) / n_gen);
    curve.far.push_back(static_cast<double>(impostor_sorted.size() - below_imp) / n_imp);
  }
  return curve;
}

EerPoint eer(const RocCurve& curve) {
  const std::size_t n = curve.thresholds.size();
  if (n < 2 || curve.far.size() != n || curve.frr.size() != n)
    fail(ErrorCode::kInvalidArgument, "eer: malformed curve");

  // d = far - frr is non-increasing from +1-ish to -1-ish.
  // Exact-zero plateau first: midpoint.
  std::size_t first_zero = n, last_zero = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (curve.far[k] == curve.frr[k]) {
      if (first_zero == n) first_zero = k;
      last_zero = k;
    } else if (first_zero != n) {
      break;
    }
  }
  if (first_zero != n) {
    const std::size_t mid = (first_zero + last_zero) / 2;
    return {curve.far[mid], curve.thresholds[mid]};
  }

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d0 = curve.far[k] - curve.frr[k];
    const double d1 = curve.far[k + 1] - curve.frr[k + 1];
    if (d0 > 0.0 && d1 < 0.0) {
      const double t = d0 / (d0 - d1);
      const double far_t = curve.far[k] + t * (curve.far[k + 1] - curve.far[k]);
      const double frr_t = curve.frr[k] + t * (curve.frr[k + 1] - curve.frr[k]);
      const double threshold =
          curve.thresholds[k] + t * (curve.thresholds[k + 1] - curve.thresholds[k]);
      return {(far_t + frr_t) / 2.0, threshold};
    }
  }
  fail(ErrorCode::kInternal, "eer: curves do not cross (invalid curve)");
}

EtcKey client_key(std::uint64_t key_seed, std::size_t client) {
  return keygen(mix64(key_seed ^ domain::kClientKey ^
                      static_cast<std::uint64_t>(client)));
}

namespace {

std::size_t reduced_dim(const ExperimentConfig& cfg, std::size_t in_dim) {
  if (cfg.reducer == ReducerKind::kIdentity) return in_dim;
  if (!(cfg.ratio > 0.0 && cfg.ratio <= 1.0))
    fail(ErrorCode::kBadConfig, "reduction ratio must lie in (0, 1]");
  const auto out = static_cast<std::size_t>(
      std::llround(cfg.ratio * static_cast<double>(in_dim)));
  return std::max<std::size_t>(1, std::min(out, in_dim));
}

KernelSpec resolve_kernel(const ExperimentConfig& cfg, std::size_t dim) {
  KernelSpec spec = cfg.kernel;
  if (spec.kind != KernelKind::kLinear && spec.gamma == 0.0)
    spec.gamma = 1.0 / static_cast<double>(dim);
  return spec;
}

struct Pipeline {
  Reducer reducer;
  ZScoreStats stats;

  FeatureMatrix transform(const std::vector<GrayscaleImage>& images) const {
    return apply_zscore(apply_reducer(reducer, flatten_all(images)), stats);
  }
};

Pipeline fit_pipeline(const std::vector<GrayscaleImage>& train,
                      const ExperimentConfig& cfg) {
  const std::size_t in_dim = train.front().size();
  Pipeline pipeline;
  pipeline.reducer = fit_reducer(cfg.reducer, in_dim, reduced_dim(cfg, in_dim),
                                 cfg.reducer_seed);
  pipeline.stats = fit_zscore(apply_reducer(pipeline.reducer, flatten_all(train)));
  return pipeline;
}

std::vector<GrayscaleImage> encrypt_all(const std::vector<GrayscaleImage>& images,
                                        const EtcKey& key, std::size_t block) {
  std::vector<GrayscaleImage> out;
  out.reserve(images.size());
  for (const GrayscaleImage& image : images) out.push_back(encrypt(image, key, block));
  return out;
}

// Verification trials for condition 1: every (test image, identity model)
// pair; the matching pair is genuine, the rest impostor.
ScoreSet score_keycond1(const OvRModel& ovr, const FeatureMatrix& test,
                        const std::vector<int>& test_identity) {
  ScoreSet scores;
  for (std::size_t t = 0; t < test.rows; ++t) {
    const std::vector<double> s = ovr_scores(ovr, test.row(t));
    for (std::size_t m = 0; m < ovr.classes.size(); ++m) {
      if (ovr.classes[m] == test_identity[t]) {
        scores.genuine.push_back(s[m]);
      } else {
        scores.impostor.push_back(s[m]);
        scores.breakdown.push_back(ImpostorKind::kOtherPersonSameKey);
      }
    }
  }
  return scores;
}

BreakdownRates breakdown_at(const ScoreSet& scores, double threshold) {
  BreakdownRates rates;
  for (ImpostorKind kind :
       {ImpostorKind::kOtherPersonSameKey, ImpostorKind::kSamePersonOtherKey,
        ImpostorKind::kOtherPersonOtherKey}) {
    std::size_t count = 0, accepted = 0;
    for (std::size_t i = 0; i < scores.impostor.size(); ++i) {
      if (scores.breakdown[i] != kind) continue;
      ++count;
      if (scores.impostor[i] >= threshold) ++accepted;
    }
    if (count == 0) continue;
    rates.kinds.push_back(impostor_kind_name(kind));
    rates.counts.push_back(count);
    rates.accept_rates.push_back(static_cast<double>(accepted) /
                                 static_cast<double>(count));
  }
  return rates;
}

EvalReport finish_report(EvalReport report, const ExperimentConfig& cfg) {
  report.config = cfg;
  report.curves.plain = sweep(report.scores_plain, cfg.n_thresholds);
  report.curves.encrypted = sweep(report.scores_encrypted, cfg.n_thresholds);
  const EerPoint plain = eer(report.curves.plain);
  const EerPoint encrypted = eer(report.curves.encrypted);
  report.eer_plain = plain.eer;
  report.eer_encrypted = encrypted.eer;
  report.threshold_plain = plain.threshold;
  report.threshold_encrypted = encrypted.threshold;
  report.breakdown_encrypted = breakdown_at(report.scores_encrypted,
                                            encrypted.threshold);
  return report;
}

}  // namespace

EvalReport run_keycond1(const LabeledDataset& dataset, const ExperimentConfig& cfg) {
  validate(dataset);
  auto [train, test] = split_per_identity(dataset, cfg.split);
  const EtcKey key = keygen(cfg.key_seed);

  const std::vector<GrayscaleImage> enc_train = encrypt_all(train.images, key, cfg.block);
  const std::vector<GrayscaleImage> enc_test = encrypt_all(test.images, key, cfg.block);

  const Pipeline plain_pipeline = fit_pipeline(train.images, cfg);
  const Pipeline enc_pipeline = fit_pipeline(enc_train, cfg);

  const FeatureMatrix ztrain_p = plain_pipeline.transform(train.images);
  const FeatureMatrix ztest_p = plain_pipeline.transform(test.images);
  const FeatureMatrix ztrain_e = enc_pipeline.transform(enc_train);
  const FeatureMatrix ztest_e = enc_pipeline.transform(enc_test);

  const KernelSpec spec = resolve_kernel(cfg, ztrain_p.dim);
  const OvRModel ovr_p = train_one_vs_rest(ztrain_p, train.identity, cfg.train, spec);
  const OvRModel ovr_e = train_one_vs_rest(ztrain_e, train.identity, cfg.train, spec);

  EvalReport report;
  report.condition = 1;
  report.kernel = spec;
  report.reducer = cfg.reducer;
  report.ratio = cfg.ratio;
  report.block = cfg.block;
  report.scores_plain = score_keycond1(ovr_p, ztest_p, test.identity);
  report.scores_encrypted = score_keycond1(ovr_e, ztest_e, test.identity);
  return finish_report(std::move(report), cfg);
}

EvalReport run_keycond2(const LabeledDataset& dataset, const ExperimentConfig& cfg) {
  validate(dataset);
  if (cfg.n_clients < 2)
    fail(ErrorCode::kBadConfig, "key condition 2 needs at least 2 clients");

  auto [train, test] = split_per_identity(dataset, cfg.split);

  // Round-robin identity -> client unless the dataset assigns one.
  const auto client_of = [&cfg](const LabeledDataset& part, std::size_t i) {
    if (part.has_clients()) return static_cast<std::size_t>(part.client[i]);
    return static_cast<std::size_t>(part.identity[i]) % cfg.n_clients;
  };

  std::vector<EtcKey> keys(cfg.n_clients);
  for (std::size_t k = 0; k < cfg.n_clients; ++k) keys[k] = client_key(cfg.key_seed, k);

  std::vector<GrayscaleImage> enc_train(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    enc_train[i] = encrypt(train.images[i], keys[client_of(train, i)], cfg.block);

  // The reduction and z-score stage is the cloud's, fitted once on the
  // pooled encrypted training data; enrollment models are per client.
  const Pipeline plain_pipeline = fit_pipeline(train.images, cfg);
  const Pipeline enc_pipeline = fit_pipeline(enc_train, cfg);

  const FeatureMatrix ztrain_p = plain_pipeline.transform(train.images);
  const FeatureMatrix ztrain_e = enc_pipeline.transform(enc_train);

  const KernelSpec spec = resolve_kernel(cfg, ztrain_p.dim);

  // Each identity's model is trained on the owning client's training rows
  // only: its positives and negatives share one key.
  std::set<int> identity_set(train.identity.begin(), train.identity.end());
  std::vector<int> identities(identity_set.begin(), identity_set.end());
  std::vector<std::size_t> owner(identities.size(), 0);
  for (std::size_t m = 0; m < identities.size(); ++m) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train.identity[i] == identities[m]) {
        owner[m] = client_of(train, i);
        break;
      }
    }
  }

  // One model per identity, trained over the pooled cloud-side training
  // matrix: its positives are the owning client's encrypted images, its
  // negatives everything else the cloud holds (other keys included, so
  // the model learns to reject wrong-key presentations).
  const auto train_pooled = [&](const FeatureMatrix& ztrain) {
    std::vector<SvmModel> models(identities.size());
    const OvRModel pooled = train_one_vs_rest(ztrain, train.identity, cfg.train, spec);
    for (std::size_t m = 0; m < pooled.classes.size(); ++m) {
      const auto it = std::lower_bound(identities.begin(), identities.end(),
                                       pooled.classes[m]);
      models[static_cast<std::size_t>(it - identities.begin())] = pooled.models[m];
    }
    return models;
  };

  const std::vector<SvmModel> models_p = train_pooled(ztrain_p);
  const std::vector<SvmModel> models_e = train_pooled(ztrain_e);

  EvalReport report;
  report.condition = 2;
  report.kernel = spec;
  report.reducer = cfg.reducer;
  report.ratio = cfg.ratio;
  report.block = cfg.block;
  report.n_clients = cfg.n_clients;

  const auto model_index = [&identities](int identity) {
    const auto it = std::lower_bound(identities.begin(), identities.end(), identity);
    if (it == identities.end() || *it != identity)
      fail(ErrorCode::kInternal, "identity missing from enrollment");
    return static_cast<std::size_t>(it - identities.begin());
  };

  // Encrypted-domain trials. Each test image is presented under its own
  // client's key to every identity model (genuine + other-person trials)
  // and under every other client's key to its own model (same-person
  // wrong-key trials).
  for (std::size_t t = 0; t < test.size(); ++t) {
    const std::size_t own_client = client_of(test, t);
    const GrayscaleImage own_cipher = encrypt(test.images[t], keys[own_client], cfg.block);
    const FeatureVector own_features =
        apply_zscore(apply_reducer(enc_pipeline.reducer, flatten(own_cipher)),
                     enc_pipeline.stats);
    for (std::size_t m = 0; m < identities.size(); ++m) {
      const double s = decision_value(models_e[m], own_features);
      if (identities[m] == test.identity[t]) {
        report.scores_encrypted.genuine.push_back(s);
      } else {
        report.scores_encrypted.impostor.push_back(s);
        report.scores_encrypted.breakdown.push_back(
            owner[m] == own_client ? ImpostorKind::kOtherPersonSameKey
                                   : ImpostorKind::kOtherPersonOtherKey);
      }
    }
    const std::size_t own_model = model_index(test.identity[t]);
    for (std::size_t k = 0; k < cfg.n_clients; ++k) {
      if (k == own_client) continue;
      const GrayscaleImage other_cipher = encrypt(test.images[t], keys[k], cfg.block);
      const FeatureVector other_features =
          apply_zscore(apply_reducer(enc_pipeline.reducer, flatten(other_cipher)),
                       enc_pipeline.stats);
      report.scores_encrypted.impostor.push_back(
          decision_value(models_e[own_model], other_features));
      report.scores_encrypted.breakdown.push_back(ImpostorKind::kSamePersonOtherKey);
    }
  }

  // Plain-domain trials with the identical structure; "encrypting" with a
  // wrong key is a no-op on plain pixels, which is exactly why the plain
  // protocol cannot reject wrong-key presentations.
  const FeatureMatrix ztest_p = plain_pipeline.transform(test.images);
  for (std::size_t t = 0; t < test.size(); ++t) {
    const std::size_t own_client = client_of(test, t);
    double own_score = 0.0;
    for (std::size_t m = 0; m < identities.size(); ++m) {
      const double s = decision_value(models_p[m], ztest_p.row(t));
      if (identities[m] == test.identity[t]) {
        report.scores_plain.genuine.push_back(s);
        own_score = s;
      } else {
        report.scores_plain.impostor.push_back(s);
        report.scores_plain.breakdown.push_back(
            owner[m] == own_client ? ImpostorKind::kOtherPersonSameKey
                                   : ImpostorKind::kOtherPersonOtherKey);
      }
    }
    for (std::size_t k = 0; k < cfg.n_clients; ++k) {
      if (k == own_client) continue;
      report.scores_plain.impostor.push_back(own_score);
      report.scores_plain.breakdown.push_back(ImpostorKind::kSamePersonOtherKey);
    }
  }

  return finish_report(std::move(report), cfg);
}

namespace {

nlohmann::json curve_to_json(const RocCurve& curve) {
  return {{"thresholds", curve.thresholds}, {"far", curve.far}, {"frr", curve.frr}};
}

RocCurve curve_from_json(const nlohmann::json& doc) {
  RocCurve curve;
  curve.thresholds = doc.at("thresholds").get<std::vector<double>>();
  curve.far = doc.at("far").get<std::vector<double>>();
  curve.frr = doc.at("frr").get<std::vector<double>>();
  return curve;
}

void write_curve_csv(const RocCurve& curve, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "threshold,far,frr\n";
  out.precision(17);
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k)
    out << curve.thresholds[k] << "," << curve.far[k] << "," << curve.frr[k] << "\n";
  atomic_write_file(path, out.str());
}

}  // namespace

void emit_curve_csvs(const EvalReport& report, const std::filesystem::path& json_path) {
  std::filesystem::path base = json_path;
  base.replace_extension();
  write_curve_csv(report.curves.plain, base.string() + "_plain.csv");
  write_curve_csv(report.curves.encrypted, base.string() + "_encrypted.csv");
}

void emit_report(const EvalReport& report, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "etcml-report/1";
  doc["condition"] = report.condition;
  doc["kernel"] = {{"kind", kernel_kind_name(report.kernel.kind)},
                   {"gamma", report.kernel.gamma},
                   {"coef0", report.kernel.coef0},
                   {"degree", report.kernel.degree}};
  doc["reducer"] = reducer_kind_name(report.reducer);
  doc["ratio"] = report.ratio;
  doc["block"] = report.block;
  doc["n_clients"] = report.n_clients;
  doc["protocol"] = "ovr-decision-threshold";
  doc["config"] = {{"split_seed", report.config.split.seed},
                   {"train_fraction", report.config.split.train_fraction},
                   {"key_seed", report.config.key_seed},
                   {"reducer_seed", report.config.reducer_seed},
                   {"n_thresholds", report.config.n_thresholds},
                   {"c", report.config.train.c},
                   {"kkt_tol", report.config.train.kkt_tol}};
  doc["eer_plain"] = report.eer_plain;
  doc["eer_encrypted"] = report.eer_encrypted;
  doc["threshold_plain"] = report.threshold_plain;
  doc["threshold_encrypted"] = report.threshold_encrypted;
  doc["curve_plain"] = curve_to_json(report.curves.plain);
  doc["curve_encrypted"] = curve_to_json(report.curves.encrypted);
  doc["breakdown_encrypted"] = {{"kinds", report.breakdown_encrypted.kinds},
                                {"counts", report.breakdown_encrypted.counts},
                                {"accept_rates", report.breakdown_encrypted.accept_rates}};

  atomic_write_file(path, doc.dump(2) + "\n");
  emit_curve_csvs(report, path);
}

EvalReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBadConfig, path.string() + ": " + e.what());
  }
  EvalReport report;
  report.condition = doc.at("condition").get<int>();
  const auto& kernel = doc.at("kernel");
  report.kernel.kind = kernel_kind_from_name(kernel.at("kind").get<std::string>());
  report.kernel.gamma = kernel.at("gamma").get<double>();
  report.kernel.coef0 = kernel.at("coef0").get<double>();
  report.kernel.degree = kernel.at("degree").get<unsigned>();
  report.reducer = reducer_kind_from_name(doc.at("reducer").get<std::string>());
  report.ratio = doc.at("ratio").get<double>();
  report.block = doc.at("block").get<std::size_t>();
  report.n_clients = doc.at("n_clients").get<std::size_t>();
  report.eer_plain = doc.at("eer_plain").get<double>();
  report.eer_encrypted = doc.at("eer_encrypted").get<double>();
  report.threshold_plain = doc.at("threshold_plain").get<double>();
  report.threshold_encrypted = doc.at("threshold_encrypted").get<double>();
  report.curves.plain = curve_from_json(doc.at("curve_plain"));
  report.curves.encrypted = curve_from_json(doc.at("curve_encrypted"));
  return report;
}

}  // namespace etcml

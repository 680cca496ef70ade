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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line
// (SKIP for the dataset-gated one) and carries its tolerance in code.
// Usage: acceptance [criterion-number]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "etcml/cipher.hpp"
#include "etcml/dataset.hpp"
#include "etcml/eval.hpp"
#include "etcml/features.hpp"
#include "etcml/kernel.hpp"
#include "etcml/qp_oracle.hpp"
#include "etcml/rng.hpp"
#include "etcml/svm.hpp"

using namespace etcml;

namespace {

struct Failure {
  std::string detail;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw Failure{detail};
}

GrayscaleImage random_image(std::size_t w, std::size_t h, SplitMix64& rng) {
  GrayscaleImage image = make_image(w, h);
  for (auto& p : image.pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
  return image;
}

std::string format_double(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

// ---- criterion 1: cipher round trip ----

void criterion_round_trip() {
  SplitMix64 rng(10001);
  for (int i = 0; i < 100; ++i) {
    const GrayscaleImage image = random_image(32, 32, rng);
    const EtcKey key = keygen(rng.next());
    require(decrypt(encrypt(image, key, 8), key, 8) == image,
            "32x32 round trip failed at image " + std::to_string(i));
  }
  for (int i = 0; i < 100; ++i) {
    const GrayscaleImage image = random_image(64, 48, rng);
    const EtcKey key = keygen(rng.next());
    require(decrypt(encrypt(image, key, 8), key, 8) == image,
            "64x48 round trip failed at image " + std::to_string(i));
  }
}

// ---- criterion 2: induced-map soundness ----

void criterion_induced_map() {
  SplitMix64 rng(10002);
  for (int key_trial = 0; key_trial < 5; ++key_trial) {
    const EtcKey key = keygen(rng.next());
    const PixelMap map = induced_pixel_map(key, 32, 32, 8);
    for (int image_trial = 0; image_trial < 20; ++image_trial) {
      const GrayscaleImage image = random_image(32, 32, rng);
      const GrayscaleImage cipher = encrypt(image, key, 8);
      for (std::size_t j = 0; j < image.size(); ++j) {
        const int expected = map.flip[j] ? 255 - image.pixels[j] : image.pixels[j];
        require(cipher.pixels[map.perm[j]] == expected,
                "pixel map relation violated at index " + std::to_string(j));
      }
    }
  }
}

// ---- criterion 3: exact equivalence theorem ----

void criterion_equivalence() {
  const LabeledDataset data = synth_dataset(8, 5, 32, 32, 2.0, 10003);  // 40 images
  const EtcKey key = keygen(555);
  const SignedPermutation sp = to_signed_permutation(induced_pixel_map(key, 32, 32, 8));

  std::vector<GrayscaleImage> enc;
  for (const auto& image : data.images) enc.push_back(encrypt(image, key, 8));
  const FeatureMatrix plain = flatten_all(data.images);
  const FeatureMatrix cipher = flatten_all(enc);
  const ZScoreStats stats_p = fit_zscore(plain);
  const ZScoreStats stats_e = fit_zscore(cipher);
  const FeatureMatrix zp = apply_zscore(plain, stats_p);
  const FeatureMatrix ze = apply_zscore(cipher, stats_e);

  for (std::size_t i = 0; i < zp.rows; ++i) {
    const FeatureVector mapped =
        sp.apply(FeatureVector(zp.row(i).begin(), zp.row(i).end()));
    for (std::size_t j = 0; j < zp.dim; ++j) {
      const double a = ze.row(i)[j], b = mapped[j];
      const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
      require(std::fabs(a - b) <= 1e-12 * scale,
              "z-score vectors diverge at sample " + std::to_string(i) +
                  " coordinate " + std::to_string(j));
    }
  }

  for (KernelKind kind : {KernelKind::kLinear, KernelKind::kRbf}) {
    KernelSpec spec;
    spec.kind = kind;
    if (kind == KernelKind::kRbf) spec.gamma = 1.0 / static_cast<double>(zp.dim);
    const std::vector<double> gp = gram(spec, zp, zp);
    const std::vector<double> ge = gram(spec, ze, ze);
    double worst = 0.0;
    for (std::size_t k = 0; k < gp.size(); ++k)
      worst = std::max(worst, std::fabs(gp[k] - ge[k]));
    require(worst < 1e-9, std::string("max |Gram_enc - Gram_plain| = ") +
                              format_double(worst) + " for " +
                              kernel_kind_name(kind));
  }
}

// ---- criterion 4: SVM equivalence under key condition 1 ----

ExperimentConfig desk_config() {
  ExperimentConfig cfg;
  cfg.block = 8;
  cfg.kernel.kind = KernelKind::kLinear;
  cfg.train.c = 1.0;
  cfg.train.kkt_tol = 1e-8;
  cfg.split = {11, 0.5};
  cfg.key_seed = 21;
  cfg.reducer_seed = 31;
  cfg.n_thresholds = 512;
  return cfg;
}

void criterion_svm_equivalence() {
  const LabeledDataset data = synth_dataset(8, 20, 32, 32, 1.0, 10004);
  ExperimentConfig cfg = desk_config();
  cfg.reducer = ReducerKind::kIdentity;
  cfg.ratio = 1.0;
  const EvalReport report = run_keycond1(data, cfg);

  require(report.scores_plain.genuine.size() == report.scores_encrypted.genuine.size(),
          "genuine trial counts differ");
  for (std::size_t i = 0; i < report.scores_plain.genuine.size(); ++i)
    require(std::fabs(report.scores_plain.genuine[i] -
                      report.scores_encrypted.genuine[i]) < 1e-6,
            "genuine decision values diverge at trial " + std::to_string(i));
  for (std::size_t i = 0; i < report.scores_plain.impostor.size(); ++i)
    require(std::fabs(report.scores_plain.impostor[i] -
                      report.scores_encrypted.impostor[i]) < 1e-6,
            "impostor decision values diverge at trial " + std::to_string(i));

  require(report.curves.plain.far.size() == report.curves.encrypted.far.size(),
          "curve lengths differ");
  for (std::size_t k = 0; k < report.curves.plain.far.size(); ++k) {
    require(std::fabs(report.curves.plain.far[k] - report.curves.encrypted.far[k]) <
                1e-9,
            "FAR curves diverge at threshold " + std::to_string(k));
    require(std::fabs(report.curves.plain.frr[k] - report.curves.encrypted.frr[k]) <
                1e-9,
            "FRR curves diverge at threshold " + std::to_string(k));
  }
  require(report.eer_plain == report.eer_encrypted,
          "EER difference: plain " + format_double(report.eer_plain) +
              " encrypted " + format_double(report.eer_encrypted));
}

// ---- criterion 5: subsample pull-back ----

void criterion_pull_back() {
  const LabeledDataset data = synth_dataset(8, 20, 32, 32, 1.0, 10005);
  for (double ratio : {0.25, 0.0625}) {
    ExperimentConfig cfg = desk_config();
    cfg.reducer = ReducerKind::kSubsample;
    cfg.ratio = ratio;
    const EvalReport enc_report = run_keycond1(data, cfg);

    // Plain-domain rerun on the pulled-back coordinate set: reconstruct
    // the encrypted-domain reducer from its seed, pull its indices back
    // through the pixel map, and run the whole plain pipeline on them.
    auto [train, test] = split_per_identity(data, cfg.split);
    const std::size_t in_dim = 32 * 32;
    const auto out_dim = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(in_dim)));
    const Reducer enc_reducer =
        fit_reducer(ReducerKind::kSubsample, in_dim, out_dim, cfg.reducer_seed);
    const PixelMap map = induced_pixel_map(keygen(cfg.key_seed), 32, 32, cfg.block);
    const Reducer plain_reducer = subsample_reducer_from_indices(
        in_dim, pull_back_indices(enc_reducer, map));

    const FeatureMatrix train_red = apply_reducer(plain_reducer, flatten_all(train.images));
    const ZScoreStats stats = fit_zscore(train_red);
    const FeatureMatrix ztrain = apply_zscore(train_red, stats);
    const FeatureMatrix ztest =
        apply_zscore(apply_reducer(plain_reducer, flatten_all(test.images)), stats);

    KernelSpec spec = cfg.kernel;  // linear: no gamma to resolve
    const OvRModel ovr = train_one_vs_rest(ztrain, train.identity, cfg.train, spec);
    ScoreSet scores;
    for (std::size_t t = 0; t < ztest.rows; ++t) {
      const std::vector<double> s = ovr_scores(ovr, ztest.row(t));
      for (std::size_t m = 0; m < ovr.classes.size(); ++m) {
        if (ovr.classes[m] == test.identity[t]) scores.genuine.push_back(s[m]);
        else {
          scores.impostor.push_back(s[m]);
          scores.breakdown.push_back(ImpostorKind::kOtherPersonSameKey);
        }
      }
    }
    const double plain_eer = eer(sweep(scores, cfg.n_thresholds)).eer;
    require(plain_eer == enc_report.eer_encrypted,
            "ratio " + format_double(ratio) + ": pulled-back plain EER " +
                format_double(plain_eer) + " != encrypted EER " +
                format_double(enc_report.eer_encrypted));
  }
}

// ---- criterion 6: SMO vs exhaustive oracle ----

double max_kkt_residual(const SvmModel& model, const FeatureMatrix& x,
                        const std::vector<int>& y, double c) {
  std::vector<double> alpha(x.rows, 0.0);
  for (std::size_t s = 0; s < model.sv_indices.size(); ++s)
    alpha[model.sv_indices[s]] = std::fabs(model.dual_coef[s]);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double margin = static_cast<double>(y[i]) * decision_value(model, x.row(i));
    double residual = 0.0;
    const double eps = 1e-9 * c;
    if (alpha[i] <= eps) residual = std::max(0.0, 1.0 - margin);
    else if (alpha[i] >= c - eps) residual = std::max(0.0, margin - 1.0);
    else residual = std::fabs(margin - 1.0);
    worst = std::max(worst, residual);
  }
  return worst;
}

void criterion_smo_oracle() {
  SplitMix64 rng(10006);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.next_below(4);  // 3..6 samples
    FeatureMatrix x;
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x.push_row({rng.next_gaussian(), rng.next_gaussian()});
      y[i] = rng.next() & 1 ? 1 : -1;
    }
    bool pos = false, neg = false;
    for (int label : y) (label == 1 ? pos : neg) = true;
    if (!pos) y[0] = 1;
    if (!neg) y[0] = -1;

    KernelSpec spec;
    if (trial % 2 == 0) {
      spec.kind = KernelKind::kLinear;
    } else {
      spec.kind = KernelKind::kRbf;
      spec.gamma = 0.5 + rng.next_unit();
    }
    TrainConfig cfg;
    cfg.c = trial % 3 == 0 ? 0.5 : 2.0;
    cfg.kkt_tol = 1e-9;

    SmoSummary summary;
    const SvmModel model = train_binary_smo(x, y, cfg, spec, &summary);
    const QpSolution reference = qp_oracle(x, y, cfg.c, spec);

    require(std::fabs(summary.dual_objective - reference.objective) <= 1e-6,
            "trial " + std::to_string(trial) + ": SMO objective " +
                format_double(summary.dual_objective) + " vs oracle " +
                format_double(reference.objective));
    require(max_kkt_residual(model, x, y, cfg.c) <= 1e-5,
            "trial " + std::to_string(trial) + ": KKT residual above 1e-5");

    double balance = 0.0;
    for (double coef : model.dual_coef) {
      require(std::fabs(coef) <= cfg.c + 1e-8,
              "trial " + std::to_string(trial) + ": box constraint violated");
      balance += coef;
    }
    require(std::fabs(balance) <= 1e-8,
            "trial " + std::to_string(trial) + ": equality constraint violated");
  }
}

// ---- criterion 7: EER vs exhaustive-threshold oracle ----

void criterion_eer_oracle() {
  SplitMix64 rng(10007);
  for (int trial = 0; trial < 200; ++trial) {
    ScoreSet scores;
    const std::size_t n_gen = 10 + rng.next_below(60);
    const std::size_t n_imp = 10 + rng.next_below(60);
    const double gap = trial % 4 == 0 ? 0.0 : 0.5 + rng.next_unit();
    for (std::size_t i = 0; i < n_gen; ++i)
      scores.genuine.push_back(gap + rng.next_gaussian());
    for (std::size_t i = 0; i < n_imp; ++i) {
      scores.impostor.push_back(rng.next_gaussian());
      scores.breakdown.push_back(ImpostorKind::kOtherPersonSameKey);
    }
    const double value = eer(sweep(scores, 512)).eer;

    double best_gap = 2.0, oracle = 0.5;
    std::vector<double> all = scores.genuine;
    all.insert(all.end(), scores.impostor.begin(), scores.impostor.end());
    for (double threshold : all) {
      std::size_t fr = 0, fa = 0;
      for (double g : scores.genuine) fr += g < threshold;
      for (double s : scores.impostor) fa += s >= threshold;
      const double frr = static_cast<double>(fr) / static_cast<double>(n_gen);
      const double far = static_cast<double>(fa) / static_cast<double>(n_imp);
      if (std::fabs(far - frr) < best_gap) {
        best_gap = std::fabs(far - frr);
        oracle = (far + frr) / 2.0;
      }
    }
    const double step = std::max(1.0 / static_cast<double>(n_gen),
                                 1.0 / static_cast<double>(n_imp));
    require(std::fabs(value - oracle) <= step + 1e-12,
            "trial " + std::to_string(trial) + ": EER " + format_double(value) +
                " vs oracle " + format_double(oracle) + " exceeds one grid step " +
                format_double(step));
  }
}

// ---- criterion 8: key condition 2 ordering ----

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

double accept_rate(const ScoreSet& scores, ImpostorKind kind, double threshold) {
  std::size_t count = 0, accepted = 0;
  for (std::size_t i = 0; i < scores.impostor.size(); ++i) {
    if (scores.breakdown[i] != kind) continue;
    ++count;
    if (scores.impostor[i] >= threshold) ++accepted;
  }
  return count == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(count);
}

void criterion_keycond2() {
  std::vector<double> eer_cond1, eer_cond2, spok_rates, opsk_rates;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const LabeledDataset data = synth_dataset(16, 20, 32, 32, 0.65, 20000 + seed);
    ExperimentConfig cfg = desk_config();
    cfg.reducer = ReducerKind::kSubsample;
    cfg.ratio = 0.25;
    cfg.kernel.kind = KernelKind::kRbf;
    cfg.kernel.gamma = 1.0 / 64.0;  // 4/dim at the reduced dimension
    cfg.split.seed = 100 + seed;
    cfg.key_seed = 200 + seed;
    cfg.reducer_seed = 300 + seed;
    cfg.n_clients = 4;

    const EvalReport cond1 = run_keycond1(data, cfg);
    const EvalReport cond2 = run_keycond2(data, cfg);
    eer_cond1.push_back(cond1.eer_encrypted);
    eer_cond2.push_back(cond2.eer_encrypted);

    // Acceptance rates of the two impostor categories at the condition-1
    // encrypted EER threshold.
    const double theta = cond1.threshold_encrypted;
    spok_rates.push_back(
        accept_rate(cond2.scores_encrypted, ImpostorKind::kSamePersonOtherKey, theta));
    opsk_rates.push_back(
        accept_rate(cond2.scores_encrypted, ImpostorKind::kOtherPersonSameKey, theta));
  }
  require(median(eer_cond2) <= median(eer_cond1),
          "median EER cond2 " + format_double(median(eer_cond2)) +
              " > median EER cond1 " + format_double(median(eer_cond1)));
  require(median(spok_rates) <= median(opsk_rates),
          "same-person-other-key accept rate " + format_double(median(spok_rates)) +
              " > other-person-same-key accept rate " +
              format_double(median(opsk_rates)));
}

// ---- criterion 9: Extended Yale B reproduction (dataset-gated) ----

// The tabulated values use other-person impostor trials; the spec-mandated
// trial mix additionally pools wrong-key presentations of the same person,
// so the table comparison filters to the other-person categories while the
// report retains the full pool.
double other_person_eer(const ScoreSet& scores, std::size_t n_thresholds) {
  ScoreSet filtered;
  filtered.genuine = scores.genuine;
  for (std::size_t i = 0; i < scores.impostor.size(); ++i)
    if (scores.breakdown[i] != ImpostorKind::kSamePersonOtherKey) {
      filtered.impostor.push_back(scores.impostor[i]);
      filtered.breakdown.push_back(scores.breakdown[i]);
    }
  return eer(sweep(filtered, n_thresholds)).eer;
}

void criterion_yaleb() {
  const char* dir = std::getenv("ETCML_YALEB_DIR");
  if (dir == nullptr || *dir == '\0')
    throw std::string("Extended Yale B not supplied; set ETCML_YALEB_DIR to run");

  const LabeledDataset data = load_dataset_dir(dir);
  ExperimentConfig cfg;
  cfg.block = 8;
  cfg.reducer = ReducerKind::kSubsample;
  cfg.ratio = 1.0 / 20.0;
  cfg.split = {1, 0.5};
  cfg.key_seed = 2;
  cfg.reducer_seed = 3;
  cfg.n_thresholds = 512;
  cfg.n_clients = data.identity_names.size();  // one key per person

  cfg.kernel.kind = KernelKind::kLinear;
  const EvalReport linear = run_keycond2(data, cfg);
  const double linear_plain = other_person_eer(linear.scores_plain, cfg.n_thresholds);
  const double linear_enc = other_person_eer(linear.scores_encrypted, cfg.n_thresholds);
  std::printf("  yaleb linear 1/20: not-encrypted EER %.6f (table 0.0223), "
              "encrypted EER %.6f (table 0.000744)\n",
              linear_plain, linear_enc);
  require(std::fabs(linear_plain - 0.0223) <= 0.01,
          "linear not-encrypted EER " + format_double(linear_plain) +
              " outside 0.0223 +/- 0.01");
  require(linear_enc < 0.005,
          "linear encrypted EER " + format_double(linear_enc) + " >= 0.005");

  cfg.kernel.kind = KernelKind::kRbf;
  cfg.kernel.gamma = 0.0;  // 1/dim
  const EvalReport rbf = run_keycond2(data, cfg);
  const double rbf_plain = other_person_eer(rbf.scores_plain, cfg.n_thresholds);
  std::printf("  yaleb rbf 1/20: not-encrypted EER %.6f (table 0.0504)\n", rbf_plain);
  require(std::fabs(rbf_plain - 0.0504) <= 0.015,
          "rbf not-encrypted EER " + format_double(rbf_plain) +
              " outside 0.0504 +/- 0.015");
}

struct Criterion {
  int id;
  const char* name;
  double time_budget_seconds;
  std::function<void()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "cipher round trip, 100 random images per geometry", 1.0,
       criterion_round_trip},
      {2, "induced pixel map soundness, 5 keys x 20 images", 1.0,
       criterion_induced_map},
      {3, "exact equivalence of z-scores and Gram matrices", 5.0,
       criterion_equivalence},
      {4, "SVM equivalence under key condition 1, identity reducer", 60.0,
       criterion_svm_equivalence},
      {5, "subsample pull-back EER equality, ratios 1/4 and 1/16", 60.0,
       criterion_pull_back},
      {6, "SMO agrees with exhaustive QP oracle on 50 tiny problems", 10.0,
       criterion_smo_oracle},
      {7, "interpolated EER within one grid step of oracle, 200 sets", 5.0,
       criterion_eer_oracle},
      {8, "key condition 2 outperforms condition 1 over 5 seeds", 300.0,
       criterion_keycond2},
      {9, "Extended Yale B table reproduction (dataset-gated)", 3600.0,
       criterion_yaleb},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run();
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      if (elapsed > criterion.time_budget_seconds) {
        std::printf("FAIL criterion %d: %s (%.2fs exceeds %.0fs budget)\n",
                    criterion.id, criterion.name, elapsed,
                    criterion.time_budget_seconds);
        ++failures;
      } else {
        std::printf("PASS criterion %d: %s (%.2fs)\n", criterion.id, criterion.name,
                    elapsed);
      }
    } catch (const Failure& failure) {
      std::printf("FAIL criterion %d: %s — %s\n", criterion.id, criterion.name,
                  failure.detail.c_str());
      ++failures;
    } catch (const std::string& skip) {
      std::printf("SKIP criterion %d: %s — %s\n", criterion.id, criterion.name,
                  skip.c_str());
    } catch (const std::exception& e) {
      std::printf("FAIL criterion %d: %s — unexpected error: %s\n", criterion.id,
                  criterion.name, e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

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

#include "etcml/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "etcml/cipher.hpp"
#include "etcml/dataset.hpp"
#include "etcml/error.hpp"
#include "etcml/fsio.hpp"
#include "etcml/eval.hpp"
#include "etcml/features.hpp"
#include "etcml/netpbm.hpp"
#include "etcml/qp_oracle.hpp"
#include "etcml/rng.hpp"
#include "etcml/svm.hpp"

namespace etcml {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitInvariantFailure = 2;

struct EvaluateOptions {
  std::string dataset_dir;
  std::string out_dir = ".";
  std::string config_file;
  int condition = 1;
  std::string reducer = "subsample";
  std::vector<double> ratios = {0.25};
  std::string kernel = "linear";
  double gamma = 0.0;
  double c = 1.0;
  std::uint64_t seed = 1;
  std::size_t block = 8;
  std::size_t clients = 4;
};

// Config file mirrors ExperimentConfig; explicitly-passed flags win.
void apply_config_file(const std::string& path, EvaluateOptions& opt,
                       const CLI::App* cmd) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open config " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBadConfig, path + ": " + e.what());
  }
  const auto flag_given = [cmd](const std::string& name) {
    return cmd->count(name) > 0;
  };
  if (doc.contains("condition") && !flag_given("--condition"))
    opt.condition = doc["condition"].get<int>();
  if (doc.contains("reducer") && !flag_given("--reducer"))
    opt.reducer = doc["reducer"].get<std::string>();
  if (doc.contains("ratios") && !flag_given("--ratio"))
    opt.ratios = doc["ratios"].get<std::vector<double>>();
  if (doc.contains("kernel") && !flag_given("--kernel"))
    opt.kernel = doc["kernel"].get<std::string>();
  if (doc.contains("gamma") && !flag_given("--gamma"))
    opt.gamma = doc["gamma"].get<double>();
  if (doc.contains("c") && !flag_given("--c")) opt.c = doc["c"].get<double>();
  if (doc.contains("seed") && !flag_given("--seed"))
    opt.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("block") && !flag_given("--block"))
    opt.block = doc["block"].get<std::size_t>();
  if (doc.contains("clients") && !flag_given("--clients"))
    opt.clients = doc["clients"].get<std::size_t>();
  if (doc.contains("dataset_dir") && !flag_given("--dataset-dir"))
    opt.dataset_dir = doc["dataset_dir"].get<std::string>();
}

LabeledDataset evaluate_dataset(const EvaluateOptions& opt) {
  if (!opt.dataset_dir.empty()) return load_dataset_dir(opt.dataset_dir);
  // Desk-scale default when no directory is supplied.
  return synth_dataset(8, 20, 32, 32, 1.0, opt.seed);
}

int cmd_evaluate(const EvaluateOptions& opt) {
  LabeledDataset dataset = evaluate_dataset(opt);
  fs::create_directories(opt.out_dir);

  for (double ratio : opt.ratios) {
    ExperimentConfig cfg;
    cfg.block = opt.block;
    cfg.reducer = reducer_kind_from_name(opt.reducer);
    cfg.ratio = ratio;
    cfg.kernel.kind = kernel_kind_from_name(opt.kernel);
    cfg.kernel.gamma = opt.gamma;
    cfg.train.c = opt.c;
    cfg.split.seed = opt.seed;
    cfg.key_seed = opt.seed;
    cfg.reducer_seed = opt.seed;
    cfg.n_clients = opt.clients;

    EvalReport report = opt.condition == 1 ? run_keycond1(dataset, cfg)
                                           : run_keycond2(dataset, cfg);
    char name[128];
    std::snprintf(name, sizeof(name), "report_cond%d_%s_r%g.json", opt.condition,
                  opt.kernel.c_str(), ratio);
    const fs::path out = fs::path(opt.out_dir) / name;
    emit_report(report, out);
    std::cout << "condition " << opt.condition << " kernel " << opt.kernel
              << " ratio " << ratio << ": eer_plain=" << report.eer_plain
              << " eer_encrypted=" << report.eer_encrypted << " -> " << out.string()
              << "\n";
  }
  return kExitOk;
}

// ---- verify: machine-checkable invariants, desk scale ----

struct VerifyFailure {
  std::string invariant;
};

void check(bool ok, const std::string& invariant) {
  if (!ok) throw VerifyFailure{invariant};
}

GrayscaleImage random_image(std::size_t w, std::size_t h, SplitMix64& rng) {
  GrayscaleImage image = make_image(w, h);
  for (auto& p : image.pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
  return image;
}

void verify_cipher_round_trip() {
  SplitMix64 rng(2026);
  for (int i = 0; i < 25; ++i) {
    const GrayscaleImage image = random_image(32, 32, rng);
    const EtcKey key = keygen(rng.next());
    check(decrypt(encrypt(image, key, 8), key, 8) == image,
          "cipher-round-trip: decrypt(encrypt(I)) == I");
  }
}

void verify_induced_map() {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const EtcKey key = keygen(rng.next());
    const GrayscaleImage image = random_image(24, 16, rng);
    const GrayscaleImage cipher = encrypt(image, key, 8);
    const PixelMap map = induced_pixel_map(key, 24, 16, 8);
    for (std::size_t j = 0; j < image.size(); ++j) {
      const int expected = map.flip[j] ? 255 - image.pixels[j] : image.pixels[j];
      check(cipher.pixels[map.perm[j]] == expected,
            "induced-map: defining relation vs encrypt");
    }
  }
}

void verify_zscore_equivalence() {
  const LabeledDataset data = synth_dataset(4, 6, 16, 16, 2.0, 7);
  const EtcKey key = keygen(99);
  const PixelMap map = induced_pixel_map(key, 16, 16, 8);
  const SignedPermutation sp = to_signed_permutation(map);

  std::vector<GrayscaleImage> enc;
  for (const auto& image : data.images) enc.push_back(encrypt(image, key, 8));
  const FeatureMatrix plain = flatten_all(data.images);
  const FeatureMatrix cipher = flatten_all(enc);
  const ZScoreStats stats_p = fit_zscore(plain);
  const ZScoreStats stats_e = fit_zscore(cipher);

  for (std::size_t i = 0; i < plain.rows; ++i) {
    const FeatureVector zp = apply_zscore(
        FeatureVector(plain.row(i).begin(), plain.row(i).end()), stats_p);
    const FeatureVector ze = apply_zscore(
        FeatureVector(cipher.row(i).begin(), cipher.row(i).end()), stats_e);
    const FeatureVector mapped = sp.apply(zp);
    for (std::size_t j = 0; j < ze.size(); ++j) {
      const double scale = std::max({1.0, std::fabs(ze[j]), std::fabs(mapped[j])});
      check(std::fabs(ze[j] - mapped[j]) <= 1e-12 * scale,
            "zscore-equivalence: z_enc == S.P.z_plain");
    }
  }

  const FeatureMatrix zp = apply_zscore(plain, stats_p);
  const FeatureMatrix ze = apply_zscore(cipher, stats_e);
  for (KernelKind kind : {KernelKind::kLinear, KernelKind::kRbf}) {
    KernelSpec spec;
    spec.kind = kind;
    const std::vector<double> gp = gram(spec, zp, zp);
    const std::vector<double> ge = gram(spec, ze, ze);
    for (std::size_t k = 0; k < gp.size(); ++k)
      check(std::fabs(gp[k] - ge[k]) < 1e-9,
            "gram-equivalence: plain and encrypted Gram matrices agree");
  }
}

void verify_smo_against_oracle() {
  SplitMix64 rng(5150);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + rng.next_below(3);
    FeatureMatrix x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_row({rng.next_gaussian(), rng.next_gaussian()});
      y.push_back(i % 2 == 0 ? 1 : -1);
    }
    KernelSpec spec;
    spec.kind = trial % 2 == 0 ? KernelKind::kLinear : KernelKind::kRbf;
    spec.gamma = 0.5;
    TrainConfig cfg;
    cfg.c = 1.0;
    cfg.kkt_tol = 1e-9;
    SmoSummary summary;
    (void)train_binary_smo(x, y, cfg, spec, &summary);
    const QpSolution reference = qp_oracle(x, y, cfg.c, spec);
    check(std::fabs(summary.dual_objective - reference.objective) <= 1e-6,
          "smo-oracle: dual objective matches exhaustive reference");
  }
}

void verify_eer_oracle() {
  SplitMix64 rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    ScoreSet scores;
    const std::size_t n_gen = 10 + rng.next_below(40);
    const std::size_t n_imp = 10 + rng.next_below(40);
    for (std::size_t i = 0; i < n_gen; ++i)
      scores.genuine.push_back(1.0 + rng.next_gaussian());
    for (std::size_t i = 0; i < n_imp; ++i) {
      scores.impostor.push_back(rng.next_gaussian());
      scores.breakdown.push_back(ImpostorKind::kOtherPersonSameKey);
    }
    const RocCurve curve = sweep(scores, 256);
    const double value = eer(curve).eer;

    // Exhaustive oracle: best |FAR-FRR| over every candidate threshold.
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
    check(std::fabs(value - oracle) <= step + 1e-12,
          "eer-oracle: interpolated EER within one grid step of exhaustive search");
  }
}

int cmd_verify() {
  const struct {
    const char* name;
    void (*run)();
  } suites[] = {
      {"cipher-round-trip", verify_cipher_round_trip},
      {"induced-map", verify_induced_map},
      {"zscore-equivalence", verify_zscore_equivalence},
      {"smo-oracle", verify_smo_against_oracle},
      {"eer-oracle", verify_eer_oracle},
  };
  for (const auto& suite : suites) {
    try {
      suite.run();
      std::cout << "PASS " << suite.name << "\n";
    } catch (const VerifyFailure& failure) {
      std::cout << "FAIL " << suite.name << ": " << failure.invariant << "\n";
      return kExitInvariantFailure;
    }
  }
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"EtC image encryption with exact-equivalence kernel learning"};
  app.require_subcommand(1);

  // keygen
  auto* keygen_cmd = app.add_subcommand("keygen", "Generate a key file");
  std::optional<std::uint64_t> keygen_seed;
  std::string keygen_out = "key.json";
  std::size_t keygen_block = 8;
  keygen_cmd->add_option("--seed", keygen_seed, "Master seed (omit for system randomness)");
  keygen_cmd->add_option("--out", keygen_out, "Output key file");
  keygen_cmd->add_option("--block", keygen_block, "Block size recorded in the key file");

  // encrypt / decrypt
  auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a PGM image");
  auto* decrypt_cmd = app.add_subcommand("decrypt", "Decrypt a PGM image");
  std::string xform_key, xform_in, xform_out;
  std::size_t xform_block = 0;
  for (auto* cmd : {encrypt_cmd, decrypt_cmd}) {
    cmd->add_option("--key", xform_key, "Key file")->required();
    cmd->add_option("--in", xform_in, "Input PGM")->required();
    cmd->add_option("--out", xform_out, "Output PGM")->required();
    cmd->add_option("--block", xform_block, "Override the key file's block size");
  }

  // prepare
  auto* prepare_cmd = app.add_subcommand("prepare", "Split a dataset and write a manifest");
  std::string prepare_dir, prepare_out = "split.json";
  std::uint64_t prepare_seed = 1;
  double prepare_fraction = 0.5;
  prepare_cmd->add_option("--dataset-dir", prepare_dir, "Dataset root")->required();
  prepare_cmd->add_option("--out", prepare_out, "Manifest path");
  prepare_cmd->add_option("--seed", prepare_seed, "Split seed");
  prepare_cmd->add_option("--train-fraction", prepare_fraction, "Training share in (0,1)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a one-vs-rest SVM");
  std::string train_dir, train_key, train_out = "model.json";
  std::string train_reducer = "identity", train_kernel = "linear";
  double train_ratio = 1.0, train_gamma = 0.0, train_c = 1.0;
  std::uint64_t train_seed = 1;
  train_cmd->add_option("--dataset-dir", train_dir, "Dataset root")->required();
  train_cmd->add_option("--key", train_key, "Encrypt with this key file before training");
  train_cmd->add_option("--out", train_out, "Model output path");
  train_cmd->add_option("--reducer", train_reducer, "identity|subsample|gaussian");
  train_cmd->add_option("--ratio", train_ratio, "Reduction ratio in (0,1]");
  train_cmd->add_option("--kernel", train_kernel, "linear|rbf|poly");
  train_cmd->add_option("--gamma", train_gamma, "Kernel gamma (0 = 1/dim)");
  train_cmd->add_option("--c", train_c, "Soft-margin C");
  train_cmd->add_option("--seed", train_seed, "Reducer seed");

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run a key-condition experiment");
  EvaluateOptions evaluate_opt;
  evaluate_cmd->add_option("--dataset-dir", evaluate_opt.dataset_dir,
                           "Dataset root (default: built-in synthetic faces)");
  evaluate_cmd->add_option("--out-dir", evaluate_opt.out_dir, "Report directory");
  evaluate_cmd->add_option("--config", evaluate_opt.config_file, "JSON config file");
  evaluate_cmd->add_option("--condition", evaluate_opt.condition, "1 or 2")
      ->check(CLI::IsMember({1, 2}));
  evaluate_cmd->add_option("--reducer", evaluate_opt.reducer, "identity|subsample|gaussian");
  evaluate_cmd->add_option("--ratio", evaluate_opt.ratios, "Reduction ratio(s)");
  evaluate_cmd->add_option("--kernel", evaluate_opt.kernel, "linear|rbf|poly");
  evaluate_cmd->add_option("--gamma", evaluate_opt.gamma, "Kernel gamma (0 = 1/dim)");
  evaluate_cmd->add_option("--c", evaluate_opt.c, "Soft-margin C");
  evaluate_cmd->add_option("--seed", evaluate_opt.seed, "Master seed (split/keys/reducer)");
  evaluate_cmd->add_option("--block", evaluate_opt.block, "Cipher block size");
  evaluate_cmd->add_option("--clients", evaluate_opt.clients, "Client count (condition 2)");

  // verify
  app.add_subcommand("verify", "Run the invariant suites");

  // report
  auto* report_cmd = app.add_subcommand("report", "Re-emit curve CSVs from a report JSON");
  std::string report_in, report_out_dir = ".";
  report_cmd->add_option("--in", report_in, "Report JSON")->required();
  report_cmd->add_option("--out-dir", report_out_dir, "CSV output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help and friends
      app.exit(e);
      return kExitOk;
    }
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return kExitUserError;
  }

  if (keygen_cmd->parsed()) {
    const EtcKey key = keygen_seed ? keygen(*keygen_seed) : keygen_random();
    save_key(key, keygen_block, keygen_out);
    std::cout << "wrote " << keygen_out << "\n";
    return kExitOk;
  }
  if (encrypt_cmd->parsed() || decrypt_cmd->parsed()) {
    auto [key, key_block] = load_key(xform_key);
    const std::size_t block = xform_block != 0 ? xform_block : key_block;
    // P6 input to encrypt goes through the YCbCr plane concatenation.
    const GrayscaleImage input = encrypt_cmd->parsed()
                                     ? read_image_as_grayscale(xform_in)
                                     : read_pgm(xform_in);
    const GrayscaleImage output = encrypt_cmd->parsed() ? encrypt(input, key, block)
                                                        : decrypt(input, key, block);
    write_pgm(output, xform_out);
    std::cout << "wrote " << xform_out << "\n";
    return kExitOk;
  }
  if (prepare_cmd->parsed()) {
    const LabeledDataset dataset = load_dataset_dir(prepare_dir);
    SplitSpec spec{prepare_seed, prepare_fraction};
    auto [train, test] = split_per_identity(dataset, spec);
    write_split_manifest(train, test, spec, prepare_out);
    std::cout << "wrote " << prepare_out << " (" << train.size() << " train, "
              << test.size() << " test)\n";
    return kExitOk;
  }
  if (train_cmd->parsed()) {
    LabeledDataset dataset = load_dataset_dir(train_dir);
    std::vector<GrayscaleImage> images = dataset.images;
    if (!train_key.empty()) {
      auto [key, key_block] = load_key(train_key);
      for (auto& image : images) image = encrypt(image, key, key_block);
    }
    const FeatureMatrix raw = flatten_all(images);
    const auto out_dim = train_reducer == "identity"
                             ? raw.dim
                             : std::max<std::size_t>(
                                   1, static_cast<std::size_t>(std::llround(
                                          train_ratio * static_cast<double>(raw.dim))));
    const Reducer reducer =
        fit_reducer(reducer_kind_from_name(train_reducer), raw.dim, out_dim, train_seed);
    const FeatureMatrix reduced = apply_reducer(reducer, raw);
    const ZScoreStats stats = fit_zscore(reduced);
    const FeatureMatrix z = apply_zscore(reduced, stats);
    KernelSpec spec;
    spec.kind = kernel_kind_from_name(train_kernel);
    spec.gamma = train_gamma > 0.0 ? train_gamma : 1.0 / static_cast<double>(z.dim);
    TrainConfig cfg;
    cfg.c = train_c;
    const OvRModel model = train_one_vs_rest(z, dataset.identity, cfg, spec);
    save_ovr(model, train_out);
    fs::path aux = train_out;
    aux.replace_extension();
    atomic_write_file(aux.string() + "_reducer.json", reducer_to_json(reducer) + "\n");
    atomic_write_file(aux.string() + "_zscore.json", zscore_to_json(stats) + "\n");
    std::cout << "wrote " << train_out << "\n";
    return kExitOk;
  }
  if (evaluate_cmd->parsed()) {
    if (!evaluate_opt.config_file.empty())
      apply_config_file(evaluate_opt.config_file, evaluate_opt, evaluate_cmd);
    return cmd_evaluate(evaluate_opt);
  }
  if (report_cmd->parsed()) {
    const EvalReport report = load_report(report_in);
    fs::create_directories(report_out_dir);
    const fs::path base = fs::path(report_out_dir) / fs::path(report_in).filename();
    emit_curve_csvs(report, base);
    std::cout << "wrote curves under " << report_out_dir << "\n";
    return kExitOk;
  }
  return cmd_verify();
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInternal) {
      std::cerr << "invariant violated: " << e.what() << "\n";
      return kExitInvariantFailure;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariantFailure;
  }
}

}  // namespace etcml

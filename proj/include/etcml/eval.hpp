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

#ifndef ETCML_EVAL_HPP
#define ETCML_EVAL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "etcml/dataset.hpp"
#include "etcml/features.hpp"
#include "etcml/svm.hpp"

namespace etcml {

// Impostor trial categories under key condition 2. Under key condition 1
// every impostor is OtherPersonSameKey.
enum class ImpostorKind {
  kOtherPersonSameKey,
  kSamePersonOtherKey,
  kOtherPersonOtherKey,
};

const char* impostor_kind_name(ImpostorKind kind);

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
  std::vector<ImpostorKind> breakdown;  // one tag per impostor score
};

struct RocCurve {
  std::vector<double> thresholds;  // ascending
  std::vector<double> far;         // fraction of impostor scores >= threshold
  std::vector<double> frr;         // fraction of genuine scores < threshold
};

// Thresholds: a uniform grid over [min - eps, max + eps] of all scores,
// merged with every distinct score value. Acceptance at threshold is
// score >= threshold (ties accept).
RocCurve sweep(const ScoreSet& scores, std::size_t n_thresholds);

struct EerPoint {
  double eer = 0.0;
  double threshold = 0.0;
};

// Interpolated crossing of FAR and FRR. On an exact FAR == FRR plateau,
// the midpoint of the plateau. Computed from the count arrays only, so
// equal curves give bitwise-equal EERs.
EerPoint eer(const RocCurve& curve);

struct ExperimentConfig {
  std::size_t block = 8;
  ReducerKind reducer = ReducerKind::kSubsample;
  double ratio = 1.0;  // out_dim = max(1, round(ratio * in_dim)); identity ignores it
  KernelSpec kernel;
  TrainConfig train;
  SplitSpec split;
  std::size_t n_clients = 2;     // condition 2 only
  std::uint64_t key_seed = 1;    // master seed for key material
  std::uint64_t reducer_seed = 1;
  std::size_t n_thresholds = 512;
};

struct CurvePair {
  RocCurve plain;
  RocCurve encrypted;
};

// Acceptance rate (score >= threshold) of each impostor category at a
// given threshold, plus trial counts.
struct BreakdownRates {
  std::vector<std::string> kinds;
  std::vector<std::size_t> counts;
  std::vector<double> accept_rates;
};

struct EvalReport {
  int condition = 1;
  KernelSpec kernel;
  ReducerKind reducer = ReducerKind::kIdentity;
  double ratio = 1.0;
  std::size_t block = 8;
  std::size_t n_clients = 0;  // 0 under condition 1
  ExperimentConfig config;    // full reproduction record
  double eer_plain = 0.0;
  double eer_encrypted = 0.0;
  double threshold_plain = 0.0;
  double threshold_encrypted = 0.0;
  CurvePair curves;
  ScoreSet scores_plain;
  ScoreSet scores_encrypted;
  BreakdownRates breakdown_encrypted;  // rates at the encrypted EER threshold
};

// Key condition 1: one key for every client. Runs the full pipeline
// (encrypt, reduce, z-score, one-vs-rest SVM, threshold sweep) on plain
// and encrypted copies of the same split and reports both curves.
EvalReport run_keycond1(const LabeledDataset& dataset, const ExperimentConfig& cfg);

// Key condition 2: one key per client; identities map to clients
// round-robin when the dataset does not assign them. Genuine trials
// require the right person under the right key; impostor trials cover all
// three categories.
EvalReport run_keycond2(const LabeledDataset& dataset, const ExperimentConfig& cfg);

// Writes <path> as JSON plus, next to it, one CSV per curve
// ("threshold,far,frr" rows): <stem>_plain.csv and <stem>_encrypted.csv.
void emit_report(const EvalReport& report, const std::filesystem::path& path);

// Just the CSV pair, for re-emitting curves from a loaded report.
void emit_curve_csvs(const EvalReport& report, const std::filesystem::path& json_path);

EvalReport load_report(const std::filesystem::path& path);

// Per-client key material: a fixed domain-separated derivation from the
// master seed, so condition-2 clients hold pairwise distinct keys.
EtcKey client_key(std::uint64_t key_seed, std::size_t client);

}  // namespace etcml

#endif  // ETCML_EVAL_HPP

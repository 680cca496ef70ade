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

#include "etcml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include <json.hpp>

#include "etcml/error.hpp"
#include "etcml/fsio.hpp"
#include "etcml/netpbm.hpp"
#include "etcml/rng.hpp"

namespace etcml {

void validate(const LabeledDataset& dataset) {
  if (dataset.images.empty()) fail(ErrorCode::kEmptyInput, "dataset has no images");
  if (dataset.identity.size() != dataset.images.size())
    fail(ErrorCode::kInvalidArgument, "dataset identity/image count mismatch");
  if (!dataset.client.empty() && dataset.client.size() != dataset.images.size())
    fail(ErrorCode::kInvalidArgument, "dataset client/image count mismatch");
  const std::size_t w = dataset.images.front().width;
  const std::size_t h = dataset.images.front().height;
  for (const GrayscaleImage& image : dataset.images) {
    validate(image);
    if (image.width != w || image.height != h)
      fail(ErrorCode::kInvalidArgument, "dataset images differ in geometry");
  }
}

std::pair<LabeledDataset, LabeledDataset> split_per_identity(
    const LabeledDataset& dataset, const SplitSpec& spec) {
  validate(dataset);
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    fail(ErrorCode::kInvalidArgument, "train_fraction must lie in (0,1)");

  // Identity -> image indices, in dataset order; identities processed in
  // sorted order so the stream consumption is well defined.
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i)
    groups[dataset.identity[i]].push_back(i);

  SplitMix64 rng = seeded_stream(spec.seed, domain::kSplit);
  LabeledDataset train, test;
  train.identity_names = dataset.identity_names;
  test.identity_names = dataset.identity_names;

  auto append = [&dataset](LabeledDataset& out, std::size_t i) {
    out.images.push_back(dataset.images[i]);
    out.identity.push_back(dataset.identity[i]);
    if (!dataset.client.empty()) out.client.push_back(dataset.client[i]);
    if (!dataset.rel_paths.empty()) out.rel_paths.push_back(dataset.rel_paths[i]);
  };

  for (auto& [id, indices] : groups) {
    if (indices.size() < 2)
      fail(ErrorCode::kInvalidArgument,
           "identity " + std::to_string(id) + " has fewer than 2 images");
    fisher_yates(indices, rng);
    const auto n_train = static_cast<std::size_t>(
        std::ceil(spec.train_fraction * static_cast<double>(indices.size())));
    for (std::size_t k = 0; k < indices.size(); ++k)
      append(k < n_train ? train : test, indices[k]);
  }
  return {std::move(train), std::move(test)};
}

namespace {

// Smooth random field: a handful of low-frequency cosine waves with random
// orientation and phase, normalized to unit RMS-ish amplitude.
struct SmoothField {
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;

  static SmoothField draw(SplitMix64& rng) {
    SmoothField field;
    for (int k = 0; k < 6; ++k) {
      Wave w{};
      w.fx = 0.5 + 3.0 * rng.next_unit();
      w.fy = 0.5 + 3.0 * rng.next_unit();
      if (rng.next() & 1) w.fx = -w.fx;
      w.phase = 2.0 * std::numbers::pi * rng.next_unit();
      w.amp = 0.5 + rng.next_unit();
      field.waves.push_back(w);
    }
    return field;
  }

  double at(double u, double v) const {
    double s = 0.0;
    for (const Wave& w : waves)
      s += w.amp * std::cos(2.0 * std::numbers::pi * (w.fx * u + w.fy * v) + w.phase);
    return s / static_cast<double>(waves.size());
  }
};

std::uint8_t quantize(double v) {
  long r = std::lround(v);
  if (r < 0) return 0;
  if (r > 255) return 255;
  return static_cast<std::uint8_t>(r);
}

constexpr double kSynthNoiseSigma = 16.0;
constexpr double kSynthIlluminationSigma = 16.0;
constexpr std::size_t kSynthIlluminationModes = 4;

// Field rasterized over the image grid, normalized to unit pixel RMS.
std::vector<double> rasterize_unit_rms(const SmoothField& field, std::size_t width,
                                       std::size_t height) {
  std::vector<double> raster(width * height);
  double sum_sq = 0.0;
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      const double v = field.at(static_cast<double>(x) / static_cast<double>(width),
                                static_cast<double>(y) / static_cast<double>(height));
      raster[y * width + x] = v;
      sum_sq += v * v;
    }
  const double rms = std::sqrt(sum_sq / static_cast<double>(raster.size()));
  if (rms > 0.0)
    for (double& v : raster) v /= rms;
  return raster;
}

}  // namespace

LabeledDataset synth_dataset(std::size_t n_identities, std::size_t per_identity,
                             std::size_t width, std::size_t height,
                             double separation, std::uint64_t seed) {
  if (n_identities == 0 || per_identity == 0)
    fail(ErrorCode::kInvalidArgument, "synth_dataset: counts must be >= 1");
  if (width == 0 || height == 0)
    fail(ErrorCode::kInvalidImage, "synth_dataset: zero dimensions");
  if (separation < 0.0)
    fail(ErrorCode::kInvalidArgument, "synth_dataset: separation must be >= 0");

  SplitMix64 template_rng = seeded_stream(seed, domain::kSynthTemplate);
  SplitMix64 noise_rng = seeded_stream(seed, domain::kSynthNoise);

  // Global illumination modes shared by every identity, like the lighting
  // variation of a face database: all samples vary inside one low-dim
  // subspace, which block scrambling destroys.
  std::vector<std::vector<double>> illumination;
  for (std::size_t l = 0; l < kSynthIlluminationModes; ++l)
    illumination.push_back(
        rasterize_unit_rms(SmoothField::draw(template_rng), width, height));

  LabeledDataset dataset;
  const double amplitude = separation * kSynthNoiseSigma;
  for (std::size_t id = 0; id < n_identities; ++id) {
    const std::vector<double> base =
        rasterize_unit_rms(SmoothField::draw(template_rng), width, height);
    for (std::size_t s = 0; s < per_identity; ++s) {
      std::vector<double> weights(kSynthIlluminationModes);
      for (double& w : weights) w = noise_rng.next_gaussian();
      GrayscaleImage image = make_image(width, height);
      for (std::size_t i = 0; i < base.size(); ++i) {
        double lighting = 0.0;
        for (std::size_t l = 0; l < kSynthIlluminationModes; ++l)
          lighting += weights[l] * illumination[l][i];
        lighting *= kSynthIlluminationSigma / std::sqrt(double(kSynthIlluminationModes));
        image.pixels[i] = quantize(128.0 + amplitude * base[i] + lighting +
                                   kSynthNoiseSigma * noise_rng.next_gaussian());
      }
      dataset.images.push_back(std::move(image));
      dataset.identity.push_back(static_cast<int>(id));
    }
    dataset.identity_names.push_back("synth" + std::to_string(id));
  }
  return dataset;
}

LabeledDataset load_dataset_dir(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root))
    fail(ErrorCode::kFileNotFound, "dataset directory not found: " + root.string());

  std::vector<fs::path> identity_dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) identity_dirs.push_back(entry.path());
  std::sort(identity_dirs.begin(), identity_dirs.end());
  if (identity_dirs.empty())
    fail(ErrorCode::kEmptyInput, "no identity subdirectories under " + root.string());

  LabeledDataset dataset;
  int id = 0;
  for (const fs::path& dir : identity_dirs) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".pgm")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) continue;
    for (const fs::path& file : files) {
      dataset.images.push_back(read_pgm(file));
      dataset.identity.push_back(id);
      dataset.rel_paths.push_back(
          fs::relative(file, root).generic_string());
    }
    dataset.identity_names.push_back(dir.filename().string());
    ++id;
  }
  validate(dataset);
  return dataset;
}

void save_dataset_dir(LabeledDataset& dataset, const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  validate(dataset);
  dataset.rel_paths.assign(dataset.size(), "");
  std::map<int, int> counter;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int id = dataset.identity[i];
    std::string name = static_cast<std::size_t>(id) < dataset.identity_names.size()
                           ? dataset.identity_names[id]
                           : "id" + std::to_string(id);
    fs::path dir = root / name;
    fs::create_directories(dir);
    char leaf[16];
    std::snprintf(leaf, sizeof(leaf), "%04d.pgm", counter[id]++);
    fs::path file = dir / leaf;
    write_pgm(dataset.images[i], file);
    dataset.rel_paths[i] = (fs::path(name) / leaf).generic_string();
  }
}

void write_split_manifest(const LabeledDataset& train, const LabeledDataset& test,
                          const SplitSpec& spec, const std::filesystem::path& path) {
  if (train.rel_paths.size() != train.size() || test.rel_paths.size() != test.size())
    fail(ErrorCode::kBadConfig, "split manifest requires datasets loaded from files");
  nlohmann::json doc;
  doc["format"] = "etcml-split/1";
  doc["seed"] = spec.seed;
  doc["train_fraction"] = spec.train_fraction;
  doc["identities"] = train.identity_names;
  doc["train"] = train.rel_paths;
  doc["test"] = test.rel_paths;
  atomic_write_file(path, doc.dump(2) + "\n");
}

}  // namespace etcml

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

#ifndef ETCML_DATASET_HPP
#define ETCML_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "etcml/image.hpp"

namespace etcml {

// A labeled face set. identity[i] is the class of images[i]; client[i]
// (optional, used by key condition 2) is the key-holding client that owns
// the image. All images share one geometry.
struct LabeledDataset {
  std::vector<GrayscaleImage> images;
  std::vector<int> identity;
  std::vector<int> client;                  // empty when unassigned
  std::vector<std::string> identity_names;  // identity id -> directory name
  std::vector<std::string> rel_paths;       // per-image source path, if any

  std::size_t size() const { return images.size(); }
  bool has_clients() const { return !client.empty(); }
};

void validate(const LabeledDataset& dataset);

struct SplitSpec {
  std::uint64_t seed = 0;
  double train_fraction = 0.5;  // in (0,1)
};

// Shuffles each identity's images with the seeded stream and sends the
// first ceil(fraction*n) to train, the rest to test. Labels, client ids
// and source paths travel with the images. Identities with fewer than two
// images are rejected.
std::pair<LabeledDataset, LabeledDataset> split_per_identity(
    const LabeledDataset& dataset, const SplitSpec& spec);

// Desk-scale stand-in for a face database: per identity a smooth random
// template field, per sample additive pixel noise. `separation` scales the
// template amplitude relative to the fixed noise sigma, so large values
// give near-separable classes.
LabeledDataset synth_dataset(std::size_t n_identities, std::size_t per_identity,
                             std::size_t width, std::size_t height,
                             double separation, std::uint64_t seed);

// Directory layout root/<identity>/<image>.pgm. Identities are the sorted
// subdirectory names, mapped to ids 0..k-1; files within an identity are
// read in sorted order.
LabeledDataset load_dataset_dir(const std::filesystem::path& root);

// Writes dataset images as root/<identity-name>/<index>.pgm and fills in
// the corresponding rel_paths.
void save_dataset_dir(LabeledDataset& dataset, const std::filesystem::path& root);

// Split manifest: JSON lists of dataset-relative paths plus the split spec,
// so a split is replayable from the manifest alone. Requires rel_paths.
void write_split_manifest(const LabeledDataset& train, const LabeledDataset& test,
                          const SplitSpec& spec, const std::filesystem::path& path);

}  // namespace etcml

#endif  // ETCML_DATASET_HPP

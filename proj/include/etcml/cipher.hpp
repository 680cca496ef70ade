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

#ifndef ETCML_CIPHER_HPP
#define ETCML_CIPHER_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "etcml/image.hpp"

namespace etcml {

// Key material for the three cipher stages: block permutation (k1),
// per-block dihedral transform (k2), per-block negative-positive bit (k3).
// Any 64-bit values are valid keys.
struct EtcKey {
  std::uint64_t k1 = 0;
  std::uint64_t k2 = 0;
  std::uint64_t k3 = 0;

  bool operator==(const EtcKey&) const = default;
};

struct BlockGeometry {
  std::size_t bx = 0;        // block side, square blocks only
  std::size_t by = 0;
  std::size_t blocks_x = 0;  // width / bx
  std::size_t blocks_y = 0;  // height / by

  std::size_t block_count() const { return blocks_x * blocks_y; }
};

// Validates divisibility and returns the grid layout. block must be a
// nonzero divisor of both dimensions; images are never padded, since
// padding would break the exact pixel-map correspondence.
BlockGeometry block_geometry(std::size_t width, std::size_t height,
                             std::size_t block);

// The pixel-level action of one (key, geometry) encryption:
//   flatten(encrypt(I))[perm[j]] == flip[j] ? 255 - flatten(I)[j]
//                                           : flatten(I)[j]
// perm is a bijection on 0..N-1; flip is constant within a source block.
struct PixelMap {
  std::vector<std::size_t> perm;
  std::vector<bool> flip;
};

// The same map acting on z-score-normalized features: a permutation with
// per-coordinate sign flips, hence an orthogonal transform.
struct SignedPermutation {
  std::vector<std::size_t> perm;
  std::vector<double> sign;  // each entry +1 or -1

  // out[perm[j]] = sign[j] * v[j]
  std::vector<double> apply(const std::vector<double>& v) const;
  SignedPermutation inverse() const;
};

// Derives the three stage keys from one master seed through fixed
// domain-separated mixes; deterministic.
EtcKey keygen(std::uint64_t master_seed);

// Fresh key from system randomness.
EtcKey keygen_random();

// Negative-positive transform of one block: r=0 identity, r=1 reflects
// every pixel about 255.
void negpos_block(std::vector<std::uint8_t>& block, int r);

// Applies element t (0..7) of the dihedral group D4 to a square block:
// 0 identity, 1/2/3 clockwise rotations by 90/180/270 degrees,
// 4 horizontal mirror, 5/6/7 mirror composed with the rotations.
std::vector<std::uint8_t> dihedral_block(const std::vector<std::uint8_t>& block,
                                         std::size_t side, std::size_t t);

// Index of the group element inverting t.
std::size_t dihedral_inverse(std::size_t t);

// Block scramble (k1), per-block dihedral (k2), per-block negative-positive
// with P(flip) = 0.5 (k3). Stream consumption order: the permutation is
// drawn first from k1, then one dihedral draw per block in destination
// order from k2, then one flip bit per block in destination order from k3.
GrayscaleImage encrypt(const GrayscaleImage& image, const EtcKey& key,
                       std::size_t block);

GrayscaleImage decrypt(const GrayscaleImage& image, const EtcKey& key,
                       std::size_t block);

// The (perm, flip) pair realizing encrypt on flattened pixel indices.
PixelMap induced_pixel_map(const EtcKey& key, std::size_t width,
                           std::size_t height, std::size_t block);

// Same permutation; sign -1 exactly where flip is set.
SignedPermutation to_signed_permutation(const PixelMap& map);

// Key file: JSON {"k1": "<16 hex>", "k2": "<16 hex>", "k3": "<16 hex>",
// "block": n}.
void save_key(const EtcKey& key, std::size_t block,
              const std::filesystem::path& path);
std::pair<EtcKey, std::size_t> load_key(const std::filesystem::path& path);

}  // namespace etcml

#endif  // ETCML_CIPHER_HPP

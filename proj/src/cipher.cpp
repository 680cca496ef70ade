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

#include "etcml/cipher.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "etcml/error.hpp"
#include "etcml/fsio.hpp"
#include "etcml/rng.hpp"

namespace etcml {

BlockGeometry block_geometry(std::size_t width, std::size_t height,
                             std::size_t block) {
  if (block == 0) fail(ErrorCode::kInvalidArgument, "block size is zero");
  if (width % block != 0 || height % block != 0)
    fail(ErrorCode::kNonDivisibleBlocks,
         std::to_string(width) + "x" + std::to_string(height) +
             " image is not divisible into " + std::to_string(block) + "x" +
             std::to_string(block) + " blocks");
  BlockGeometry geometry;
  geometry.bx = block;
  geometry.by = block;
  geometry.blocks_x = width / block;
  geometry.blocks_y = height / block;
  return geometry;
}

EtcKey keygen(std::uint64_t master_seed) {
  EtcKey key;
  key.k1 = mix64(master_seed ^ domain::kKeyK1);
  key.k2 = mix64(master_seed ^ domain::kKeyK2);
  key.k3 = mix64(master_seed ^ domain::kKeyK3);
  return key;
}

EtcKey keygen_random() {
  std::random_device device;
  std::uint64_t seed = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  return keygen(seed);
}

void negpos_block(std::vector<std::uint8_t>& block, int r) {
  if (r == 0) return;
  for (std::uint8_t& p : block) p = static_cast<std::uint8_t>(255 - p);
}

namespace {

// Source coordinates (row, col) of destination pixel (r, c) under group
// element t, so that out[r][c] = in[src_row][src_col]. Shared by the byte
// transform and the index-map construction, which keeps the two in
// lockstep by construction.
inline void dihedral_source(std::size_t t, std::size_t n, std::size_t r,
                            std::size_t c, std::size_t& src_row,
                            std::size_t& src_col) {
  std::size_t rr = r, cc = c;
  // Undo the mirror (applied last for t in 4..7).
  if (t >= 4) cc = n - 1 - cc;
  switch (t & 3) {
    case 0:
      src_row = rr;
      src_col = cc;
      break;
    case 1:  // 90 cw: out[r][c] = in[n-1-c][r]
      src_row = n - 1 - cc;
      src_col = rr;
      break;
    case 2:  // 180
      src_row = n - 1 - rr;
      src_col = n - 1 - cc;
      break;
    default:  // 270 cw
      src_row = cc;
      src_col = n - 1 - rr;
      break;
  }
}

struct StageDraws {
  std::vector<std::size_t> order;  // order[dst] = source block index
  std::vector<std::size_t> dihedral;
  std::vector<int> flip;
};

StageDraws draw_stages(const EtcKey& key, const BlockGeometry& geometry) {
  StageDraws draws;
  const std::size_t n = geometry.block_count();
  SplitMix64 scramble_rng(key.k1);
  draws.order = random_permutation(n, scramble_rng);
  SplitMix64 dihedral_rng(key.k2);
  draws.dihedral.resize(n);
  for (std::size_t d = 0; d < n; ++d)
    draws.dihedral[d] = static_cast<std::size_t>(dihedral_rng.next_below(8));
  SplitMix64 flip_rng(key.k3);
  draws.flip.resize(n);
  for (std::size_t d = 0; d < n; ++d)
    draws.flip[d] = static_cast<int>(flip_rng.next() >> 63);
  return draws;
}

std::vector<std::uint8_t> extract_block(const GrayscaleImage& image,
                                        const BlockGeometry& geometry,
                                        std::size_t block_index) {
  const std::size_t bx = geometry.bx;
  const std::size_t row0 = (block_index / geometry.blocks_x) * geometry.by;
  const std::size_t col0 = (block_index % geometry.blocks_x) * bx;
  std::vector<std::uint8_t> block(bx * geometry.by);
  for (std::size_t r = 0; r < geometry.by; ++r)
    for (std::size_t c = 0; c < bx; ++c)
      block[r * bx + c] = image.at(row0 + r, col0 + c);
  return block;
}

void place_block(GrayscaleImage& image, const BlockGeometry& geometry,
                 std::size_t block_index, const std::vector<std::uint8_t>& block) {
  const std::size_t bx = geometry.bx;
  const std::size_t row0 = (block_index / geometry.blocks_x) * geometry.by;
  const std::size_t col0 = (block_index % geometry.blocks_x) * bx;
  for (std::size_t r = 0; r < geometry.by; ++r)
    for (std::size_t c = 0; c < bx; ++c)
      image.at(row0 + r, col0 + c) = block[r * bx + c];
}

}  // namespace

std::vector<std::uint8_t> dihedral_block(const std::vector<std::uint8_t>& block,
                                         std::size_t side, std::size_t t) {
  if (side * side != block.size())
    fail(ErrorCode::kNonSquareBlock, "dihedral_block: block is not square");
  if (t > 7) fail(ErrorCode::kInvalidArgument, "dihedral_block: t out of range");
  std::vector<std::uint8_t> out(block.size());
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      std::size_t sr, sc;
      dihedral_source(t, side, r, c, sr, sc);
      out[r * side + c] = block[sr * side + sc];
    }
  return out;
}

std::size_t dihedral_inverse(std::size_t t) {
  // Rotations invert to the complementary rotation; every mirrored element
  // is an involution.
  static constexpr std::size_t kInverse[8] = {0, 3, 2, 1, 4, 5, 6, 7};
  if (t > 7) fail(ErrorCode::kInvalidArgument, "dihedral_inverse: t out of range");
  return kInverse[t];
}

GrayscaleImage encrypt(const GrayscaleImage& image, const EtcKey& key,
                       std::size_t block) {
  validate(image);
  const BlockGeometry geometry = block_geometry(image.width, image.height, block);
  const StageDraws draws = draw_stages(key, geometry);

  GrayscaleImage out = make_image(image.width, image.height);
  for (std::size_t dst = 0; dst < geometry.block_count(); ++dst) {
    std::vector<std::uint8_t> b = extract_block(image, geometry, draws.order[dst]);
    b = dihedral_block(b, geometry.bx, draws.dihedral[dst]);
    negpos_block(b, draws.flip[dst]);
    place_block(out, geometry, dst, b);
  }
  return out;
}

GrayscaleImage decrypt(const GrayscaleImage& image, const EtcKey& key,
                       std::size_t block) {
  validate(image);
  const BlockGeometry geometry = block_geometry(image.width, image.height, block);
  const StageDraws draws = draw_stages(key, geometry);

  GrayscaleImage out = make_image(image.width, image.height);
  for (std::size_t dst = 0; dst < geometry.block_count(); ++dst) {
    std::vector<std::uint8_t> b = extract_block(image, geometry, dst);
    negpos_block(b, draws.flip[dst]);
    b = dihedral_block(b, geometry.bx, dihedral_inverse(draws.dihedral[dst]));
    place_block(out, geometry, draws.order[dst], b);
  }
  return out;
}

PixelMap induced_pixel_map(const EtcKey& key, std::size_t width,
                           std::size_t height, std::size_t block) {
  const BlockGeometry geometry = block_geometry(width, height, block);
  const StageDraws draws = draw_stages(key, geometry);

  PixelMap map;
  map.perm.assign(width * height, 0);
  map.flip.assign(width * height, false);

  const std::size_t bx = geometry.bx;
  for (std::size_t dst = 0; dst < geometry.block_count(); ++dst) {
    const std::size_t src = draws.order[dst];
    const std::size_t src_row0 = (src / geometry.blocks_x) * geometry.by;
    const std::size_t src_col0 = (src % geometry.blocks_x) * bx;
    const std::size_t dst_row0 = (dst / geometry.blocks_x) * geometry.by;
    const std::size_t dst_col0 = (dst % geometry.blocks_x) * bx;
    for (std::size_t r = 0; r < geometry.by; ++r)
      for (std::size_t c = 0; c < bx; ++c) {
        std::size_t sr, sc;
        dihedral_source(draws.dihedral[dst], bx, r, c, sr, sc);
        const std::size_t src_flat = (src_row0 + sr) * width + (src_col0 + sc);
        const std::size_t dst_flat = (dst_row0 + r) * width + (dst_col0 + c);
        map.perm[src_flat] = dst_flat;
        map.flip[src_flat] = draws.flip[dst] != 0;
      }
  }
  return map;
}

std::vector<double> SignedPermutation::apply(const std::vector<double>& v) const {
  if (v.size() != perm.size())
    fail(ErrorCode::kDimensionMismatch, "SignedPermutation::apply: size mismatch");
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[perm[j]] = sign[j] * v[j];
  return out;
}

SignedPermutation SignedPermutation::inverse() const {
  SignedPermutation inv;
  inv.perm.assign(perm.size(), 0);
  inv.sign.assign(perm.size(), 1.0);
  for (std::size_t j = 0; j < perm.size(); ++j) {
    inv.perm[perm[j]] = j;
    inv.sign[perm[j]] = sign[j];
  }
  return inv;
}

SignedPermutation to_signed_permutation(const PixelMap& map) {
  SignedPermutation s;
  s.perm = map.perm;
  s.sign.resize(map.flip.size());
  for (std::size_t j = 0; j < map.flip.size(); ++j)
    s.sign[j] = map.flip[j] ? -1.0 : 1.0;
  return s;
}

namespace {

std::string to_hex16(std::uint64_t v) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(v));
  return buffer;
}

std::uint64_t from_hex16(const std::string& s) {
  if (s.size() != 16) fail(ErrorCode::kBadConfig, "key component is not 16 hex digits");
  std::uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9')
      v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f')
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F')
      v |= static_cast<std::uint64_t>(c - 'A' + 10);
    else
      fail(ErrorCode::kBadConfig, "key component has a non-hex digit");
  }
  return v;
}

}  // namespace

void save_key(const EtcKey& key, std::size_t block,
              const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["k1"] = to_hex16(key.k1);
  doc["k2"] = to_hex16(key.k2);
  doc["k3"] = to_hex16(key.k3);
  doc["block"] = block;
  atomic_write_file(path, doc.dump(2) + "\n");
}

std::pair<EtcKey, std::size_t> load_key(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kBadConfig, path.string() + ": " + e.what());
  }
  if (!doc.contains("k1") || !doc.contains("k2") || !doc.contains("k3") ||
      !doc.contains("block"))
    fail(ErrorCode::kBadConfig, path.string() + ": missing key fields");
  EtcKey key;
  key.k1 = from_hex16(doc["k1"].get<std::string>());
  key.k2 = from_hex16(doc["k2"].get<std::string>());
  key.k3 = from_hex16(doc["k3"].get<std::string>());
  return {key, doc["block"].get<std::size_t>()};
}

}  // namespace etcml

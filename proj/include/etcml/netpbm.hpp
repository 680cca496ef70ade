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

#ifndef ETCML_NETPBM_HPP
#define ETCML_NETPBM_HPP

#include <filesystem>

#include "etcml/image.hpp"

namespace etcml {

// Binary Netpbm codecs, maxval 255 only. ASCII variants (P2/P3) are
// rejected with kUnsupportedFormat so there is exactly one byte-level
// representation per image.

GrayscaleImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayscaleImage& image, const std::filesystem::path& path);

RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const RgbImage& image, const std::filesystem::path& path);

// Dispatches on the magic: P5 loads directly, P6 loads as RGB and runs the
// YCbCr plane concatenation, so color inputs arrive cipher-ready.
GrayscaleImage read_image_as_grayscale(const std::filesystem::path& path);

}  // namespace etcml

#endif  // ETCML_NETPBM_HPP

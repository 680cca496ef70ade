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

#ifndef ETCML_IMAGE_HPP
#define ETCML_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace etcml {

// Row-major 8-bit grayscale raster. The object the cipher scrambles and
// the learners consume.
struct GrayscaleImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // width * height bytes

  std::size_t size() const { return width * height; }
  std::uint8_t at(std::size_t row, std::size_t col) const {
    return pixels[row * width + col];
  }
  std::uint8_t& at(std::size_t row, std::size_t col) {
    return pixels[row * width + col];
  }

  bool operator==(const GrayscaleImage&) const = default;
};

// Row-major 8-bit RGB raster (interleaved triples).
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height bytes

  bool operator==(const RgbImage&) const = default;
};

GrayscaleImage make_image(std::size_t width, std::size_t height);

// Throws kInvalidImage unless pixels.size() == width*height and both
// dimensions are nonzero.
void validate(const GrayscaleImage& image);
void validate(const RgbImage& image);

// Full-range BT.601 luma/chroma split: converts to YCbCr, rounds half away
// from zero, and stacks the Y, Cb, Cr planes top-to-bottom into one
// grayscale raster of size width x 3*height.
GrayscaleImage rgb_to_plane_concat(const RgbImage& image);

// The scalar BT.601 transform, exposed for oracle checks.
// channel: 0 = Y, 1 = Cb, 2 = Cr.
std::uint8_t bt601_component(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                             int channel);

}  // namespace etcml

#endif  // ETCML_IMAGE_HPP

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

#include "etcml/image.hpp"

#include <cmath>

#include "etcml/error.hpp"

namespace etcml {

GrayscaleImage make_image(std::size_t width, std::size_t height) {
  GrayscaleImage image;
  image.width = width;
  image.height = height;
  image.pixels.assign(width * height, 0);
  return image;
}

void validate(const GrayscaleImage& image) {
  if (image.width == 0 || image.height == 0)
    fail(ErrorCode::kInvalidImage, "grayscale image has a zero dimension");
  if (image.pixels.size() != image.width * image.height)
    fail(ErrorCode::kInvalidImage, "grayscale pixel count does not match dimensions");
}

void validate(const RgbImage& image) {
  if (image.width == 0 || image.height == 0)
    fail(ErrorCode::kInvalidImage, "rgb image has a zero dimension");
  if (image.pixels.size() != 3 * image.width * image.height)
    fail(ErrorCode::kInvalidImage, "rgb pixel count does not match dimensions");
}

namespace {

std::uint8_t clamp_to_byte(double v) {
  long r = std::lround(v);  // rounds half away from zero
  if (r < 0) return 0;
  if (r > 255) return 255;
  return static_cast<std::uint8_t>(r);
}

}  // namespace

std::uint8_t bt601_component(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                             int channel) {
  double rd = r, gd = g, bd = b;
  switch (channel) {
    case 0:
      return clamp_to_byte(0.299 * rd + 0.587 * gd + 0.114 * bd);
    case 1:
      return clamp_to_byte(128.0 - 0.168736 * rd - 0.331264 * gd + 0.5 * bd);
    case 2:
      return clamp_to_byte(128.0 + 0.5 * rd - 0.418688 * gd - 0.081312 * bd);
    default:
      fail(ErrorCode::kInvalidArgument, "bt601_component: channel out of range");
  }
}

GrayscaleImage rgb_to_plane_concat(const RgbImage& image) {
  validate(image);
  GrayscaleImage out = make_image(image.width, 3 * image.height);
  const std::size_t plane = image.width * image.height;
  for (std::size_t i = 0; i < plane; ++i) {
    std::uint8_t r = image.pixels[3 * i];
    std::uint8_t g = image.pixels[3 * i + 1];
    std::uint8_t b = image.pixels[3 * i + 2];
    out.pixels[i] = bt601_component(r, g, b, 0);
    out.pixels[plane + i] = bt601_component(r, g, b, 1);
    out.pixels[2 * plane + i] = bt601_component(r, g, b, 2);
  }
  return out;
}

}  // namespace etcml

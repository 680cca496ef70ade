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

#include "etcml/netpbm.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "etcml/error.hpp"
#include "etcml/fsio.hpp"

namespace etcml {

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (c == '#') in.unget();
  return token;
}

std::size_t parse_dimension(const std::string& token, const char* what) {
  if (token.empty()) fail(ErrorCode::kMalformedHeader, std::string("missing ") + what);
  for (char c : token)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      fail(ErrorCode::kMalformedHeader, std::string("non-numeric ") + what + ": " + token);
  unsigned long long v = std::stoull(token);
  if (v == 0) fail(ErrorCode::kMalformedHeader, std::string(what) + " is zero");
  if (v > (1ull << 20)) fail(ErrorCode::kMalformedHeader, std::string(what) + " too large");
  return static_cast<std::size_t>(v);
}

struct RawHeader {
  std::size_t width;
  std::size_t height;
};

// Parses magic/width/height/maxval and positions the stream at the first
// pixel byte (exactly one whitespace byte separates maxval from data).
RawHeader read_header(std::ifstream& in, const std::filesystem::path& path,
                      const char* expected_magic) {
  std::string magic = next_token(in);
  if (magic != expected_magic)
    fail(ErrorCode::kUnsupportedFormat,
         path.string() + ": expected " + expected_magic + " magic, got '" + magic + "'");
  RawHeader header{};
  header.width = parse_dimension(next_token(in), "width");
  header.height = parse_dimension(next_token(in), "height");
  std::string maxval = next_token(in);
  if (maxval != "255")
    fail(ErrorCode::kBadMaxval, path.string() + ": maxval " + maxval + " (only 255 supported)");
  return header;
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kFileNotFound, "cannot open " + path.string());
  return in;
}

void read_payload(std::ifstream& in, const std::filesystem::path& path,
                  std::vector<std::uint8_t>& pixels) {
  in.read(reinterpret_cast<char*>(pixels.data()),
          static_cast<std::streamsize>(pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != pixels.size())
    fail(ErrorCode::kTruncatedData,
         path.string() + ": expected " + std::to_string(pixels.size()) + " pixel bytes, got " +
             std::to_string(in.gcount()));
}

}  // namespace

GrayscaleImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in = open_binary(path);
  RawHeader header = read_header(in, path, "P5");
  GrayscaleImage image = make_image(header.width, header.height);
  read_payload(in, path, image.pixels);
  return image;
}

void write_pgm(const GrayscaleImage& image, const std::filesystem::path& path) {
  validate(image);
  std::string bytes = "P5\n" + std::to_string(image.width) + " " +
                      std::to_string(image.height) + "\n255\n";
  bytes.append(reinterpret_cast<const char*>(image.pixels.data()),
               image.pixels.size());
  atomic_write_file(path, bytes);
}

RgbImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in = open_binary(path);
  RawHeader header = read_header(in, path, "P6");
  RgbImage image;
  image.width = header.width;
  image.height = header.height;
  image.pixels.assign(3 * header.width * header.height, 0);
  read_payload(in, path, image.pixels);
  return image;
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  validate(image);
  std::string bytes = "P6\n" + std::to_string(image.width) + " " +
                      std::to_string(image.height) + "\n255\n";
  bytes.append(reinterpret_cast<const char*>(image.pixels.data()),
               image.pixels.size());
  atomic_write_file(path, bytes);
}

GrayscaleImage read_image_as_grayscale(const std::filesystem::path& path) {
  {
    std::ifstream probe = open_binary(path);
    char magic[2] = {0, 0};
    probe.read(magic, 2);
    if (probe.gcount() == 2 && magic[0] == 'P' && magic[1] == '6')
      return rgb_to_plane_concat(read_ppm(path));
  }
  return read_pgm(path);
}

}  // namespace etcml

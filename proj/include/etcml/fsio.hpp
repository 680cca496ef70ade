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

#ifndef ETCML_FSIO_HPP
#define ETCML_FSIO_HPP

#include <filesystem>
#include <string_view>

namespace etcml {

// Writes contents to a sibling temp file and renames it into place, so
// concurrent readers never observe a partially written artifact.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace etcml

#endif  // ETCML_FSIO_HPP

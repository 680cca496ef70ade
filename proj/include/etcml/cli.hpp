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

#ifndef ETCML_CLI_HPP
#define ETCML_CLI_HPP

#include <string>
#include <vector>

namespace etcml {

// Dispatches a full command line (without argv[0]). Returns the process
// exit code: 0 success, 1 user error, 2 violated internal invariant.
int run_cli(const std::vector<std::string>& args);

}  // namespace etcml

#endif  // ETCML_CLI_HPP

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

#ifndef ETCML_ERROR_HPP
#define ETCML_ERROR_HPP

#include <stdexcept>
#include <string>

namespace etcml {

// Every library failure surfaces as Error with a code the caller can
// branch on; the message carries the human-readable detail.
enum class ErrorCode {
  kFileNotFound,
  kUnsupportedFormat,   // bad magic (e.g. ASCII "P2" instead of binary "P5")
  kMalformedHeader,
  kBadMaxval,           // Netpbm maxval other than 255
  kTruncatedData,
  kWriteFailed,
  kInvalidImage,
  kInvalidArgument,
  kDimensionMismatch,
  kNonDivisibleBlocks,  // image dimensions not a multiple of the block size
  kNonSquareBlock,
  kSingleClass,
  kEmptyInput,
  kBadConfig,
  kInternal,            // invariant violation: a bug, not a user error
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace etcml

#endif  // ETCML_ERROR_HPP

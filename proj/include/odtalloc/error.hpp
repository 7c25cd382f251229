// Copyright 2026 The odtalloc Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace odtalloc {

enum class ErrorCode {
  kAllZero,
  kNegativeWeight,
  kParseError,
  kDimensionMismatch,
  kOutOfRange,
  kNotControllable,
  kSingularGramian,
  kMassMismatch,
  kIterationLimit,
  kTooLarge,
  kInvalidSpec,
  kIoError,
  kInvalidArgument,
};

/// Stable name of an error code ("DimensionMismatch", "IterationLimit", ...).
std::string_view error_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the entropic solver; keeps the marginal violation it reached.
class IterationLimitError : public Error {
 public:
  IterationLimitError(double violation, const std::string& message)
      : Error(ErrorCode::kIterationLimit, message), violation_(violation) {}

  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace odtalloc

// Copyright 2026 The LDP-FL Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPFL_ERROR_H_
#define LDPFL_ERROR_H_

#include <stdexcept>
#include <string>

namespace ldpfl {

enum class ErrorCode {
  kInvalidArgument,
  kBudgetTooSmall,
  kOutOfRange,
  kEmptyAggregate,
  kShapeMismatch,
  kProtocol,
  kScheduling,
  kFormat,
  kIo,
  kConfig,
  kDiverged,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported as Error; the code lets callers (the CLI
// in particular) map failures onto exit statuses without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kBudgetTooSmall: return "privacy budget too small";
    case ErrorCode::kOutOfRange: return "value outside range";
    case ErrorCode::kEmptyAggregate: return "empty aggregate";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kProtocol: return "protocol error";
    case ErrorCode::kScheduling: return "scheduling error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kDiverged: return "training diverged";
  }
  return "error";
}

}  // namespace ldpfl

#endif  // LDPFL_ERROR_H_

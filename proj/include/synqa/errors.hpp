// Copyright 2026 The synqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace synqa {

enum class ErrorCode {
  kEmptyTable,
  kSchemaViolation,
  kDuplicateHeader,
  kMalformedCsv,
  kColumnMismatch,
  kTypeMismatch,
  kTooFewRows,
  kTooFewColumns,
  kNoFeatures,
  kColumnOverlap,
  kTooFewSynthRows,
  kSecretAllMissing,
  kInvalidArgument,
  kIo,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kDuplicateHeader: return "DuplicateHeader";
    case ErrorCode::kMalformedCsv: return "MalformedCsv";
    case ErrorCode::kColumnMismatch: return "ColumnMismatch";
    case ErrorCode::kTypeMismatch: return "TypeMismatch";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kTooFewColumns: return "TooFewColumns";
    case ErrorCode::kNoFeatures: return "NoFeatures";
    case ErrorCode::kColumnOverlap: return "ColumnOverlap";
    case ErrorCode::kTooFewSynthRows: return "TooFewSynthRows";
    case ErrorCode::kSecretAllMissing: return "SecretAllMissing";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// All library failures surface as synqa::Error carrying a machine-readable
// code; what() is "<CodeName>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace synqa

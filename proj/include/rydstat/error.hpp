// Copyright 2026 The rydstat Authors
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

namespace rydstat {

enum class ErrorCode {
  // fock
  kNegativeMean,
  kTruncationTooSmall,
  kZeroMean,
  kVacuumOnly,
  kInvalidDistribution,
  // transfer
  kTransmissionOutOfRange,
  kDimensionMismatch,
  kSingularMatrix,
  kIllConditioned,
  // source
  kPOutOfRange,
  kTargetOutOfRange,
  kNoConvergence,
  // blockade
  kNOutOfRange,
  kNonpositiveLength,
  kScaleOutOfRange,
  kInvalidConfig,
  // ratemodel
  kInvalidProbability,
  kDivisionDegenerate,
  kEmptyTable,
  kInsufficientData,
  // clicks
  kParseError,
  kEmptyFile,
  kOverlappingWindows,
  kZeroSingles,
  kNoiseExceedsSignal,
  kInsufficientTrials,
  // pipeline / cli
  kZetaUnattainable,
  kUnknownFigure,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeMean: return "NEGATIVE_MEAN";
    case ErrorCode::kTruncationTooSmall: return "TRUNCATION_TOO_SMALL";
    case ErrorCode::kZeroMean: return "ZERO_MEAN";
    case ErrorCode::kVacuumOnly: return "VACUUM_ONLY";
    case ErrorCode::kInvalidDistribution: return "INVALID_DISTRIBUTION";
    case ErrorCode::kTransmissionOutOfRange: return "TRANSMISSION_OUT_OF_RANGE";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kSingularMatrix: return "SINGULAR_MATRIX";
    case ErrorCode::kIllConditioned: return "ILL_CONDITIONED";
    case ErrorCode::kPOutOfRange: return "P_OUT_OF_RANGE";
    case ErrorCode::kTargetOutOfRange: return "TARGET_OUT_OF_RANGE";
    case ErrorCode::kNoConvergence: return "NO_CONVERGENCE";
    case ErrorCode::kNOutOfRange: return "N_OUT_OF_RANGE";
    case ErrorCode::kNonpositiveLength: return "NONPOSITIVE_LENGTH";
    case ErrorCode::kScaleOutOfRange: return "SCALE_OUT_OF_RANGE";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kInvalidProbability: return "INVALID_PROBABILITY";
    case ErrorCode::kDivisionDegenerate: return "DIVISION_DEGENERATE";
    case ErrorCode::kEmptyTable: return "EMPTY_TABLE";
    case ErrorCode::kInsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kEmptyFile: return "EMPTY_FILE";
    case ErrorCode::kOverlappingWindows: return "OVERLAPPING_WINDOWS";
    case ErrorCode::kZeroSingles: return "ZERO_SINGLES";
    case ErrorCode::kNoiseExceedsSignal: return "NOISE_EXCEEDS_SIGNAL";
    case ErrorCode::kInsufficientTrials: return "INSUFFICIENT_TRIALS";
    case ErrorCode::kZetaUnattainable: return "ZETA_UNATTAINABLE";
    case ErrorCode::kUnknownFigure: return "UNKNOWN_FIGURE";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

/// Numerical failures, as opposed to bad input data.
constexpr bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularMatrix:
    case ErrorCode::kIllConditioned:
    case ErrorCode::kNoConvergence:
    case ErrorCode::kTruncationTooSmall:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

  /// Same error with `where` (a file name, a flag) prepended to the message.
  Error in(const std::string& where) const { return Error(code_, where + ": " + message_); }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace rydstat

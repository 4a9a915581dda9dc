#pragma once

#include <stdexcept>
#include <string>

namespace imbal {

// Stable error identifiers. These map one-to-one onto the C API status codes,
// so the numbering must not be reshuffled once released.
enum class ErrorCode : int {
  Ok = 0,
  InvalidArgument = 1,
  DegenerateVariance = 2,
  AllDegenerate = 3,
  MissingClass = 4,
  FractionOutOfRange = 5,
  LengthMismatch = 6,
  ZeroMean = 7,
  RankDeficient = 8,
  EmptyDataset = 9,
  KTooLarge = 10,
  NonFiniteProb = 11,
  ShapeMismatch = 12,
  DivergedLoss = 13,
  SingleClass = 14,
  EmptyClass = 15,
  TooFewMinority = 16,
  NoBoundarySamples = 17,
  TargetExceedsCount = 18,
  UnknownClass = 19,
  SingleClassLabels = 20,
  ZeroCosts = 21,
  TooFewSamples = 22,
  AllRoundsRejected = 23,
  InvalidSpec = 24,
  CalibrationFailed = 25,
  MissingColumn = 26,
  EmptyAfterCleaning = 27,
  UnmappableLabel = 28,
  IoError = 29,
  ConfigError = 30,
  TechniqueFailed = 31,
  Internal = 32,
};

const char* error_code_name(ErrorCode code);

class ImbError : public std::runtime_error {
 public:
  ImbError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw ImbError(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace imbal

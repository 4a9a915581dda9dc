#include "imbal/error.hpp"

namespace imbal {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NonFiniteProb: return "NonFiniteProb";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::TooFewMinority: return "TooFewMinority";
    case ErrorCode::NoBoundarySamples: return "NoBoundarySamples";
    case ErrorCode::TargetExceedsCount: return "TargetExceedsCount";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::SingleClassLabels: return "SingleClassLabels";
    case ErrorCode::ZeroCosts: return "ZeroCosts";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::AllRoundsRejected: return "AllRoundsRejected";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::CalibrationFailed: return "CalibrationFailed";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyAfterCleaning: return "EmptyAfterCleaning";
    case ErrorCode::UnmappableLabel: return "UnmappableLabel";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::TechniqueFailed: return "TechniqueFailed";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

}  // namespace imbal

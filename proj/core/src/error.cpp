#include "subseas/error.hpp"

namespace subseas {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::DuplicateKey: return "duplicate_key";
    case ErrorCode::UnknownGridPoint: return "unknown_grid_point";
    case ErrorCode::UndefinedSkill: return "undefined_skill";
    case ErrorCode::UncoveredMonthDay: return "uncovered_month_day";
    case ErrorCode::EmptyWindow: return "empty_window";
    case ErrorCode::ZeroWeights: return "zero_weights";
    case ErrorCode::LagViolation: return "lag_violation";
    case ErrorCode::MissingSource: return "missing_source";
    case ErrorCode::NoEvaluableDates: return "no_evaluable_dates";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace subseas

#include "spotvol/error.hpp"

#include <fmt/format.h>

namespace spotvol {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateTimestamp: return "DuplicateTimestamp";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::GapTooLong: return "GapTooLong";
    case ErrorKind::WrongYearSpan: return "WrongYearSpan";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::NonFiniteInput: return "NonFiniteInput";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::RankOutOfRange: return "RankOutOfRange";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::TooFewResiduals: return "TooFewResiduals";
    case ErrorKind::TooFewTailPoints: return "TooFewTailPoints";
    case ErrorKind::NonPositiveMu: return "NonPositiveMu";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::TooFewPermutations: return "TooFewPermutations";
    case ErrorKind::DegenerateDesign: return "DegenerateDesign";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRow:
    case ErrorKind::DuplicateTimestamp:
    case ErrorKind::EmptyInput:
    case ErrorKind::GapTooLong:
    case ErrorKind::WrongYearSpan:
    case ErrorKind::InvalidSpec:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Io:
    case ErrorKind::RankOutOfRange:
    case ErrorKind::TooFewPermutations:
      return ErrorCategory::input;
    default:
      return ErrorCategory::numerical;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

namespace {

std::string describe(const std::vector<RowIssue>& issues) {
  if (issues.empty()) return "malformed input";
  std::string msg = fmt::format("line {}: {}", issues.front().line, issues.front().reason);
  if (issues.size() > 1) msg += fmt::format(" (and {} more malformed rows)", issues.size() - 1);
  return msg;
}

}  // namespace

MalformedRowError::MalformedRowError(std::vector<RowIssue> issues)
    : Error(ErrorKind::MalformedRow, describe(issues)), issues_(std::move(issues)) {}

GapTooLongError::GapTooLongError(std::string start, std::size_t length, std::size_t limit)
    : Error(ErrorKind::GapTooLong,
            fmt::format("gap of {} hours starting {} exceeds limit of {}", length, start, limit)),
      start_(std::move(start)),
      length_(length) {}

NonFiniteInputError::NonFiniteInputError(std::size_t row, std::size_t col)
    : Error(ErrorKind::NonFiniteInput, fmt::format("non-finite value at cell ({}, {})", row, col)),
      row_(row),
      col_(col) {}

}  // namespace spotvol

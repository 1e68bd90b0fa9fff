#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spotvol {

enum class ErrorKind {
  // input
  MalformedRow,
  DuplicateTimestamp,
  EmptyInput,
  GapTooLong,
  WrongYearSpan,
  InvalidSpec,
  InvalidArgument,
  Io,
  // numerical
  NonFiniteInput,
  NoConvergence,
  RankOutOfRange,
  ShapeMismatch,
  TooFewResiduals,
  TooFewTailPoints,
  NonPositiveMu,
  EmptySeries,
  TooFewPermutations,
  DegenerateDesign,
};

enum class ErrorCategory { input, numerical };

std::string_view to_string(ErrorKind kind);
ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

struct RowIssue {
  std::size_t line = 0;
  std::string reason;
};

/// Every unparseable row of a price file, in line order.
class MalformedRowError : public Error {
 public:
  explicit MalformedRowError(std::vector<RowIssue> issues);

  const std::vector<RowIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<RowIssue> issues_;
};

class GapTooLongError : public Error {
 public:
  GapTooLongError(std::string start, std::size_t length, std::size_t limit);

  const std::string& start() const noexcept { return start_; }
  std::size_t length() const noexcept { return length_; }

 private:
  std::string start_;
  std::size_t length_;
};

class NonFiniteInputError : public Error {
 public:
  NonFiniteInputError(std::size_t row, std::size_t col);

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace spotvol

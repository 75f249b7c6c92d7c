#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace btca {

/// Every failure the library reports. The category decides the CLI exit code.
enum class ErrorCode {
  // market_data
  MissingColumn,
  UnparsableRow,
  NonMonotonicDates,
  DateGap,
  NonPositivePrice,
  InconsistentBar,
  SplitOutOfRange,
  // indicators
  PeriodExceedsSeries,
  InvalidCoefficient,
  InvalidConfig,
  // sentiment
  EmptyAfterCleaning,
  EmptyCorpus,
  DegenerateVocabulary,
  UnfittedModel,
  TopicOutOfRange,
  AdClusterAmbiguous,
  InvalidLexicon,
  // trading_env / backtest
  WindowOutOfRange,
  SteppedAfterDone,
  RangeUncovered,
  EmptyResult,
  // policy_learner
  ShapeMismatch,
  NonFiniteGradient,
  InvalidModelFile,
  // pipeline
  EmptyJoin,
  Io,
};

enum class ErrorCategory { Usage, Data, Numeric };

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteGradient:
      return ErrorCategory::Numeric;
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidCoefficient:
      return ErrorCategory::Usage;
    default:
      return ErrorCategory::Data;
  }
}

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace btca

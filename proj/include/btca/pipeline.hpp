#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "btca/backtest.hpp"
#include "btca/config.hpp"
#include "btca/indicators.hpp"
#include "btca/market_data.hpp"
#include "btca/policy.hpp"
#include "btca/sentiment.hpp"
#include "btca/sentiment_stage.hpp"
#include "btca/trading_env.hpp"

namespace btca {

/// Inner join of prices and indicators on date; days without sentiment get 0.
/// Throws EmptyJoin when no date survives.
FeatureTable join_features(const PriceSeries& prices, const std::vector<IndicatorFrame>& indicators,
                           const std::vector<DailySentiment>& sentiment);

/// First test date: the date of bar `train_len`. Throws SplitOutOfRange.
Date test_start_date(const PriceSeries& prices, std::size_t train_len, std::size_t window);

struct TrainOutcome {
  PolicyModel model;
  TrainReport report;
  std::size_t train_rows = 0;
};

/// Fits the normalizer on rows dated before `test_start` and trains on those rows only.
TrainOutcome train_on_features(const FeatureTable& features, Date test_start, const EnvConfig& env,
                               const TrainConfig& train);

/// Episode rewards and profits, one CSV row per finished episode.
void write_training_log(const TrainReport& report, const std::filesystem::path& path);

/// Sentiment inputs read from the configured paths.
SentimentReport run_sentiment_from_files(const PipelinePaths& paths, const SentimentStageConfig& cfg,
                                         std::optional<std::pair<Date, Date>> range);
void write_sentiment_report(const SentimentReport& report, const std::filesystem::path& path);

/// Artifact names inside the output directory.
namespace artifact {
inline constexpr const char* kPrices = "prices.csv";
inline constexpr const char* kIndicators = "indicators.csv";
inline constexpr const char* kSentiment = "sentiment.csv";
inline constexpr const char* kSentimentReport = "sentiment_report.json";
inline constexpr const char* kFeatures = "features.csv";
inline constexpr const char* kModel = "model.txt";
inline constexpr const char* kTrainingLog = "training_log.csv";
inline constexpr const char* kBacktestCsv = "backtest.csv";
inline constexpr const char* kBacktestJsonl = "backtest.jsonl";
inline constexpr const char* kSummary = "summary.txt";
}  // namespace artifact

struct StageOutcome {
  std::string stage;
  bool skipped = false;
};

struct PipelineOptions {
  bool force = false;
  /// Called once per stage, after it ran or was skipped.
  std::function<void(const StageOutcome&)> on_stage;
};

/// ingest, indicators, sentiment, join, train, backtest. A stage is skipped when
/// its outputs are newer than its inputs and its settings are unchanged. Stage
/// failures are rethrown with the stage name in the message.
std::vector<StageOutcome> run_pipeline(const PipelineConfig& cfg, const PipelineOptions& options = {});

}  // namespace btca

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "btca/policy.hpp"
#include "btca/trading_env.hpp"

namespace btca {

struct BacktestRecord {
  Date date;
  double close = 0.0;
  Position position = Position::Short;  // before acting
  AgentAction agent_action = AgentAction::Sell;
  FinalRecommendation recommendation = FinalRecommendation::HOLD;
  Position position_after = Position::Short;
  double reward = 0.0;
  double cumulative_reward = 0.0;
  double cumulative_profit = 1.0;

  friend bool operator==(const BacktestRecord&, const BacktestRecord&) = default;
};

struct BacktestResult {
  std::vector<BacktestRecord> records;
  double total_reward = 0.0;
  double total_profit = 1.0;
  std::size_t buy_count = 0;
  std::size_t sell_count = 0;
  std::size_t hold_count = 0;
  std::size_t trades = 0;  // position flips

  friend bool operator==(const BacktestResult&, const BacktestResult&) = default;
};

/// Chooses an action from the observation ending before `tick`.
using ActionSource = std::function<AgentAction(const Observation& obs, std::size_t tick)>;

struct BacktestRange {
  Date from;
  Date to;  // inclusive
};

/// Runs days [from + window, to]; the first `window` days of the range only
/// feed the observation. Throws RangeUncovered if the table lacks either end
/// or the range is shorter than window + 1 days.
BacktestResult run_backtest(const ActionSource& policy, const FeatureTable& features, BacktestRange range,
                            const Normalizer& norm, const EnvConfig& env);

/// Argmax actions by default; sampling uses `seed`.
BacktestResult run_backtest(const PolicyModel& model, const FeatureTable& features, BacktestRange range,
                            bool deterministic = true, std::uint64_t seed = 0);

struct BacktestSummary {
  std::size_t days = 0;
  double total_reward = 0.0;
  double total_profit = 1.0;
  double percent_return = 0.0;  // 100 (profit - 1)
  std::size_t trades = 0;
  std::size_t buy_count = 0;
  std::size_t sell_count = 0;
  std::size_t hold_count = 0;
};

BacktestSummary summarize(const BacktestResult& result);

void write_backtest_csv(const BacktestResult& result, std::ostream& out);
void write_backtest_jsonl(const BacktestResult& result, std::ostream& out);
void write_summary(const BacktestSummary& summary, std::ostream& out);
std::vector<BacktestRecord> read_backtest_csv(const std::filesystem::path& path);

/// backtest.csv, backtest.jsonl and summary.txt under `dir`.
void write_backtest_artifacts(const BacktestResult& result, const std::filesystem::path& dir);

}  // namespace btca

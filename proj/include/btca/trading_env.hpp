#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btca/date.hpp"

namespace btca {

enum class Position : std::uint8_t { Short = 0, Long = 1 };
enum class AgentAction : std::uint8_t { Sell = 0, Buy = 1 };
enum class FinalRecommendation : std::uint8_t { BUY, SELL, HOLD };

constexpr int encode(Position p) { return static_cast<int>(p); }
constexpr int encode(AgentAction a) { return static_cast<int>(a); }
std::optional<Position> decode_position(int code);
std::optional<AgentAction> decode_action(int code);

std::string_view to_string(Position p);
std::string_view to_string(AgentAction a);
std::string_view to_string(FinalRecommendation r);
/// Accepts "long"/"short" in any case, or "1"/"0".
std::optional<Position> parse_position(std::string_view text);

/// (Buy, Short) -> BUY, (Sell, Short) -> SELL, anything while Long -> HOLD.
FinalRecommendation final_recommendation(AgentAction action, Position position);

inline constexpr std::size_t kFeatureCount = 7;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{"close", "volume", "sma", "ema",
                                                                          "rsi",   "bmsb",   "sentiment"};

/// Per-day features in `kFeatureNames` order, rows in ascending date order.
class FeatureTable {
 public:
  FeatureTable() = default;
  FeatureTable(std::vector<Date> dates, std::vector<double> values);

  std::size_t size() const { return dates_.size(); }
  bool empty() const { return dates_.empty(); }
  Date date(std::size_t i) const { return dates_.at(i); }
  std::span<const Date> dates() const { return dates_; }
  std::span<const double> row(std::size_t i) const;
  std::span<const double> values() const { return values_; }
  double close(std::size_t i) const { return row(i)[0]; }
  double value(std::size_t i, std::size_t feature) const { return row(i)[feature]; }
  std::optional<std::size_t> index_of(Date d) const;

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;

 private:
  std::vector<Date> dates_;
  std::vector<double> values_;
};

void write_feature_csv(const FeatureTable& table, std::ostream& out);
FeatureTable read_feature_csv(std::istream& in);
FeatureTable load_feature_csv(const std::filesystem::path& path);

/// Per-feature z-score statistics (population std); zero variance maps to 0.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> inv_std;

  /// Statistics over rows [first, first + count).
  static Normalizer fit(const FeatureTable& table, std::size_t first, std::size_t count);
  static Normalizer identity(std::size_t features);
  std::size_t features() const { return mean.size(); }
};

using Observation = std::vector<double>;

/// Rows tick-window .. tick-1, z-scored and flattened row-major (window x F).
Observation build_observation(const FeatureTable& table, std::size_t tick, std::size_t window, const Normalizer& norm);

struct EnvConfig {
  std::size_t window = 30;
  double fee = 0.0;
  std::string reward_mode = "price_diff_long";

  void validate() const;
};

struct EnvState {
  std::size_t tick = 0;
  Position position = Position::Short;
  double last_trade_price = 0.0;
  double total_reward = 0.0;
  double total_profit = 1.0;
  std::size_t window = 0;
  bool done = false;
};

struct StepResult {
  EnvState state;
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

/// The agent acts at tick t on close[t]. While Long the step earns
/// close[t] - close[t-1]; closing a Long compounds the profit factor.
/// Reaching `end` with an open Long realizes it at the last close.
class TradingEnv {
 public:
  TradingEnv(const FeatureTable& table, Normalizer norm, EnvConfig config);
  /// Episodes end when the tick reaches `end` (exclusive, <= table size).
  TradingEnv(const FeatureTable& table, Normalizer norm, EnvConfig config, std::size_t end);

  std::pair<EnvState, Observation> reset(std::size_t start_tick) const;
  StepResult step(const EnvState& state, AgentAction action) const;
  Observation observe(std::size_t tick) const;

  const FeatureTable& table() const { return *table_; }
  const EnvConfig& config() const { return config_; }
  const Normalizer& normalizer() const { return norm_; }
  std::size_t end() const { return end_; }
  std::size_t observation_size() const { return config_.window * kFeatureCount; }

 private:
  const FeatureTable* table_;
  Normalizer norm_;
  EnvConfig config_;
  std::size_t end_;
};

/// Episodic interface the learner trains against.
class Environment {
 public:
  struct Outcome {
    Observation observation;
    double reward = 0.0;
    bool done = false;
  };

  virtual ~Environment() = default;
  virtual std::size_t observation_size() const = 0;
  virtual Observation reset() = 0;
  virtual Outcome step(AgentAction action) = 0;
  /// Profit factor of the episode so far, for environments that track one.
  virtual std::optional<double> episode_profit() const { return std::nullopt; }
};

/// Episodes run over [start_tick, env.end()).
class TradingEpisode : public Environment {
 public:
  TradingEpisode(TradingEnv env, std::size_t start_tick) : env_(std::move(env)), start_(start_tick) {}

  std::size_t observation_size() const override { return env_.observation_size(); }
  Observation reset() override;
  Outcome step(AgentAction action) override;
  std::optional<double> episode_profit() const override { return state_.total_profit; }
  const EnvState& state() const { return state_; }

 private:
  TradingEnv env_;
  std::size_t start_;
  EnvState state_;
};

}  // namespace btca

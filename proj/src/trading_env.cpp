#include "btca/trading_env.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "btca/csv.hpp"
#include "btca/error.hpp"
#include "btca/kernels/kernels.hpp"

namespace btca {

std::optional<Position> decode_position(int code) {
  if (code == 0) return Position::Short;
  if (code == 1) return Position::Long;
  return std::nullopt;
}

std::optional<AgentAction> decode_action(int code) {
  if (code == 0) return AgentAction::Sell;
  if (code == 1) return AgentAction::Buy;
  return std::nullopt;
}

std::string_view to_string(Position p) { return p == Position::Long ? "long" : "short"; }
std::string_view to_string(AgentAction a) { return a == AgentAction::Buy ? "buy" : "sell"; }

std::string_view to_string(FinalRecommendation r) {
  switch (r) {
    case FinalRecommendation::BUY: return "BUY";
    case FinalRecommendation::SELL: return "SELL";
    case FinalRecommendation::HOLD: return "HOLD";
  }
  return "HOLD";
}

std::optional<Position> parse_position(std::string_view text) {
  std::string low;
  for (char c : text) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (low == "long" || low == "1") return Position::Long;
  if (low == "short" || low == "0") return Position::Short;
  return std::nullopt;
}

FinalRecommendation final_recommendation(AgentAction action, Position position) {
  if (position == Position::Short) {
    return action == AgentAction::Buy ? FinalRecommendation::BUY : FinalRecommendation::SELL;
  }
  return FinalRecommendation::HOLD;
}

FeatureTable::FeatureTable(std::vector<Date> dates, std::vector<double> values)
    : dates_(std::move(dates)), values_(std::move(values)) {
  if (values_.size() != dates_.size() * kFeatureCount)
    throw Error(ErrorCode::ShapeMismatch, "feature values do not match " + std::to_string(dates_.size()) + " rows");
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    if (dates_[i] <= dates_[i - 1])
      throw Error(ErrorCode::NonMonotonicDates, "feature rows out of order at " + dates_[i].iso());
  }
  for (std::size_t i = 0; i < dates_.size(); ++i) {
    if (!(values_[i * kFeatureCount] > 0.0))
      throw Error(ErrorCode::NonPositivePrice, "close on " + dates_[i].iso() + " is not positive");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
    throw Error(ErrorCode::UnparsableRow, "feature table holds a non-finite value");
}

std::span<const double> FeatureTable::row(std::size_t i) const {
  if (i >= dates_.size()) throw Error(ErrorCode::WindowOutOfRange, "row " + std::to_string(i) + " out of range");
  return std::span<const double>(values_).subspan(i * kFeatureCount, kFeatureCount);
}

std::optional<std::size_t> FeatureTable::index_of(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - dates_.begin());
}

void write_feature_csv(const FeatureTable& table, std::ostream& out) {
  out << "date";
  for (auto name : kFeatureNames) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.date(i).iso();
    for (double v : table.row(i)) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

FeatureTable read_feature_csv(std::istream& in) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MissingColumn, "feature table has no header");
  const auto& header = records.front().fields;
  std::array<std::size_t, kFeatureCount + 1> cols{};
  auto date_col = csv::column_index(header, "date");
  if (!date_col) throw Error(ErrorCode::MissingColumn, "feature table lacks column 'date'");
  cols[0] = *date_col;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    auto idx = csv::column_index(header, kFeatureNames[f]);
    if (!idx) throw Error(ErrorCode::MissingColumn, "feature table lacks column '" + std::string(kFeatureNames[f]) + "'");
    cols[f + 1] = *idx;
  }
  const std::size_t width = *std::max_element(cols.begin(), cols.end()) + 1;
  std::vector<Date> dates;
  std::vector<double> values;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r].fields;
    auto bad = [&] { return Error(ErrorCode::UnparsableRow, "features line " + std::to_string(records[r].line)); };
    if (fields.size() < width) throw bad();
    auto date = Date::parse(fields[cols[0]]);
    if (!date) throw bad();
    dates.push_back(*date);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      auto v = csv::parse_double(fields[cols[f + 1]]);
      if (!v) throw bad();
      values.push_back(*v);
    }
  }
  return FeatureTable(std::move(dates), std::move(values));
}

FeatureTable load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_feature_csv(in);
}

Normalizer Normalizer::fit(const FeatureTable& table, std::size_t first, std::size_t count) {
  if (count == 0 || first + count > table.size())
    throw Error(ErrorCode::WindowOutOfRange, "normalizer rows out of range");
  Normalizer n;
  n.mean.assign(kFeatureCount, 0.0);
  n.inv_std.assign(kFeatureCount, 0.0);
  for (std::size_t i = first; i < first + count; ++i) {
    auto r = table.row(i);
    for (std::size_t f = 0; f < kFeatureCount; ++f) n.mean[f] += r[f];
  }
  for (auto& m : n.mean) m /= static_cast<double>(count);
  std::vector<double> var(kFeatureCount, 0.0);
  for (std::size_t i = first; i < first + count; ++i) {
    auto r = table.row(i);
    for (std::size_t f = 0; f < kFeatureCount; ++f) var[f] += (r[f] - n.mean[f]) * (r[f] - n.mean[f]);
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const double sd = std::sqrt(var[f] / static_cast<double>(count));
    // Relative guard: a column that is constant up to rounding counts as constant.
    n.inv_std[f] = sd > 1e-12 * std::max(1.0, std::abs(n.mean[f])) ? 1.0 / sd : 0.0;
  }
  return n;
}

Normalizer Normalizer::identity(std::size_t features) {
  return Normalizer{std::vector<double>(features, 0.0), std::vector<double>(features, 1.0)};
}

Observation build_observation(const FeatureTable& table, std::size_t tick, std::size_t window, const Normalizer& norm) {
  if (window == 0 || tick < window || tick > table.size())
    throw Error(ErrorCode::WindowOutOfRange, "tick " + std::to_string(tick) + " with window " +
                                                 std::to_string(window) + " over " + std::to_string(table.size()) +
                                                 " rows");
  if (norm.features() != kFeatureCount || norm.inv_std.size() != kFeatureCount)
    throw Error(ErrorCode::ShapeMismatch, "normalizer has the wrong feature count");
  Observation obs(window * kFeatureCount);
  const auto& k = kernels::active();
  for (std::size_t r = 0; r < window; ++r) {
    auto row = table.row(tick - window + r);
    k.zscore(row.data(), norm.mean.data(), norm.inv_std.data(), obs.data() + r * kFeatureCount, kFeatureCount);
  }
  return obs;
}

void EnvConfig::validate() const {
  if (window == 0) throw Error(ErrorCode::InvalidConfig, "window must be >= 1");
  if (!(fee >= 0.0 && fee < 1.0)) throw Error(ErrorCode::InvalidConfig, "fee must lie in [0, 1)");
  if (reward_mode != "price_diff_long")
    throw Error(ErrorCode::InvalidConfig, "unsupported reward_mode '" + reward_mode + "'");
}

TradingEnv::TradingEnv(const FeatureTable& table, Normalizer norm, EnvConfig config)
    : TradingEnv(table, std::move(norm), std::move(config), table.size()) {}

TradingEnv::TradingEnv(const FeatureTable& table, Normalizer norm, EnvConfig config, std::size_t end)
    : table_(&table), norm_(std::move(norm)), config_(std::move(config)), end_(end) {
  config_.validate();
  if (end_ > table.size()) throw Error(ErrorCode::WindowOutOfRange, "episode end beyond the feature table");
}

Observation TradingEnv::observe(std::size_t tick) const { return build_observation(*table_, tick, config_.window, norm_); }

std::pair<EnvState, Observation> TradingEnv::reset(std::size_t start_tick) const {
  if (start_tick < config_.window || start_tick >= end_)
    throw Error(ErrorCode::WindowOutOfRange, "start tick " + std::to_string(start_tick) + " needs window " +
                                                 std::to_string(config_.window) + " and end " + std::to_string(end_));
  EnvState s;
  s.tick = start_tick;
  s.position = Position::Short;
  s.last_trade_price = table_->close(start_tick - 1);
  s.total_reward = 0.0;
  s.total_profit = 1.0;
  s.window = config_.window;
  s.done = false;
  return {s, observe(start_tick)};
}

StepResult TradingEnv::step(const EnvState& state, AgentAction action) const {
  if (state.done) throw Error(ErrorCode::SteppedAfterDone, "episode already finished");
  if (state.tick < 1 || state.tick >= end_) throw Error(ErrorCode::WindowOutOfRange, "state tick outside the episode");
  const double fee = config_.fee;
  const double price = table_->close(state.tick);
  const double prev = table_->close(state.tick - 1);

  StepResult out;
  EnvState& s = out.state;
  s = state;
  out.reward = state.position == Position::Long ? price - prev : 0.0;
  s.total_reward += out.reward;

  const bool flip = (action == AgentAction::Buy && state.position == Position::Short) ||
                    (action == AgentAction::Sell && state.position == Position::Long);
  if (flip) {
    if (state.position == Position::Long) s.total_profit *= (1.0 - fee) * price / ((1.0 + fee) * s.last_trade_price);
    s.last_trade_price = price;
    s.position = state.position == Position::Long ? Position::Short : Position::Long;
  }
  s.tick = state.tick + 1;
  s.done = s.tick == end_;
  if (s.done && s.position == Position::Long) {
    s.total_profit *= (1.0 - fee) * price / ((1.0 + fee) * s.last_trade_price);
  }
  out.done = s.done;
  out.observation = observe(s.tick);
  return out;
}

Observation TradingEpisode::reset() {
  auto [s, obs] = env_.reset(start_);
  state_ = s;
  return obs;
}

Environment::Outcome TradingEpisode::step(AgentAction action) {
  auto r = env_.step(state_, action);
  state_ = r.state;
  return {std::move(r.observation), r.reward, r.done};
}

}  // namespace btca

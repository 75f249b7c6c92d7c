#include "btca/backtest.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "btca/csv.hpp"
#include "btca/error.hpp"

namespace btca {

namespace {

std::optional<FinalRecommendation> parse_recommendation(std::string_view s) {
  if (s == "BUY") return FinalRecommendation::BUY;
  if (s == "SELL") return FinalRecommendation::SELL;
  if (s == "HOLD") return FinalRecommendation::HOLD;
  return std::nullopt;
}

std::optional<AgentAction> parse_action(std::string_view s) {
  if (s == "buy") return AgentAction::Buy;
  if (s == "sell") return AgentAction::Sell;
  return std::nullopt;
}

}  // namespace

BacktestResult run_backtest(const ActionSource& policy, const FeatureTable& features, BacktestRange range,
                            const Normalizer& norm, const EnvConfig& env) {
  auto from = features.index_of(range.from);
  auto to = features.index_of(range.to);
  if (!from || !to)
    throw Error(ErrorCode::RangeUncovered,
                "features do not cover " + range.from.iso() + " .. " + range.to.iso());
  if (*to < *from + env.window)
    throw Error(ErrorCode::RangeUncovered, "range " + range.from.iso() + " .. " + range.to.iso() +
                                               " is shorter than the window plus one day");
  TradingEnv trading(features, norm, env, *to + 1);
  auto [state, obs] = trading.reset(*from + env.window);

  BacktestResult result;
  while (!state.done) {
    const std::size_t tick = state.tick;
    const AgentAction action = policy(obs, tick);
    BacktestRecord rec;
    rec.date = features.date(tick);
    rec.close = features.close(tick);
    rec.position = state.position;
    rec.agent_action = action;
    rec.recommendation = final_recommendation(action, state.position);
    auto step = trading.step(state, action);
    rec.position_after = step.state.position;
    rec.reward = step.reward;
    rec.cumulative_reward = step.state.total_reward;
    rec.cumulative_profit = step.state.total_profit;
    if (rec.position_after != rec.position) ++result.trades;
    switch (rec.recommendation) {
      case FinalRecommendation::BUY: ++result.buy_count; break;
      case FinalRecommendation::SELL: ++result.sell_count; break;
      case FinalRecommendation::HOLD: ++result.hold_count; break;
    }
    result.records.push_back(rec);
    state = step.state;
    obs = std::move(step.observation);
  }
  result.total_reward = state.total_reward;
  result.total_profit = state.total_profit;
  return result;
}

BacktestResult run_backtest(const PolicyModel& model, const FeatureTable& features, BacktestRange range,
                            bool deterministic, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ActionSource source = [&](const Observation& obs, std::size_t) {
    return deterministic ? predict_action(model.params, obs) : sample_action(model.params, obs, rng);
  };
  return run_backtest(source, features, range, model.normalizer, model.env);
}

BacktestSummary summarize(const BacktestResult& result) {
  if (result.records.empty()) throw Error(ErrorCode::EmptyResult, "backtest produced no records");
  BacktestSummary s;
  s.days = result.records.size();
  s.total_reward = result.total_reward;
  s.total_profit = result.total_profit;
  s.percent_return = 100.0 * (result.total_profit - 1.0);
  s.trades = result.trades;
  s.buy_count = result.buy_count;
  s.sell_count = result.sell_count;
  s.hold_count = result.hold_count;
  return s;
}

void write_backtest_csv(const BacktestResult& result, std::ostream& out) {
  out << "date,close,position,agent_action,final_recommendation,position_after,reward,cumulative_reward,"
         "cumulative_profit\n";
  for (const auto& r : result.records) {
    out << r.date.iso() << ',' << csv::format_double(r.close) << ',' << to_string(r.position) << ','
        << to_string(r.agent_action) << ',' << to_string(r.recommendation) << ',' << to_string(r.position_after)
        << ',' << csv::format_double(r.reward) << ',' << csv::format_double(r.cumulative_reward) << ','
        << csv::format_double(r.cumulative_profit) << '\n';
  }
}

void write_backtest_jsonl(const BacktestResult& result, std::ostream& out) {
  for (const auto& r : result.records) {
    nlohmann::ordered_json j;
    j["date"] = r.date.iso();
    j["close"] = r.close;
    j["position"] = to_string(r.position);
    j["agent_action"] = to_string(r.agent_action);
    j["final_recommendation"] = to_string(r.recommendation);
    j["position_after"] = to_string(r.position_after);
    j["reward"] = r.reward;
    j["cumulative_reward"] = r.cumulative_reward;
    j["cumulative_profit"] = r.cumulative_profit;
    out << j.dump() << '\n';
  }
}

void write_summary(const BacktestSummary& s, std::ostream& out) {
  char pct[64];
  std::snprintf(pct, sizeof pct, "%.3f", s.percent_return);
  out << "days: " << s.days << '\n'
      << "total_reward: " << csv::format_double(s.total_reward) << '\n'
      << "total_profit: " << csv::format_double(s.total_profit) << '\n'
      << "percent_return: " << pct << "%\n"
      << "trades: " << s.trades << '\n'
      << "recommendations: BUY " << s.buy_count << ", SELL " << s.sell_count << ", HOLD " << s.hold_count << '\n';
}

std::vector<BacktestRecord> read_backtest_csv(const std::filesystem::path& path) {
  auto records = csv::read_file(path);
  if (records.empty()) throw Error(ErrorCode::MissingColumn, path.string() + " is empty");
  const auto& header = records.front().fields;
  const char* names[] = {"date",         "close",  "position",          "agent_action",     "final_recommendation",
                         "position_after", "reward", "cumulative_reward", "cumulative_profit"};
  std::vector<std::size_t> col;
  for (const char* n : names) {
    auto idx = csv::column_index(header, n);
    if (!idx) throw Error(ErrorCode::MissingColumn, path.string() + " lacks column '" + n + "'");
    col.push_back(*idx);
  }
  std::vector<BacktestRecord> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    auto bad = [&] { return Error(ErrorCode::UnparsableRow, path.string() + " line " + std::to_string(records[r].line)); };
    for (auto c : col) {
      if (c >= f.size()) throw bad();
    }
    BacktestRecord rec;
    auto date = Date::parse(f[col[0]]);
    auto close = csv::parse_double(f[col[1]]);
    auto pos = parse_position(f[col[2]]);
    auto act = parse_action(f[col[3]]);
    auto reco = parse_recommendation(f[col[4]]);
    auto after = parse_position(f[col[5]]);
    auto reward = csv::parse_double(f[col[6]]);
    auto cum_r = csv::parse_double(f[col[7]]);
    auto cum_p = csv::parse_double(f[col[8]]);
    if (!date || !close || !pos || !act || !reco || !after || !reward || !cum_r || !cum_p) throw bad();
    rec = {*date, *close, *pos, *act, *reco, *after, *reward, *cum_r, *cum_p};
    out.push_back(rec);
  }
  return out;
}

void write_backtest_artifacts(const BacktestResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("backtest.csv");
    write_backtest_csv(result, out);
  }
  {
    auto out = open("backtest.jsonl");
    write_backtest_jsonl(result, out);
  }
  {
    auto out = open("summary.txt");
    write_summary(summarize(result), out);
  }
}

}  // namespace btca

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "btca/backtest.hpp"
#include "btca/error.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace btca;
using test_support::table_from_closes;

namespace {

ActionSource constant(AgentAction a) {
  return [a](const Observation&, std::size_t) { return a; };
}

std::vector<double> rising(std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = 100.0 + 7.0 * static_cast<double>(i) + 0.5 * static_cast<double>(i * i);
  return c;
}

EnvConfig env_with(std::size_t window, double fee = 0.0) {
  EnvConfig env;
  env.window = window;
  env.fee = fee;
  return env;
}

}  // namespace

TEST_CASE("always-sell stub emits SELL every day with zero totals") {
  auto table = table_from_closes(rising(10));
  auto env = env_with(3);
  auto result = run_backtest(constant(AgentAction::Sell), table, {table.date(0), table.date(9)},
                             Normalizer::identity(kFeatureCount), env);
  REQUIRE(result.records.size() == 7);
  for (const auto& r : result.records) {
    CHECK(r.recommendation == FinalRecommendation::SELL);
    CHECK(r.position == Position::Short);
    CHECK(r.reward == 0.0);
  }
  CHECK(result.total_reward == 0.0);
  CHECK(result.total_profit == 1.0);
  CHECK(result.sell_count == 7);
  CHECK(result.trades == 0);
}

TEST_CASE("always-buy stub on a rising series earns the close difference and ratio") {
  auto c = rising(10);
  auto table = table_from_closes(c);
  const std::size_t window = 2;
  auto result = run_backtest(constant(AgentAction::Buy), table, {table.date(0), table.date(9)},
                             Normalizer::identity(kFeatureCount), env_with(window));
  REQUIRE(result.records.size() == 10 - window);
  CHECK(result.records.front().recommendation == FinalRecommendation::BUY);
  for (std::size_t i = 1; i < result.records.size(); ++i)
    CHECK(result.records[i].recommendation == FinalRecommendation::HOLD);
  CHECK(result.total_reward == doctest::Approx(c[9] - c[window]).epsilon(1e-12));
  CHECK(result.total_profit == doctest::Approx(c[9] / c[window]).epsilon(1e-12));
  CHECK(result.trades == 1);
}

TEST_CASE("backtest totals match the replay oracle on random traces") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    auto c = test_support::random_prices(40, rng);
    auto table = table_from_closes(c);
    const std::size_t window = 1 + rng() % 8;
    const double fee = (trial % 3) * 0.0025;
    std::vector<int> trace;
    ActionSource coin = [&](const Observation&, std::size_t) {
      int a = static_cast<int>(rng() & 1);
      trace.push_back(a);
      return a ? AgentAction::Buy : AgentAction::Sell;
    };
    auto result = run_backtest(coin, table, {table.date(0), table.date(c.size() - 1)},
                               Normalizer::identity(kFeatureCount), env_with(window, fee));
    auto want = oracle::replay(c, window, trace, fee);
    CHECK(result.total_reward == doctest::Approx(want.reward).epsilon(1e-9));
    CHECK(result.total_profit == doctest::Approx(want.profit).epsilon(1e-9));

    double sum = 0.0;
    for (const auto& r : result.records) {
      sum += r.reward;
      CHECK(r.recommendation == final_recommendation(r.agent_action, r.position));
      CHECK(r.cumulative_profit > 0.0);
    }
    CHECK(std::abs(sum - result.total_reward) <= 1e-9 * std::max(1.0, std::abs(sum)));
    CHECK(result.records.back().cumulative_profit == result.total_profit);
    CHECK(result.buy_count + result.sell_count + result.hold_count == result.records.size());
  }
}

TEST_CASE("record count is the range length minus the warmup window") {
  auto table = table_from_closes(rising(30));
  for (std::size_t window : {1u, 5u, 20u}) {
    auto result = run_backtest(constant(AgentAction::Sell), table, {table.date(4), table.date(27)},
                               Normalizer::identity(kFeatureCount), env_with(window));
    CHECK(result.records.size() == 24 - window);
    CHECK(result.records.front().date == table.date(4 + window));
    CHECK(result.records.back().date == table.date(27));
  }
}

TEST_CASE("model backtests replay deterministically") {
  std::mt19937_64 rng(5);
  auto c = test_support::random_prices(80, rng);
  auto table = table_from_closes(c);
  PolicyModel model;
  model.env = env_with(6, 0.001);
  model.normalizer = Normalizer::fit(table, 0, 40);
  model.params = PolicyParams::initialize({6 * kFeatureCount, 8}, 17);
  for (double& v : model.params.values()) v *= 40.0;  // make the argmax move around
  BacktestRange range{table.date(30), table.date(79)};
  auto a = run_backtest(model, table, range);
  auto b = run_backtest(model, table, range);
  CHECK(a == b);
  CHECK(a.records.size() == 50 - 6);
  auto s1 = run_backtest(model, table, range, false, 9);
  auto s2 = run_backtest(model, table, range, false, 9);
  CHECK(s1 == s2);
}

TEST_CASE("backtest range errors") {
  auto table = table_from_closes(rising(12));
  auto norm = Normalizer::identity(kFeatureCount);
  auto code = [&](BacktestRange r, std::size_t window) {
    try {
      run_backtest(constant(AgentAction::Sell), table, r, norm, env_with(window));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code({table.date(0) - 1, table.date(11)}, 2) == ErrorCode::RangeUncovered);
  CHECK(code({table.date(0), table.date(11) + 1}, 2) == ErrorCode::RangeUncovered);
  CHECK(code({table.date(0), table.date(3)}, 4) == ErrorCode::RangeUncovered);
  CHECK(code({table.date(0), table.date(4)}, 4) == ErrorCode::Io);
}

TEST_CASE("summaries") {
  BacktestResult r;
  BacktestRecord rec;
  rec.date = Date(2021, 3, 1);
  rec.close = 50000.0;
  rec.agent_action = AgentAction::Buy;
  rec.recommendation = FinalRecommendation::BUY;
  rec.position_after = Position::Long;
  rec.reward = 0.0;
  rec.cumulative_profit = 1.69486;
  r.records.push_back(rec);
  r.total_profit = 1.69486;
  r.buy_count = 1;
  r.trades = 1;
  auto s = summarize(r);
  CHECK(s.percent_return == doctest::Approx(69.486).epsilon(1e-12));
  CHECK(s.days == 1);
  CHECK(s.total_reward == rec.reward);
  CHECK(s.total_profit == rec.cumulative_profit);
  std::ostringstream out;
  write_summary(s, out);
  CHECK(out.str().find("percent_return: 69.486%") != std::string::npos);

  r.total_profit = 1.0;
  CHECK(summarize(r).percent_return == 0.0);

  try {
    summarize(BacktestResult{});
    FAIL("expected EmptyResult");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyResult);
  }
}

TEST_CASE("backtest artifacts round-trip") {
  std::mt19937_64 rng(77);
  auto c = test_support::random_prices(25, rng);
  auto table = table_from_closes(c);
  ActionSource coin = [&](const Observation&, std::size_t) { return rng() & 1 ? AgentAction::Buy : AgentAction::Sell; };
  auto result = run_backtest(coin, table, {table.date(0), table.date(24)}, Normalizer::identity(kFeatureCount),
                             env_with(4, 0.002));
  auto dir = test_support::temp_dir("backtest_artifacts");
  write_backtest_artifacts(result, dir);
  CHECK(read_backtest_csv(dir / "backtest.csv") == result.records);

  std::ifstream jl(dir / "backtest.jsonl");
  std::string line;
  std::size_t n = 0;
  while (std::getline(jl, line)) {
    CHECK(line.rfind("{\"date\":\"" + result.records[n].date.iso() + "\"", 0) == 0);
    ++n;
  }
  CHECK(n == result.records.size());
  CHECK(std::filesystem::exists(dir / "summary.txt"));
}

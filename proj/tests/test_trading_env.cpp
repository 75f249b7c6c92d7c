#include <cmath>
#include <random>
#include <sstream>

#include "btca/error.hpp"
#include "btca/trading_env.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace btca;

namespace {

using test_support::table_from_closes;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("encodings round-trip") {
  for (int code : {0, 1}) {
    CHECK(encode(*decode_position(code)) == code);
    CHECK(encode(*decode_action(code)) == code);
  }
  CHECK(encode(Position::Short) == 0);
  CHECK(encode(Position::Long) == 1);
  CHECK(encode(AgentAction::Sell) == 0);
  CHECK(encode(AgentAction::Buy) == 1);
  CHECK(!decode_position(2));
  CHECK(!decode_action(-1));
  CHECK(parse_position("LONG") == Position::Long);
  CHECK(parse_position("short") == Position::Short);
  CHECK(!parse_position("flat"));
}

TEST_CASE("final recommendation truth table") {
  CHECK(final_recommendation(AgentAction::Buy, Position::Short) == FinalRecommendation::BUY);
  CHECK(final_recommendation(AgentAction::Sell, Position::Short) == FinalRecommendation::SELL);
  CHECK(final_recommendation(AgentAction::Buy, Position::Long) == FinalRecommendation::HOLD);
  CHECK(final_recommendation(AgentAction::Sell, Position::Long) == FinalRecommendation::HOLD);
}

TEST_CASE("reset") {
  std::vector<double> closes(40);
  for (std::size_t i = 0; i < closes.size(); ++i) closes[i] = 100.0 + static_cast<double>(i);
  auto table = table_from_closes(closes);
  const auto id = Normalizer::identity(kFeatureCount);

  TradingEnv env(table, id, EnvConfig{30, 0.0, "price_diff_long"});
  auto [s, obs] = env.reset(30);
  CHECK(s.position == Position::Short);
  CHECK(s.total_profit == 1.0);
  CHECK(s.total_reward == 0.0);
  CHECK(s.last_trade_price == closes[29]);
  REQUIRE(obs.size() == 30 * kFeatureCount);
  for (std::size_t r = 0; r < 30; ++r) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) CHECK(obs[r * kFeatureCount + f] == table.value(r, f));
  }

  TradingEnv one(table, id, EnvConfig{1, 0.0, "price_diff_long"});
  auto [s1, obs1] = one.reset(5);
  CHECK(obs1.size() == kFeatureCount);
  CHECK(obs1[0] == closes[4]);

  CHECK(code_of([&] { env.reset(29); }) == ErrorCode::WindowOutOfRange);
  CHECK(code_of([&] { env.reset(40); }) == ErrorCode::WindowOutOfRange);
  CHECK(code_of([&] { TradingEnv(table, id, EnvConfig{0, 0.0, "price_diff_long"}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([&] { TradingEnv(table, id, EnvConfig{1, 0.0, "sharpe"}); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("step accounting examples") {
  const auto id = Normalizer::identity(kFeatureCount);
  SUBCASE("long through a two-bar step earns the price difference") {
    auto table = table_from_closes({100.0, 110.0});
    TradingEnv env(table, id, EnvConfig{1, 0.0, "price_diff_long"});
    auto [s, obs] = env.reset(1);
    s.position = Position::Long;
    s.last_trade_price = 100.0;
    auto r = env.step(s, AgentAction::Buy);
    CHECK(r.reward == 10.0);
    CHECK(r.state.total_reward == 10.0);
    CHECK(r.done);
    CHECK(code_of([&] { env.step(r.state, AgentAction::Sell); }) == ErrorCode::SteppedAfterDone);
  }
  SUBCASE("short idle is neutral") {
    auto table = table_from_closes({100.0, 250.0, 30.0, 90.0});
    TradingEnv env(table, id, EnvConfig{1, 0.0, "price_diff_long"});
    auto [s, obs] = env.reset(1);
    for (int i = 0; i < 3; ++i) {
      auto r = env.step(s, AgentAction::Sell);
      CHECK(r.reward == 0.0);
      CHECK(r.state.total_profit == s.total_profit);
      CHECK(r.state.total_reward == s.total_reward);
      CHECK(r.state.position == Position::Short);
      s = r.state;
    }
    CHECK(s.done);
  }
  SUBCASE("buy at 100, sell at 169.486") {
    auto table = table_from_closes({95.0, 100.0, 120.0, 169.486, 150.0});
    TradingEnv env(table, id, EnvConfig{1, 0.0, "price_diff_long"});
    auto [s, obs] = env.reset(1);
    s = env.step(s, AgentAction::Buy).state;
    CHECK(s.position == Position::Long);
    CHECK(s.last_trade_price == 100.0);
    s = env.step(s, AgentAction::Buy).state;
    s = env.step(s, AgentAction::Sell).state;
    CHECK(s.position == Position::Short);
    CHECK(s.total_profit == doctest::Approx(1.69486).epsilon(1e-12));
    CHECK(s.total_reward == doctest::Approx(69.486).epsilon(1e-12));
  }
  SUBCASE("an open long is realized at the final close") {
    auto table = table_from_closes({10.0, 20.0, 30.0, 40.0});
    TradingEnv env(table, id, EnvConfig{1, 0.0, "price_diff_long"});
    auto [s, obs] = env.reset(1);
    for (int i = 0; i < 3; ++i) s = env.step(s, AgentAction::Buy).state;
    CHECK(s.done);
    CHECK(s.total_profit == doctest::Approx(40.0 / 20.0).epsilon(1e-15));
    CHECK(s.total_reward == 20.0);
  }
}

TEST_CASE("step accounting equals a naive replay for every action sequence") {
  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> move(0.0, 0.08);
  for (double fee : {0.0, 0.0025, 0.3}) {
    std::vector<double> c{1000.0};
    for (int i = 1; i < 10; ++i) c.push_back(c.back() * move(rng));
    auto table = table_from_closes(c);
    TradingEnv env(table, Normalizer::identity(kFeatureCount), EnvConfig{1, fee, "price_diff_long"});
    const std::size_t steps = 9;
    for (unsigned mask = 0; mask < (1u << steps); ++mask) {
      std::vector<int> actions;
      auto [s, obs] = env.reset(1);
      for (std::size_t i = 0; i < steps; ++i) {
        const int a = (mask >> i) & 1u;
        actions.push_back(a);
        s = env.step(s, a ? AgentAction::Buy : AgentAction::Sell).state;
      }
      CHECK(s.done);
      auto want = oracle::replay(c, 1, actions, fee);
      CHECK(std::abs(s.total_reward - want.reward) < 1e-9);
      CHECK(std::abs(s.total_profit - want.profit) < 1e-9);
      CHECK(s.total_profit > 0.0);
    }
  }
}

TEST_CASE("observations") {
  SUBCASE("window 2 over a 3-day table matches hand z-scores") {
    auto table = table_from_closes({10.0, 20.0, 60.0});
    auto norm = Normalizer::fit(table, 0, 3);
    // close: mean 30, population std sqrt(((-20)^2 + (-10)^2 + 30^2) / 3) = sqrt(1400 / 3).
    CHECK(norm.mean[0] == doctest::Approx(30.0));
    const double sd = std::sqrt(1400.0 / 3.0);
    CHECK(norm.inv_std[0] == doctest::Approx(1.0 / sd).epsilon(1e-14));
    CHECK(norm.inv_std[4] == 0.0);  // rsi column is constant

    auto obs = build_observation(table, 3, 2, norm);
    REQUIRE(obs.size() == 2 * kFeatureCount);
    CHECK(obs[0] == doctest::Approx(-10.0 / sd).epsilon(1e-14));
    CHECK(obs[kFeatureCount] == doctest::Approx(30.0 / sd).epsilon(1e-14));
    // volume 1000, 1001, 1002: mean 1001, std sqrt(2/3); rows 1 and 2 give 0 and +1/sqrt(2/3).
    CHECK(obs[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(obs[kFeatureCount + 1] == doctest::Approx(1.0 / std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    for (std::size_t r = 0; r < 2; ++r) CHECK(obs[r * kFeatureCount + 4] == 0.0);

    CHECK(code_of([&] { build_observation(table, 4, 2, norm); }) == ErrorCode::WindowOutOfRange);
    CHECK(code_of([&] { build_observation(table, 1, 2, norm); }) == ErrorCode::WindowOutOfRange);
  }
  SUBCASE("constant features normalize to zero and entries stay finite") {
    std::vector<Date> dates;
    std::vector<double> values;
    for (int i = 0; i < 50; ++i) {
      dates.push_back(Date(2019, 3, 1) + i);
      for (std::size_t f = 0; f < kFeatureCount; ++f) values.push_back(7.5);
    }
    FeatureTable table(dates, values);
    auto norm = Normalizer::fit(table, 0, 30);
    auto obs = build_observation(table, 50, 20, norm);
    for (double v : obs) CHECK(v == 0.0);
  }
}

TEST_CASE("feature csv round-trip and validation") {
  auto table = table_from_closes({1.5, 2.25, 3.125});
  std::ostringstream out;
  write_feature_csv(table, out);
  CHECK(out.str().rfind("date,close,volume,sma,ema,rsi,bmsb,sentiment\n", 0) == 0);
  std::istringstream in(out.str());
  CHECK(read_feature_csv(in) == table);

  std::istringstream missing("date,close,volume,sma,ema,rsi,bmsb\n");
  CHECK(code_of([&] { read_feature_csv(missing); }) == ErrorCode::MissingColumn);
  std::istringstream backwards(
      "date,close,volume,sma,ema,rsi,bmsb,sentiment\n2020-01-02,1,1,1,1,1,1,0\n2020-01-01,1,1,1,1,1,1,0\n");
  CHECK(code_of([&] { read_feature_csv(backwards); }) == ErrorCode::NonMonotonicDates);
  CHECK(table.index_of(Date(2020, 1, 2)) == 1u);
  CHECK(!table.index_of(Date(2021, 1, 2)));
}

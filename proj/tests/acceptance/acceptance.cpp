// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   btca_acceptance [criterion...]    (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "btca/backtest.hpp"
#include "btca/config.hpp"
#include "btca/indicators.hpp"
#include "btca/lda.hpp"
#include "btca/pipeline.hpp"
#include "btca/policy.hpp"
#include "btca/sentiment.hpp"
#include "btca/trading_env.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace btca;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs_diff(const IndicatorValues& got, const std::vector<std::optional<double>>& want) {
  if (got.size() != want.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i].has_value() != want[i].has_value()) return INFINITY;
    if (got[i]) worst = std::max(worst, std::abs(*got[i] - *want[i]));
  }
  return worst;
}

// 1
Verdict indicator_oracles() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    auto p = test_support::random_prices(500, rng);
    worst = std::max(worst, max_abs_diff(sma(p, 140), oracle::sma(p, 140)));
    worst = std::max(worst, max_abs_diff(sma(p, 20), oracle::sma(p, 20)));
    worst = std::max(worst, max_abs_diff(ema(p, 147, 2.0), oracle::ema(p, 147, 2.0)));
    worst = std::max(worst, max_abs_diff(ema(p, 21, 2.0), oracle::ema(p, 21, 2.0)));
    worst = std::max(worst, max_abs_diff(rsi(p, 14), oracle::rsi(p, 14)));
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-9 && dt < 10.0, fmt("max abs error %.3g over 100 series x 500 bars, %.2f s", worst, dt)};
}

// 2
Verdict bmsb_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t n = 1'000'000;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> log_level(-3.0, 6.0), coeff(0.01, 0.99), jitter(-0.5, 0.5);
  const double kp = 0.15, ks = 0.7;
  std::vector<double> p(n), s(n), e(n), out(n), p_up(n), out_up(n), sc_p(n), sc_s(n), sc_e(n), sc_out(n);
  std::vector<double> lo_in(n), lo_edge(n), hi_in(n), hi_edge(n), lo_in_out(n), lo_edge_out(n), hi_in_out(n),
      hi_edge_out(n), far_p(n), far_up(n), far_out(n), far_up_out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = std::pow(10.0, log_level(rng));
    s[i] = mu * (1.0 + 0.1 * jitter(rng));
    e[i] = 2.0 * mu - s[i];  // same mean, different components
    const double m = (s[i] + e[i]) / 2.0;
    // Half the prices near the band, half up to four decades away from it.
    p[i] = i % 2 ? m * (1.0 + 0.4 * jitter(rng)) : m * std::pow(10.0, 8.0 * jitter(rng));
    p_up[i] = p[i] * (1.0 + 1e-6);
    // Twelve decades away the index is within 1e-10 of +-100 and a bump can
    // fall below one ulp, so only non-decrease is checked there.
    far_p[i] = m * std::pow(10.0, 24.0 * jitter(rng));
    far_up[i] = far_p[i] * (1.0 + 1e-6);
    const double c = std::pow(10.0, log_level(rng) / 3.0);
    sc_p[i] = c * p[i];
    sc_s[i] = c * s[i];
    sc_e[i] = c * e[i];
    lo_edge[i] = m * (1.0 - kp);
    lo_in[i] = std::nextafter(lo_edge[i], INFINITY);
    hi_edge[i] = m * (1.0 + kp);
    hi_in[i] = std::nextafter(hi_edge[i], 0.0);
  }
  bmsb_index(p, s, e, out, kp, ks);
  bmsb_index(p_up, s, e, out_up, kp, ks);
  bmsb_index(sc_p, sc_s, sc_e, sc_out, kp, ks);
  bmsb_index(lo_in, s, e, lo_in_out, kp, ks);
  bmsb_index(lo_edge, s, e, lo_edge_out, kp, ks);
  bmsb_index(hi_in, s, e, hi_in_out, kp, ks);
  bmsb_index(hi_edge, s, e, hi_edge_out, kp, ks);
  bmsb_index(far_p, s, e, far_out, kp, ks);
  bmsb_index(far_up, s, e, far_up_out, kp, ks);

  std::size_t range_bad = 0, mono_bad = 0, scale_bad = 0;
  double edge_gap = 0.0, scale_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(out[i] > -100.0 && out[i] < 100.0)) ++range_bad;
    if (!(out_up[i] > out[i])) ++mono_bad;
    if (!(far_out[i] > -100.0 && far_out[i] < 100.0)) ++range_bad;
    if (!(far_up_out[i] >= far_out[i])) ++mono_bad;
    const double sg = std::abs(sc_out[i] - out[i]);
    scale_gap = std::max(scale_gap, sg);
    if (sg > 1e-9) ++scale_bad;
    edge_gap = std::max({edge_gap, std::abs(lo_in_out[i] - lo_edge_out[i]), std::abs(hi_in_out[i] - hi_edge_out[i]),
                         std::abs(lo_edge_out[i] + 100.0 * ks), std::abs(hi_edge_out[i] - 100.0 * ks)});
  }
  // Random coefficients, scalar path.
  for (std::size_t i = 0; i < 100'000; ++i) {
    const double a = coeff(rng), b = coeff(rng);
    const double v = bmsb_index(p[i], s[i], e[i], a, b);
    if (!(v > -100.0 && v < 100.0)) ++range_bad;
    if (!(bmsb_index(p_up[i], s[i], e[i], a, b) > v)) ++mono_bad;
  }
  const double dt = seconds_since(t0);
  const bool pass = range_bad == 0 && mono_bad == 0 && scale_bad == 0 && edge_gap < 1e-9 && dt < 30.0;
  return {pass, fmt("1e6 inputs: edge mismatch %.3g, scale gap %.3g, range violations %zu, monotonicity "
                    "violations %zu, %.2f s",
                    edge_gap, scale_gap, range_bad, mono_bad, dt)};
}

// 3
Verdict truth_table() {
  // (Buy, Short) -> BUY, (Sell, Short) -> SELL, anything while Long -> HOLD.
  const bool pass = final_recommendation(AgentAction::Buy, Position::Short) == FinalRecommendation::BUY &&
                    final_recommendation(AgentAction::Sell, Position::Short) == FinalRecommendation::SELL &&
                    final_recommendation(AgentAction::Buy, Position::Long) == FinalRecommendation::HOLD &&
                    final_recommendation(AgentAction::Sell, Position::Long) == FinalRecommendation::HOLD;
  std::string table;
  for (auto p : {Position::Short, Position::Long}) {
    for (auto a : {AgentAction::Buy, AgentAction::Sell}) {
      table += std::string(to_string(a)) + "/" + std::string(to_string(p)) + "=" +
               std::string(to_string(final_recommendation(a, p))) + " ";
    }
  }
  return {pass, table};
}

// 4
Verdict environment_accounting() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto c = test_support::random_prices(10, rng);
    auto table = test_support::table_from_closes(c);
    EnvConfig cfg;
    cfg.window = 1 + rng() % 4;
    cfg.fee = (trial % 4) * 0.001;
    TradingEnv env(table, Normalizer::identity(kFeatureCount), cfg);
    auto [state, obs] = env.reset(cfg.window);
    std::vector<int> actions;
    while (!state.done) {
      const int a = static_cast<int>(rng() & 1);
      actions.push_back(a);
      state = env.step(state, a ? AgentAction::Buy : AgentAction::Sell).state;
    }
    auto want = oracle::replay(c, cfg.window, actions, cfg.fee);
    worst = std::max({worst, std::abs(state.total_reward - want.reward) / std::max(1.0, std::abs(want.reward)),
                      std::abs(state.total_profit - want.profit) / std::max(1.0, std::abs(want.profit))});
  }
  return {worst < 1e-9, fmt("1000 traces on 10-bar series, max relative deviation %.3g", worst)};
}

// 5
Verdict gradient_checks() {
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double eps = 1e-5;
  double worst[3] = {0.0, 0.0, 0.0};
  for (int net = 0; net < 20; ++net) {
    NetworkShape shape{2 + static_cast<std::size_t>(net % 4), 2 + static_cast<std::size_t>(net % 3)};
    std::vector<double> theta(shape.parameter_count());
    for (auto& x : theta) x = 0.8 * u(rng);
    PolicyParams params(shape, theta);
    LossBatch batch;
    for (int t = 0; t < 1 + net % 4; ++t) {
      std::vector<double> obs(shape.input);
      for (auto& x : obs) x = 1.5 * u(rng);
      batch.observations.push_back(obs);
      batch.actions.push_back(rng() & 1 ? AgentAction::Buy : AgentAction::Sell);
      batch.returns.push_back(u(rng));
      batch.advantages.push_back(u(rng));
    }
    LossCoefficients coeffs{0.5, 0.01 + 0.5 * (u(rng) + 1.0)};
    for (int term = 0; term < 3; ++term) {
      LossTerms mask{term == 0, term == 1, term == 2};
      auto pick = [&](const LossBreakdown& l) { return term == 0 ? l.policy : term == 1 ? l.value : l.entropy; };
      std::vector<double> grad(theta.size());
      loss_gradient(params, batch, coeffs, mask, grad);
      for (std::size_t i = 0; i < grad.size(); ++i) {
        PolicyParams plus = params, minus = params;
        plus.values()[i] += eps;
        minus.values()[i] -= eps;
        const double fd =
            (pick(evaluate_loss(plus, batch, coeffs)) - pick(evaluate_loss(minus, batch, coeffs))) / (2.0 * eps);
        const double denom = std::max({std::abs(grad[i]), std::abs(fd), 1e-6});
        worst[term] = std::max(worst[term], std::abs(grad[i] - fd) / denom);
      }
    }
  }
  const bool pass = worst[0] < 1e-4 && worst[1] < 1e-4 && worst[2] < 1e-4;
  return {pass, fmt("20 networks, worst relative error policy %.3g value %.3g entropy %.3g", worst[0], worst[1],
                    worst[2])};
}

// Buy pays +1, Sell pays -1; every step is a one-step episode.
class Bandit : public Environment {
 public:
  std::size_t observation_size() const override { return 1; }
  Observation reset() override { return {1.0}; }
  Outcome step(AgentAction a) override { return {{1.0}, a == AgentAction::Buy ? 1.0 : -1.0, true}; }
};

// 6
Verdict bandit_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  int ok = 0;
  std::string probs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Bandit env;
    TrainConfig cfg;
    cfg.total_timesteps = 2000;  // one update per step with rollout_len 5 and one-step episodes
    cfg.max_grad_norm = 0.0;
    cfg.seed = seed;
    auto report = train(env, cfg);
    const double p = forward(report.params, std::vector<double>{1.0}).probs[1];
    ok += p > 0.95 && report.updates.size() <= 2000;
    probs += fmt("%.4f ", p);
  }
  const double dt = seconds_since(t0);
  return {ok == 5 && dt < 60.0, fmt("pi(buy) after 2000 updates: %s(%d/5), %.2f s", probs.c_str(), ok, dt)};
}

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }
double var_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

// 7
Verdict sinusoid_backtest() {
  const auto t0 = std::chrono::steady_clock::now();
  IndicatorConfig ind_cfg;
  const std::size_t train_rows = 700, test_rows = 300;
  const std::size_t n = ind_cfg.defined_from() + train_rows + test_rows;
  std::vector<PriceBar> bars;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 100.0 * (1.0 + 0.1 * std::sin(2.0 * M_PI * static_cast<double>(i) / 50.0));
    bars.push_back({Date(2015, 1, 1) + static_cast<int>(i), c, c, c, c, 1000.0});
  }
  PriceSeries series(bars);
  auto table = join_features(series, compute_indicator_frames(series, ind_cfg).frames, {});
  EnvConfig env;
  const Date test_start = table.date(train_rows);
  BacktestRange range{test_start, table.date(table.size() - 1)};

  std::vector<double> trained;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    TrainConfig cfg;
    cfg.total_timesteps = 20000;
    cfg.seed = seed;
    auto outcome = train_on_features(table, test_start, env, cfg);
    trained.push_back(run_backtest(outcome.model, table, range).total_profit);
  }
  auto norm = Normalizer::fit(table, 0, train_rows);
  std::vector<double> random;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    std::mt19937_64 rng(seed);
    ActionSource coin = [&](const Observation&, std::size_t) {
      return uniform01(rng) < 0.5 ? AgentAction::Sell : AgentAction::Buy;
    };
    random.push_back(run_backtest(coin, table, range, norm, env).total_profit);
  }
  const double se = std::sqrt(var_of(trained) / trained.size() + var_of(random) / random.size());
  const double gap = mean_of(trained) - mean_of(random);
  const double dt = seconds_since(t0);
  return {gap > 2.0 * se && dt < 300.0,
          fmt("trained profit %.4f (5 seeds) vs random %.4f (200 runs), gap %.4f = %.1f pooled SE, %.1f s",
              mean_of(trained), mean_of(random), gap, gap / se, dt)};
}

using Tokens = std::vector<std::string>;

std::vector<Tokens> vocabularies(std::size_t topics, std::size_t words) {
  std::vector<Tokens> v(topics);
  for (std::size_t t = 0; t < topics; ++t)
    for (std::size_t w = 0; w < words; ++w) v[t].push_back("topic" + std::to_string(t) + "word" + std::to_string(w));
  return v;
}

// 8
Verdict lda_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(88);

  // Planted topics: every document draws from one vocabulary.
  auto vocab = vocabularies(3, 15);
  std::vector<Tokens> docs;
  for (std::size_t d = 0; d < 3000; ++d) {
    const auto& v = vocab[d % 3];
    Tokens doc;
    for (int i = 0; i < 15; ++i) doc.push_back(v[rng() % v.size()]);
    docs.push_back(doc);
  }
  LdaConfig cfg;
  cfg.num_topics = 3;
  cfg.iterations = 500;
  cfg.seed = 3;
  auto model = fit_lda(docs, cfg);
  const std::size_t V = model.vocabulary().size();
  double min_purity = 1.0;
  std::set<std::size_t> owners;
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> mass(3, 0.0);
    for (std::size_t t = 0; t < 3; ++t)
      for (const auto& w : vocab[t]) mass[t] += model.topic_word_counts()[k * V + *model.vocabulary().id(w)];
    const auto best = std::max_element(mass.begin(), mass.end());
    owners.insert(static_cast<std::size_t>(best - mass.begin()));
    min_purity = std::min(min_purity, *best / std::accumulate(mass.begin(), mass.end(), 0.0));
  }
  const bool purity_ok = min_purity > 0.9 && owners.size() == 3;

  // Ad procedure: three regular topics plus an ad topic whose posts also mention regular words.
  auto general = vocabularies(3, 15);
  const Tokens ad_vocab{"free",  "claim", "airdrop", "bonus",  "giveaway", "promo",
                        "prize", "win",   "referral", "signup", "reward",   "faucet"};
  auto regular_doc = [&](std::size_t topic) {
    Tokens doc;
    for (int i = 0; i < 12; ++i)
      doc.push_back(uniform01(rng) < 0.01 ? ad_vocab[rng() % ad_vocab.size()]
                                          : general[topic][rng() % general[topic].size()]);
    return doc;
  };
  auto ad_doc = [&] {
    Tokens doc;
    for (int i = 0; i < 12; ++i)
      doc.push_back(uniform01(rng) < 0.6 ? ad_vocab[rng() % ad_vocab.size()] : general[rng() % 3][rng() % 15]);
    return doc;
  };
  std::vector<Tokens> corpus;
  for (std::size_t d = 0; d < 3000; ++d) corpus.push_back(d % 4 == 3 ? ad_doc() : regular_doc(d % 4));
  LdaConfig ad_cfg;
  ad_cfg.num_topics = 4;
  ad_cfg.iterations = 500;
  ad_cfg.seed = 4;
  auto ad_model = fit_lda(corpus, ad_cfg);
  std::vector<Tokens> seeds;
  for (int i = 0; i < 5; ++i) seeds.push_back(ad_doc());
  const std::size_t ad_topic = identify_ad_topic(ad_model, seeds);
  auto ad_words = extract_ad_word_list(ad_model, ad_topic, 10);
  std::size_t planted_hits = 0;
  for (const auto& w : ad_words) planted_hits += std::count(ad_vocab.begin(), ad_vocab.end(), w);
  const bool identified = planted_hits == ad_words.size();

  std::vector<CleanTweet> held_ads, held_regular;
  for (int i = 0; i < 1000; ++i) held_ads.push_back(CleanTweet{TweetRecord{}, ad_doc(), 1});
  for (int i = 0; i < 3000; ++i) held_regular.push_back(CleanTweet{TweetRecord{}, regular_doc(i % 3), 1});
  auto tagged_ads = tag_ads(held_ads, ad_words, 2);
  auto tagged_regular = tag_ads(held_regular, ad_words, 2);
  auto zero = [](const std::vector<CleanTweet>& v) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [](const CleanTweet& t) { return t.ad_score == 0; })) /
           static_cast<double>(v.size());
  };
  const double recall = zero(tagged_ads), false_pos = zero(tagged_regular);
  const double dt = seconds_since(t0);
  const bool pass = purity_ok && identified && recall >= 0.95 && false_pos <= 0.02 && dt < 120.0;
  return {pass, fmt("purity %.4f, ad topic %zu with %zu/%zu planted words, held-out ads tagged %.1f%%, false "
                    "positives %.2f%%, %.1f s",
                    min_purity, ad_topic, planted_hits, ad_words.size(), 100.0 * recall, 100.0 * false_pos, dt)};
}

// 9
Verdict weighted_sentiment() {
  WeightRules rules;
  rules.prominent_users = {"whale"};
  rules.keywords = {"etf"};
  const Date d(2021, 2, 1);
  auto make = [&](std::string user, Tokens tokens, long long retweets, int ad_score) {
    CleanTweet t;
    t.original.date = d;
    t.original.username = std::move(user);
    t.original.retweets = retweets;
    t.tokens = std::move(tokens);
    t.ad_score = ad_score;
    return t;
  };
  // base 1 + prominent 0.5 + keyword 0.2 + retweets 0.3 = 2; plain = 1; ad = 0.
  auto heavy = make("whale", {"etf", "approved"}, 150, 1);
  auto plain = make("someone", {"price", "down"}, 0, 1);
  auto ad = make("promo_bot", {"free", "claim"}, 500, 0);
  std::vector<ScoredTweet> day{{d, 0.8, tweet_weight(heavy, rules)},
                               {d, -0.4, tweet_weight(plain, rules)},
                               {d, 0.9, tweet_weight(ad, rules)}};
  const double hand = (0.8 * 2.0 + (-0.4) * 1.0 + 0.9 * 0.0) / 3.0;
  const double got = daily_weighted_sentiment(day)[0].weighted_score;
  const bool example_ok = std::abs(got - hand) <= 1e-12 && std::abs(got - 0.4) <= 1e-12;

  // Ads weigh exactly zero, so a day of only ads scores exactly zero and mixed days
  // equal the ad-free numerator over the full count.
  std::mt19937_64 rng(9);
  bool ads_zero = true;
  double mixed_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ScoredTweet> all, only_ads;
    double numerator = 0.0;
    std::size_t count = 0;
    for (int i = 0; i < 20; ++i) {
      const bool is_ad = rng() % 3 == 0;
      auto t = make(rng() % 5 ? "user" : "whale", {"etf"}, static_cast<long long>(rng() % 400), is_ad ? 0 : 1);
      const double v = 2.0 * uniform01(rng) - 1.0;
      const double w = tweet_weight(t, rules);
      if (is_ad && (w != 0.0 || v * w != 0.0)) ads_zero = false;
      all.push_back({d, v, w});
      if (is_ad) only_ads.push_back({d, v, w});
      numerator += is_ad ? 0.0 : v * w;
      ++count;
    }
    if (!only_ads.empty() && daily_weighted_sentiment(only_ads)[0].weighted_score != 0.0) ads_zero = false;
    mixed_gap = std::max(mixed_gap, std::abs(daily_weighted_sentiment(all)[0].weighted_score -
                                             numerator / static_cast<double>(count)));
  }

  BacktestResult r;
  r.records.push_back(BacktestRecord{});
  r.total_profit = 1.69486;
  const double pct = summarize(r).percent_return;
  const bool pct_ok = std::abs(pct - 69.486) < 1e-9;
  return {example_ok && ads_zero && mixed_gap < 1e-12 && pct_ok,
          fmt("3-tweet day %.15g (hand %.15g), ad contributions zero: %s, mixed-day gap %.3g, 1.69486 -> %.3f%%",
              got, hand, ads_zero ? "yes" : "no", mixed_gap, pct)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10
Verdict pipeline_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<fs::path> dirs;
  for (const char* name : {"acceptance_run_a", "acceptance_run_b"}) {
    auto dir = test_support::temp_dir(name);
    auto cfg = load_pipeline_config(test_support::fixture("pipeline.ini"), {{"output.dir", dir.string()}});
    run_pipeline(cfg);
    dirs.push_back(dir);
  }
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), dirs[0]);
    ++files;
    if (!fs::exists(dirs[1] / rel) || slurp(entry.path()) != slurp(dirs[1] / rel)) ++differing;
  }
  std::size_t files_b = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dirs[1])) files_b += entry.is_regular_file();
  const double dt = seconds_since(t0);
  return {files >= 10 && differing == 0 && files == files_b,
          fmt("%zu artifacts compared across two fixture runs, %zu differ, %.1f s", files, differing, dt)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "indicator oracle suite", indicator_oracles},
      {2, "bmsb properties", bmsb_properties},
      {3, "recommendation truth table", truth_table},
      {4, "environment accounting", environment_accounting},
      {5, "gradient checks", gradient_checks},
      {6, "bandit convergence", bandit_convergence},
      {7, "sinusoid backtest", sinusoid_backtest},
      {8, "lda planted topics and ad tagging", lda_recovery},
      {9, "weighted sentiment", weighted_sentiment},
      {10, "pipeline determinism", pipeline_determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}

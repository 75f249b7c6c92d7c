#include "btca/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "btca/csv.hpp"
#include "btca/error.hpp"

namespace btca {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::Io, std::string("no ") + what + " path configured");
  if (!fs::exists(path)) throw Error(ErrorCode::Io, std::string(what) + " file " + path.string() + " does not exist");
}

struct Stage {
  std::string name;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  std::string settings;
  std::function<void()> run;
};

bool up_to_date(const Stage& stage, const fs::path& stamp) {
  if (!fs::exists(stamp)) return false;
  std::ifstream in(stamp, std::ios::binary);
  std::string saved((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (saved != stage.settings) return false;
  fs::file_time_type newest_input = fs::file_time_type::min();
  for (const auto& p : stage.inputs) {
    if (!fs::exists(p)) return false;
    newest_input = std::max(newest_input, fs::last_write_time(p));
  }
  for (const auto& p : stage.outputs) {
    if (!fs::exists(p) || fs::last_write_time(p) < newest_input) return false;
  }
  return true;
}

// The describe() lines whose key starts with one of `prefixes`.
std::string settings_for(const PipelineConfig& cfg, std::initializer_list<std::string_view> prefixes) {
  std::string all = describe(cfg), out;
  std::size_t pos = 0;
  while (pos < all.size()) {
    auto end = all.find('\n', pos);
    std::string_view line(all.data() + pos, end - pos);
    for (auto p : prefixes) {
      if (line.substr(0, p.size()) == p) {
        out.append(line);
        out.push_back('\n');
        break;
      }
    }
    pos = end + 1;
  }
  return out;
}

}  // namespace

FeatureTable join_features(const PriceSeries& prices, const std::vector<IndicatorFrame>& indicators,
                           const std::vector<DailySentiment>& sentiment) {
  std::map<Date, double> score;
  for (const auto& d : sentiment) score[d.date] = d.weighted_score;
  std::map<Date, const PriceBar*> bars;
  for (const auto& b : prices.bars()) bars[b.date] = &b;

  std::vector<Date> dates;
  std::vector<double> values;
  for (const auto& f : indicators) {
    auto bar = bars.find(f.date);
    if (bar == bars.end()) continue;
    auto s = score.find(f.date);
    dates.push_back(f.date);
    for (double v : {bar->second->close, bar->second->volume, f.sma, f.ema, f.rsi, f.bmsb,
                     s == score.end() ? 0.0 : s->second})
      values.push_back(v);
  }
  if (dates.empty()) throw Error(ErrorCode::EmptyJoin, "prices and indicators share no dates");
  return FeatureTable(std::move(dates), std::move(values));
}

Date test_start_date(const PriceSeries& prices, std::size_t train_len, std::size_t window) {
  return split(prices, {train_len, window}).test.front().date;
}

TrainOutcome train_on_features(const FeatureTable& features, Date test_start, const EnvConfig& env,
                               const TrainConfig& train_cfg) {
  auto dates = features.dates();
  const std::size_t rows =
      static_cast<std::size_t>(std::lower_bound(dates.begin(), dates.end(), test_start) - dates.begin());
  if (rows <= env.window)
    throw Error(ErrorCode::WindowOutOfRange, std::to_string(rows) + " training rows before " + test_start.iso() +
                                                 " do not exceed the window of " + std::to_string(env.window));
  TrainOutcome out;
  out.train_rows = rows;
  auto norm = Normalizer::fit(features, 0, rows);
  TradingEpisode episode(TradingEnv(features, norm, env, rows), env.window);
  out.report = train(episode, train_cfg);
  out.model.params = out.report.params;
  out.model.normalizer = std::move(norm);
  out.model.env = env;
  out.model.train = train_cfg;
  return out;
}

void write_training_log(const TrainReport& report, const fs::path& path) {
  auto out = open_out(path);
  out << "episode,reward,profit\n";
  for (std::size_t i = 0; i < report.episode_rewards.size(); ++i) {
    out << i + 1 << ',' << csv::format_double(report.episode_rewards[i]) << ','
        << (i < report.episode_profits.size() ? csv::format_double(report.episode_profits[i]) : std::string{})
        << '\n';
  }
}

SentimentReport run_sentiment_from_files(const PipelinePaths& paths, const SentimentStageConfig& cfg,
                                         std::optional<std::pair<Date, Date>> range) {
  require_file(paths.tweets, "tweets");
  require_file(paths.lexicon, "lexicon");
  require_file(paths.stopwords, "stopwords");
  require_file(paths.ad_seeds, "ad_seeds");
  require_file(paths.rules, "rules");
  auto tweets = load_tweets_csv(paths.tweets);
  auto lexicon = Lexicon::load(paths.lexicon);
  auto stopwords = load_word_list(paths.stopwords);
  auto seeds = load_lines(paths.ad_seeds);
  auto rules = load_weight_rules(paths.rules);
  return run_sentiment_stage(tweets, lexicon, stopwords, seeds, rules, cfg, range);
}

void write_sentiment_report(const SentimentReport& report, const fs::path& path) {
  nlohmann::ordered_json j;
  j["tweets_read"] = report.tweets_read;
  j["tweets_dropped"] = report.tweets_dropped;
  j["ads_tagged"] = report.ads_tagged;
  j["ad_topic"] = report.ad_topic;
  j["ad_words"] = std::vector<std::string>(report.ad_words.begin(), report.ad_words.end());
  j["topic_words"] = report.topic_words;
  j["days"] = report.daily.size();
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::vector<StageOutcome> run_pipeline(const PipelineConfig& cfg, const PipelineOptions& options) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  auto at = [&](const char* name) { return dir / name; };
  const fs::path stamps = dir / ".stamps";

  std::vector<Stage> stages;
  stages.push_back({"ingest", {cfg.paths.prices}, {at(artifact::kPrices)}, settings_for(cfg, {"paths.prices"}), [&] {
                      require_file(cfg.paths.prices, "prices");
                      auto series = load_price_csv(cfg.paths.prices);
                      auto out = open_out(at(artifact::kPrices));
                      write_price_csv(series, out);
                    }});
  stages.push_back({"indicators", {at(artifact::kPrices)}, {at(artifact::kIndicators)},
                    settings_for(cfg, {"indicators."}), [&] {
                      auto series = load_price_csv(at(artifact::kPrices));
                      auto table = compute_indicator_frames(series, cfg.indicators);
                      auto out = open_out(at(artifact::kIndicators));
                      write_indicator_csv(table, out);
                    }});
  stages.push_back({"sentiment",
                    {at(artifact::kPrices), cfg.paths.tweets, cfg.paths.lexicon, cfg.paths.stopwords,
                     cfg.paths.ad_seeds, cfg.paths.rules},
                    {at(artifact::kSentiment), at(artifact::kSentimentReport)},
                    settings_for(cfg, {"paths.", "sentiment."}), [&] {
                      auto series = load_price_csv(at(artifact::kPrices));
                      auto report = run_sentiment_from_files(cfg.paths, cfg.sentiment,
                                                             std::pair{series.front().date, series.back().date});
                      {
                        auto out = open_out(at(artifact::kSentiment));
                        write_sentiment_csv(report.daily, out);
                      }
                      write_sentiment_report(report, at(artifact::kSentimentReport));
                    }});
  stages.push_back({"join",
                    {at(artifact::kPrices), at(artifact::kIndicators), at(artifact::kSentiment)},
                    {at(artifact::kFeatures)},
                    "",
                    [&] {
                      auto table = join_features(load_price_csv(at(artifact::kPrices)),
                                                 read_indicator_csv(at(artifact::kIndicators)),
                                                 read_sentiment_csv(at(artifact::kSentiment)));
                      auto out = open_out(at(artifact::kFeatures));
                      write_feature_csv(table, out);
                    }});
  stages.push_back({"train",
                    {at(artifact::kPrices), at(artifact::kFeatures)},
                    {at(artifact::kModel), at(artifact::kTrainingLog)},
                    settings_for(cfg, {"split.", "env.", "train."}), [&] {
                      auto prices = load_price_csv(at(artifact::kPrices));
                      auto features = load_feature_csv(at(artifact::kFeatures));
                      auto start = test_start_date(prices, cfg.train_len, cfg.env.window);
                      auto outcome = train_on_features(features, start, cfg.env, cfg.train);
                      save_model(outcome.model, at(artifact::kModel));
                      write_training_log(outcome.report, at(artifact::kTrainingLog));
                    }});
  stages.push_back({"backtest",
                    {at(artifact::kPrices), at(artifact::kFeatures), at(artifact::kModel)},
                    {at(artifact::kBacktestCsv), at(artifact::kBacktestJsonl), at(artifact::kSummary)},
                    settings_for(cfg, {"split.", "backtest."}), [&] {
                      auto prices = load_price_csv(at(artifact::kPrices));
                      auto features = load_feature_csv(at(artifact::kFeatures));
                      auto model = load_model(at(artifact::kModel));
                      auto start = test_start_date(prices, cfg.train_len, model.env.window);
                      auto result = run_backtest(model, features, {start, features.date(features.size() - 1)},
                                                 cfg.deterministic_backtest, cfg.backtest_seed);
                      write_backtest_artifacts(result, dir);
                    }});

  std::vector<StageOutcome> outcomes;
  for (auto& stage : stages) {
    const fs::path stamp = stamps / stage.name;
    StageOutcome outcome{stage.name, false};
    try {
      if (!options.force && up_to_date(stage, stamp)) {
        outcome.skipped = true;
      } else {
        fs::remove(stamp);
        stage.run();
        auto out = open_out(stamp);
        out << stage.settings;
      }
    } catch (const Error& e) {
      throw Error(e.code(), stage.name + " stage: " + e.detail());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Io, stage.name + " stage: " + e.what());
    }
    outcomes.push_back(outcome);
    if (options.on_stage) options.on_stage(outcome);
  }
  return outcomes;
}

}  // namespace btca

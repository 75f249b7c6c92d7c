// btcassist: command-line entry point for every pipeline stage and the HTTP service.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "btca/backtest.hpp"
#include "btca/config.hpp"
#include "btca/error.hpp"
#include "btca/pipeline.hpp"
#include "btca/service.hpp"

namespace fs = std::filesystem;
using namespace btca;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct Globals {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

Date parse_date(const std::string& text, const char* flag) {
  auto d = Date::parse(text);
  if (!d) throw Error(ErrorCode::InvalidConfig, std::string(flag) + " expects YYYY-MM-DD, got '" + text + "'");
  return *d;
}

// flags > --set > file > defaults
PipelineConfig resolve_config(const Globals& g, std::vector<ConfigOverride> flags = {}) {
  std::vector<ConfigOverride> overrides;
  for (const auto& s : g.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--set expects section.key=value, got '" + s + "'");
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (g.seed) {
    const auto seed = std::to_string(*g.seed);
    overrides.insert(overrides.end(), {{"train.seed", seed}, {"sentiment.seed", seed}, {"backtest.seed", seed}});
  }
  overrides.insert(overrides.end(), flags.begin(), flags.end());
  return g.config.empty() ? default_pipeline_config(overrides) : load_pipeline_config(g.config, overrides);
}

void add_flag_override(std::vector<ConfigOverride>& out, const std::string& key, const std::string& value) {
  if (!value.empty()) out.emplace_back(key, value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bitcoin trading assistant: indicators, tweet sentiment, A2C policy, backtest and HTTP service"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "INI pipeline configuration")->check(CLI::ExistingFile);
  app.add_option("--set", g.sets, "Override a config key, section.key=value (repeatable)");
  app.add_option("--seed", g.seed, "Seed for LDA, training and sampled backtests");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a price CSV and write it in canonical form");
  std::string ingest_in, ingest_out;
  ingest->add_option("--prices", ingest_in, "Input OHLCV CSV")->required();
  ingest->add_option("--out", ingest_out, "Output CSV")->required();

  // indicators
  auto* indicators = app.add_subcommand("indicators", "Compute SMA, EMA, RSI and the BMSB index");
  std::string ind_prices, ind_out;
  indicators->add_option("--prices", ind_prices, "Price CSV")->required();
  indicators->add_option("--out", ind_out, "Indicator CSV")->required();

  // sentiment
  auto* sentiment = app.add_subcommand("sentiment", "Clean tweets, find the ad topic, and write daily weighted sentiment");
  std::string s_tweets, s_lexicon, s_stop, s_seeds, s_rules, s_out, s_report, s_from, s_to;
  sentiment->add_option("--tweets", s_tweets, "Tweet CSV");
  sentiment->add_option("--lexicon", s_lexicon, "Valence lexicon (word<TAB>score)");
  sentiment->add_option("--stopwords", s_stop, "Stopword list");
  sentiment->add_option("--ad-seeds", s_seeds, "Known advertisement texts, one per line");
  sentiment->add_option("--rules", s_rules, "Weighting rules INI");
  sentiment->add_option("--out", s_out, "Daily sentiment CSV")->required();
  sentiment->add_option("--report", s_report, "JSON report with topics and ad words");
  sentiment->add_option("--from", s_from, "Emit every day from this date");
  sentiment->add_option("--to", s_to, "Emit every day up to this date");

  // join
  auto* join = app.add_subcommand("join", "Join prices, indicators and sentiment into the feature table");
  std::string j_prices, j_ind, j_sent, j_out;
  join->add_option("--prices", j_prices, "Price CSV")->required();
  join->add_option("--indicators", j_ind, "Indicator CSV")->required();
  join->add_option("--sentiment", j_sent, "Daily sentiment CSV")->required();
  join->add_option("--out", j_out, "Feature CSV")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train the A2C policy on the training split");
  std::string t_features, t_prices, t_train_end, t_model, t_log, t_timesteps, t_window, t_fee;
  train_cmd->add_option("--features", t_features, "Feature CSV")->required();
  train_cmd->add_option("--prices", t_prices, "Price CSV; the split starts at bar split.train_len");
  train_cmd->add_option("--train-end", t_train_end, "First date excluded from training (instead of --prices)");
  train_cmd->add_option("--model", t_model, "Output model file")->required();
  train_cmd->add_option("--log", t_log, "Per-episode reward/profit CSV");
  train_cmd->add_option("--timesteps", t_timesteps, "train.total_timesteps");
  train_cmd->add_option("--window", t_window, "env.window");
  train_cmd->add_option("--fee", t_fee, "env.fee");

  // backtest
  auto* backtest = app.add_subcommand("backtest", "Replay a trained policy and write the recommendation trace");
  std::string b_model, b_features, b_from, b_to, b_out = ".";
  bool b_sample = false;
  backtest->add_option("--model", b_model, "Model file")->required();
  backtest->add_option("--features", b_features, "Feature CSV")->required();
  backtest->add_option("--from", b_from, "First date of the range (the first window days are warmup)")->required();
  backtest->add_option("--to", b_to, "Last date of the range")->required();
  backtest->add_option("--out-dir", b_out, "Directory for backtest.csv, backtest.jsonl and summary.txt");
  backtest->add_flag("--sample", b_sample, "Sample actions instead of taking the argmax");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve recommendations and series over HTTP");
  ServiceOptions so;
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port")->check(CLI::Range(0, 65535));
  serve->add_option("--model", so.model, "Model file");
  serve->add_option("--features", so.features, "Feature CSV")->required();
  serve->add_option("--backtest", so.backtest, "backtest.csv");
  serve->add_option("--prices", so.prices, "Price CSV for OHLC series");
  serve->add_option("--sentiment", so.sentiment, "Daily sentiment CSV");
  serve->add_option("--sessions", so.sessions, "JSON file persisting session positions");
  serve->add_option("--static", so.static_dir, "Directory served at /");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage, skipping those whose outputs are current");
  std::string p_out;
  bool p_force = false;
  pipeline->add_option("--out", p_out, "Output directory (output.dir)");
  pipeline->add_flag("--force", p_force, "Rerun every stage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ingest) {
      auto series = load_price_csv(ingest_in);
      auto out = open_out(ingest_out);
      write_price_csv(series, out);
      std::cout << "ingest: " << series.size() << " bars " << series.front().date.iso() << " .. "
                << series.back().date.iso() << "\n";
    } else if (*indicators) {
      auto cfg = resolve_config(g);
      auto table = compute_indicator_frames(load_price_csv(ind_prices), cfg.indicators);
      auto out = open_out(ind_out);
      write_indicator_csv(table, out);
      std::cout << "indicators: " << table.frames.size() << " rows from bar " << table.defined_from << "\n";
    } else if (*sentiment) {
      std::vector<ConfigOverride> flags;
      add_flag_override(flags, "paths.tweets", s_tweets);
      add_flag_override(flags, "paths.lexicon", s_lexicon);
      add_flag_override(flags, "paths.stopwords", s_stop);
      add_flag_override(flags, "paths.ad_seeds", s_seeds);
      add_flag_override(flags, "paths.rules", s_rules);
      auto cfg = resolve_config(g, flags);
      std::optional<std::pair<Date, Date>> range;
      if (!s_from.empty() || !s_to.empty()) {
        if (s_from.empty() || s_to.empty()) throw Error(ErrorCode::InvalidConfig, "--from and --to go together");
        range = std::pair{parse_date(s_from, "--from"), parse_date(s_to, "--to")};
      }
      auto report = run_sentiment_from_files(cfg.paths, cfg.sentiment, range);
      {
        auto out = open_out(s_out);
        write_sentiment_csv(report.daily, out);
      }
      if (!s_report.empty()) write_sentiment_report(report, s_report);
      std::cout << "sentiment: " << report.tweets_read << " tweets, " << report.ads_tagged << " tagged as ads, "
                << report.daily.size() << " days\n";
    } else if (*join) {
      auto table = join_features(load_price_csv(j_prices), read_indicator_csv(j_ind), read_sentiment_csv(j_sent));
      auto out = open_out(j_out);
      write_feature_csv(table, out);
      std::cout << "join: " << table.size() << " rows\n";
    } else if (*train_cmd) {
      std::vector<ConfigOverride> flags;
      add_flag_override(flags, "train.total_timesteps", t_timesteps);
      add_flag_override(flags, "env.window", t_window);
      add_flag_override(flags, "env.fee", t_fee);
      auto cfg = resolve_config(g, flags);
      if (t_prices.empty() == t_train_end.empty())
        throw Error(ErrorCode::InvalidConfig, "train needs exactly one of --prices or --train-end");
      const Date start = t_prices.empty() ? parse_date(t_train_end, "--train-end")
                                          : test_start_date(load_price_csv(t_prices), cfg.train_len, cfg.env.window);
      auto outcome = train_on_features(load_feature_csv(t_features), start, cfg.env, cfg.train);
      save_model(outcome.model, t_model);
      if (!t_log.empty()) write_training_log(outcome.report, t_log);
      std::cout << "train: " << outcome.report.timesteps << " steps over " << outcome.train_rows << " rows, "
                << outcome.report.episode_rewards.size() << " episodes\n";
    } else if (*backtest) {
      auto cfg = resolve_config(g);
      auto model = load_model(b_model);
      auto result = run_backtest(model, load_feature_csv(b_features),
                                 {parse_date(b_from, "--from"), parse_date(b_to, "--to")}, !b_sample,
                                 cfg.backtest_seed);
      write_backtest_artifacts(result, b_out);
      write_summary(summarize(result), std::cout);
    } else if (*serve) {
      Service service(so);
      httplib::Server server;
      service.bind(server);
      std::cout << "serving on http://" << host << ":" << port << std::endl;
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitData;
      }
    } else if (*pipeline) {
      std::vector<ConfigOverride> flags;
      add_flag_override(flags, "output.dir", p_out);
      auto cfg = resolve_config(g, flags);
      PipelineOptions opts;
      opts.force = p_force;
      opts.on_stage = [](const StageOutcome& s) {
        std::cout << s.stage << ": " << (s.skipped ? "up to date" : "done") << std::endl;
      };
      run_pipeline(cfg, opts);
      std::cout << "artifacts in " << cfg.output_dir.string() << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.category()) {
      case ErrorCategory::Usage: return kExitUsage;
      case ErrorCategory::Numeric: return kExitNumeric;
      case ErrorCategory::Data: return kExitData;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}

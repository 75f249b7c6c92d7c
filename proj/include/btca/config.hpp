#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btca/indicators.hpp"
#include "btca/policy.hpp"
#include "btca/sentiment.hpp"
#include "btca/sentiment_stage.hpp"
#include "btca/trading_env.hpp"

namespace btca {

struct PipelinePaths {
  std::filesystem::path prices;
  std::filesystem::path tweets;
  std::filesystem::path lexicon;
  std::filesystem::path stopwords;
  std::filesystem::path ad_seeds;
  std::filesystem::path rules;
};

struct PipelineConfig {
  PipelinePaths paths;
  IndicatorConfig indicators;
  SentimentStageConfig sentiment;
  std::size_t train_len = 1233;
  EnvConfig env;
  TrainConfig train;
  bool deterministic_backtest = true;
  std::uint64_t backtest_seed = 0;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

/// `section.key = value` applied on top of a loaded config.
using ConfigOverride = std::pair<std::string, std::string>;

/// Sets one key. Relative paths resolve against `base_dir`. Unknown keys and
/// unparsable values throw InvalidConfig.
void apply_setting(PipelineConfig& cfg, std::string_view section, std::string_view key, const std::string& value,
                   const std::filesystem::path& base_dir);

/// INI file over the defaults, then `overrides` (paths in overrides resolve against the working directory).
PipelineConfig load_pipeline_config(const std::filesystem::path& path, const std::vector<ConfigOverride>& overrides = {});
PipelineConfig default_pipeline_config(const std::vector<ConfigOverride>& overrides = {});

/// Parses "100:0.3, 500:0.5"; an empty string is an empty schedule.
StepSchedule parse_step_schedule(std::string_view text, std::string_view name);

/// `[weights]` section of a rules file; missing keys keep their defaults.
WeightRules load_weight_rules(const std::filesystem::path& path);

/// One `section.key=value` line per setting, in a fixed order. Used to detect config changes between runs.
std::string describe(const PipelineConfig& cfg);

}  // namespace btca

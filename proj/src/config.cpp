#include "btca/config.hpp"

#include <charconv>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "btca/csv.hpp"
#include "btca/error.hpp"

namespace btca {

namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (true) {
    auto comma = text.find(',');
    auto item = trim(text.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view section, std::string_view key, const std::string& value,
                            const char* expected) {
  throw Error(ErrorCode::InvalidConfig, std::string(section) + "." + std::string(key) + " = '" + value +
                                            "' is not " + expected);
}

struct Setter {
  std::string_view section, key;
  const std::string& value;

  double real() const {
    auto v = csv::parse_double(value);
    if (!v) bad_value(section, key, value, "a number");
    return *v;
  }
  std::size_t count() const {
    auto v = csv::parse_int(value);
    if (!v || *v < 0) bad_value(section, key, value, "a non-negative integer");
    return static_cast<std::size_t>(*v);
  }
  std::uint64_t seed() const {
    auto t = trim(value);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) bad_value(section, key, value, "a seed");
    return v;
  }
  bool flag() const {
    auto t = trim(value);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    bad_value(section, key, value, "a boolean");
  }
  fs::path path(const fs::path& base) const {
    fs::path p(std::string(trim(value)));
    if (p.empty()) bad_value(section, key, value, "a path");
    return p.is_absolute() ? p : (base / p).lexically_normal();
  }
};

void apply_weight(WeightRules& rules, std::string_view key, const std::string& value) {
  Setter s{"weights", key, value};
  if (key == "base") rules.base_weight = s.real();
  else if (key == "prominent_user") rules.prominent_user_bonus = s.real();
  else if (key == "keyword") rules.keyword_bonus = s.real();
  else if (key == "prominent_users" || key == "keywords") {
    WordSet words;
    for (auto& w : split_list(value)) {
      for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      words.insert(w);
    }
    (key == "keywords" ? rules.keywords : rules.prominent_users) = std::move(words);
  } else if (key == "retweets") rules.retweets = parse_step_schedule(value, key);
  else if (key == "replies") rules.replies = parse_step_schedule(value, key);
  else if (key == "favorites") rules.favorites = parse_step_schedule(value, key);
  else if (key == "time") rules.time = parse_step_schedule(value, key);
  else throw Error(ErrorCode::InvalidConfig, "unknown key weights." + std::string(key));
}

boost::property_tree::ptree read_ini(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::Io, "config file " + path.string() + " does not exist");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return tree;
}

void apply_overrides(PipelineConfig& cfg, const std::vector<ConfigOverride>& overrides) {
  for (const auto& [name, value] : overrides) {
    auto dot = name.find('.');
    if (dot == std::string::npos) throw Error(ErrorCode::InvalidConfig, "override '" + name + "' needs section.key");
    apply_setting(cfg, std::string_view(name).substr(0, dot), std::string_view(name).substr(dot + 1), value,
                  fs::current_path());
  }
}

}  // namespace

void PipelineConfig::validate() const {
  indicators.validate();
  sentiment.lda.validate();
  env.validate();
  train.validate();
  if (train_len == 0) throw Error(ErrorCode::InvalidConfig, "split.train_len must be positive");
  if (sentiment.top_n == 0) throw Error(ErrorCode::InvalidConfig, "sentiment.top_n must be positive");
  if (sentiment.min_hits == 0) throw Error(ErrorCode::InvalidConfig, "sentiment.min_hits must be positive");
}

void apply_setting(PipelineConfig& cfg, std::string_view section, std::string_view key, const std::string& value,
                   const fs::path& base_dir) {
  Setter s{section, key, value};
  auto unknown = [&] {
    throw Error(ErrorCode::InvalidConfig, "unknown key " + std::string(section) + "." + std::string(key));
  };
  if (section == "paths") {
    auto& p = cfg.paths;
    if (key == "prices") p.prices = s.path(base_dir);
    else if (key == "tweets") p.tweets = s.path(base_dir);
    else if (key == "lexicon") p.lexicon = s.path(base_dir);
    else if (key == "stopwords") p.stopwords = s.path(base_dir);
    else if (key == "ad_seeds") p.ad_seeds = s.path(base_dir);
    else if (key == "rules") p.rules = s.path(base_dir);
    else unknown();
  } else if (section == "output") {
    if (key == "dir") cfg.output_dir = s.path(base_dir);
    else unknown();
  } else if (section == "indicators") {
    auto& c = cfg.indicators;
    if (key == "sma_period") c.sma_period = s.count();
    else if (key == "ema_period") c.ema_period = s.count();
    else if (key == "ema_smoothing") c.ema_smoothing = s.real();
    else if (key == "rsi_period") c.rsi_period = s.count();
    else if (key == "price_coeff") c.price_coeff = s.real();
    else if (key == "scaling_coeff") c.scaling_coeff = s.real();
    else unknown();
  } else if (section == "sentiment") {
    auto& c = cfg.sentiment;
    if (key == "num_topics") c.lda.num_topics = s.count();
    else if (key == "iterations") c.lda.iterations = s.count();
    else if (key == "alpha") c.lda.alpha = s.real();
    else if (key == "beta") c.lda.beta = s.real();
    else if (key == "infer_sweeps") c.lda.infer_sweeps = s.count();
    else if (key == "seed") c.lda.seed = s.seed();
    else if (key == "top_n") c.top_n = s.count();
    else if (key == "min_hits") c.min_hits = s.count();
    else if (key == "keep_hashtag_words") c.clean.keep_hashtag_words = s.flag();
    else unknown();
  } else if (section == "split") {
    if (key == "train_len") cfg.train_len = s.count();
    else unknown();
  } else if (section == "env") {
    if (key == "window") cfg.env.window = s.count();
    else if (key == "fee") cfg.env.fee = s.real();
    else if (key == "reward_mode") cfg.env.reward_mode = std::string(trim(value));
    else unknown();
  } else if (section == "train") {
    auto& t = cfg.train;
    if (key == "total_timesteps") t.total_timesteps = s.count();
    else if (key == "rollout_len") t.rollout_len = s.count();
    else if (key == "learning_rate") t.learning_rate = s.real();
    else if (key == "gamma") t.gamma = s.real();
    else if (key == "entropy_coeff") t.entropy_coeff = s.real();
    else if (key == "value_coeff") t.value_coeff = s.real();
    else if (key == "hidden") t.hidden = s.count();
    else if (key == "max_grad_norm") t.max_grad_norm = s.real();
    else if (key == "reward_scale") t.reward_scale = s.real();
    else if (key == "seed") t.seed = s.seed();
    else if (key == "optimizer") {
      auto v = trim(value);
      if (v == "sgd") t.optimizer = Optimizer::Sgd;
      else if (v == "rmsprop") t.optimizer = Optimizer::RmsProp;
      else bad_value(section, key, value, "sgd or rmsprop");
    } else unknown();
  } else if (section == "backtest") {
    if (key == "deterministic") cfg.deterministic_backtest = s.flag();
    else if (key == "seed") cfg.backtest_seed = s.seed();
    else unknown();
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown section [" + std::string(section) + "]");
  }
}

PipelineConfig load_pipeline_config(const fs::path& path, const std::vector<ConfigOverride>& overrides) {
  auto tree = read_ini(path);
  const fs::path base = fs::absolute(path).parent_path();
  PipelineConfig cfg;
  for (const auto& [section, keys] : tree) {
    if (!keys.data().empty()) throw Error(ErrorCode::InvalidConfig, "key '" + section + "' outside a section");
    for (const auto& [key, node] : keys) apply_setting(cfg, section, key, node.data(), base);
  }
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

PipelineConfig default_pipeline_config(const std::vector<ConfigOverride>& overrides) {
  PipelineConfig cfg;
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

StepSchedule parse_step_schedule(std::string_view text, std::string_view name) {
  StepSchedule schedule;
  for (const auto& item : split_list(text)) {
    auto colon = item.find(':');
    auto threshold = colon == std::string::npos ? std::nullopt : csv::parse_double(item.substr(0, colon));
    auto bonus = colon == std::string::npos ? std::nullopt : csv::parse_double(item.substr(colon + 1));
    if (!threshold || !bonus)
      throw Error(ErrorCode::InvalidConfig, std::string(name) + ": '" + item + "' is not threshold:bonus");
    schedule.steps.emplace_back(*threshold, *bonus);
  }
  schedule.validate(name);
  return schedule;
}

WeightRules load_weight_rules(const fs::path& path) {
  auto tree = read_ini(path);
  WeightRules rules;
  for (const auto& [section, keys] : tree) {
    if (section != "weights") throw Error(ErrorCode::InvalidConfig, path.string() + ": unknown section [" + section + "]");
    for (const auto& [key, node] : keys) apply_weight(rules, key, node.data());
  }
  rules.validate();
  return rules;
}

std::string describe(const PipelineConfig& cfg) {
  std::ostringstream out;
  auto line = [&](const char* name, const auto& value) { out << name << '=' << value << '\n'; };
  auto real = [&](const char* name, double v) { line(name, csv::format_double(v)); };
  line("paths.prices", cfg.paths.prices.string());
  line("paths.tweets", cfg.paths.tweets.string());
  line("paths.lexicon", cfg.paths.lexicon.string());
  line("paths.stopwords", cfg.paths.stopwords.string());
  line("paths.ad_seeds", cfg.paths.ad_seeds.string());
  line("paths.rules", cfg.paths.rules.string());
  line("indicators.sma_period", cfg.indicators.sma_period);
  line("indicators.ema_period", cfg.indicators.ema_period);
  real("indicators.ema_smoothing", cfg.indicators.ema_smoothing);
  line("indicators.rsi_period", cfg.indicators.rsi_period);
  real("indicators.price_coeff", cfg.indicators.price_coeff);
  real("indicators.scaling_coeff", cfg.indicators.scaling_coeff);
  line("sentiment.num_topics", cfg.sentiment.lda.num_topics);
  line("sentiment.iterations", cfg.sentiment.lda.iterations);
  real("sentiment.alpha", cfg.sentiment.lda.alpha);
  real("sentiment.beta", cfg.sentiment.lda.beta);
  line("sentiment.infer_sweeps", cfg.sentiment.lda.infer_sweeps);
  line("sentiment.seed", cfg.sentiment.lda.seed);
  line("sentiment.top_n", cfg.sentiment.top_n);
  line("sentiment.min_hits", cfg.sentiment.min_hits);
  line("sentiment.keep_hashtag_words", cfg.sentiment.clean.keep_hashtag_words);
  line("split.train_len", cfg.train_len);
  line("env.window", cfg.env.window);
  real("env.fee", cfg.env.fee);
  line("env.reward_mode", cfg.env.reward_mode);
  line("train.total_timesteps", cfg.train.total_timesteps);
  line("train.rollout_len", cfg.train.rollout_len);
  real("train.learning_rate", cfg.train.learning_rate);
  real("train.gamma", cfg.train.gamma);
  real("train.entropy_coeff", cfg.train.entropy_coeff);
  real("train.value_coeff", cfg.train.value_coeff);
  line("train.hidden", cfg.train.hidden);
  real("train.max_grad_norm", cfg.train.max_grad_norm);
  real("train.reward_scale", cfg.train.reward_scale);
  line("train.optimizer", cfg.train.optimizer == Optimizer::Sgd ? "sgd" : "rmsprop");
  line("train.seed", cfg.train.seed);
  line("backtest.deterministic", cfg.deterministic_backtest);
  line("backtest.seed", cfg.backtest_seed);
  line("output.dir", cfg.output_dir.string());
  return out.str();
}

}  // namespace btca

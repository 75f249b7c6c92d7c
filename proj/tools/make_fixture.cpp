// Writes the bundled synthetic dataset under data/fixture/.
//
//   make_fixture <out-dir> [--seed N]
//
// Prices follow a log-linear path through hand-picked anchor levels with AR(1)
// noise, one bar per day from 2016-01-01 to 2021-04-01 (1918 bars). Tweets are
// drawn from three topical vocabularies plus an advertisement vocabulary; the
// polarity of non-ad tweets leans with that day's return.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "btca/csv.hpp"
#include "btca/date.hpp"
#include "btca/market_data.hpp"

namespace fs = std::filesystem;
using btca::Date;

namespace {

struct Anchor {
  Date date;
  double price;
};

const std::vector<Anchor> kAnchors{
    {Date(2016, 1, 1), 430},     {Date(2016, 6, 15), 700},   {Date(2016, 12, 31), 960},
    {Date(2017, 6, 1), 2400},    {Date(2017, 12, 17), 19000}, {Date(2018, 2, 6), 7000},
    {Date(2018, 5, 1), 9200},    {Date(2018, 12, 15), 3300},  {Date(2019, 6, 26), 12000},
    {Date(2019, 12, 18), 6700},  {Date(2020, 2, 12), 10300},  {Date(2020, 3, 12), 5000},
    {Date(2020, 7, 20), 9200},   {Date(2020, 12, 31), 29000}, {Date(2021, 2, 21), 57000},
    {Date(2021, 3, 13), 61000},  {Date(2021, 4, 1), 59000},
};

double anchor_log_price(Date d) {
  for (std::size_t i = 1; i < kAnchors.size(); ++i) {
    if (d <= kAnchors[i].date) {
      const auto& a = kAnchors[i - 1];
      const auto& b = kAnchors[i];
      double t = static_cast<double>(d - a.date) / static_cast<double>(b.date - a.date);
      return std::log(a.price) * (1.0 - t) + std::log(b.price) * t;
    }
  }
  return std::log(kAnchors.back().price);
}

class Rng {
 public:
  explicit Rng(unsigned long long seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() {
    double u1 = std::max(uniform(), 1e-300), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[index(v.size())]; }

 private:
  std::mt19937_64 engine_;
};

std::vector<btca::PriceBar> make_prices(Rng& rng) {
  std::vector<btca::PriceBar> bars;
  const Date first(2016, 1, 1), last(2021, 4, 1);
  double noise = 0.0;
  double prev_close = std::exp(anchor_log_price(first));
  for (Date d = first; d <= last; d = d + 1) {
    noise = 0.92 * noise + 0.03 * rng.normal();
    double close = std::exp(anchor_log_price(d) + noise);
    double open = prev_close;
    double high = std::max(open, close) * (1.0 + 0.02 * rng.uniform());
    double low = std::min(open, close) * (1.0 - 0.02 * rng.uniform());
    double volume = 20000.0 + 80000.0 * rng.uniform() + 400000.0 * std::abs(std::log(close / open));
    auto round_to = [](double x, double q) { return std::round(x / q) / (1.0 / q); };
    close = round_to(close, 0.01);
    open = round_to(open, 0.01);
    high = std::max({round_to(high, 0.01), open, close});
    low = std::min({round_to(low, 0.01), open, close});
    bars.push_back({d, open, high, low, close, round_to(volume, 0.0001)});
    prev_close = close;
  }
  return bars;
}

const std::vector<std::vector<std::string>> kThemes{
    {"bitcoin", "price", "market", "btc", "rally", "chart", "resistance", "support", "breakout", "level",
     "climbs", "trading", "analysis", "candle", "volume", "trend"},
    {"mining", "hashrate", "miners", "blockchain", "transaction", "network", "fees", "difficulty", "block",
     "node", "halving", "lightning", "wallet", "upgrade"},
    {"regulation", "sec", "etf", "exchange", "adoption", "institutional", "news", "government", "payment",
     "bank", "custody", "approval", "fund", "policy"},
};

const std::vector<std::string> kAdWords{"free",     "claim",  "airdrop", "bonus", "giveaway", "faucet",
                                        "prize",    "signup", "referral", "reward", "coins",   "promo"};

const std::vector<std::string> kPositive{"good", "great", "bullish", "gains", "profit", "strong",
                                         "love", "amazing", "happy", "winning", "optimistic", "solid"};
const std::vector<std::string> kNegative{"crash", "dump", "bearish", "fear", "scam", "loss",
                                         "weak", "bad", "panic", "worried", "ugly", "collapse"};
const std::vector<std::string> kFiller{"the", "is", "to", "a", "of", "and", "this", "for", "on", "just", "it"};

const std::vector<std::string> kUsers{
    "chain_oracle",  "satoshi_daily", "hodl_harbor", "block_reporter", "mempool_mike", "candle_queen",
    "alt_season",    "ledger_lena",   "sats_stacker", "whale_watch",   "node_runner",  "hash_hunter",
    "crypto_casey",  "fiat_exit",     "moon_mission", "dip_buyer",     "macro_mia",    "orange_pill",
    "tape_reader",   "gas_guzzler",   "cold_storage", "pump_patrol",   "bear_trap",    "sat_surfer",
    "chart_monk",    "halving_hal",   "btc_brief",    "coin_courier",  "stack_sats",   "pleb_pete",
    "dca_dave",      "fomo_fiona",    "rekt_rick",    "bid_wall",      "ask_wall",     "spot_sam",
    "free_coins_hq", "airdrop_alert", "bonus_bot",    "faucet_feed"};
const std::vector<std::string> kProminent{"chain_oracle", "satoshi_daily", "block_reporter", "macro_mia"};

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string noise_suffix(Rng& rng) {
  std::string out;
  if (rng.uniform() < 0.3) out += " https://t.co/" + std::to_string(100000 + rng.index(900000));
  if (rng.uniform() < 0.4) out += " #" + rng.pick(std::vector<std::string>{"bitcoin", "crypto", "btc", "blockchain"});
  if (rng.uniform() < 0.15) out += " pic.twitter.com/x" + std::to_string(rng.index(100000));
  return out;
}

std::string organic_tweet(Rng& rng, double day_return) {
  const auto& theme = kThemes[rng.index(kThemes.size())];
  std::vector<std::string> words;
  if (rng.uniform() < 0.2) words.push_back("@" + rng.pick(kUsers));
  std::size_t content = 3 + rng.index(4);
  for (std::size_t i = 0; i < content; ++i) {
    if (rng.uniform() < 0.35) words.push_back(rng.pick(kFiller));
    words.push_back(rng.pick(theme));
  }
  const double p_positive = 0.5 + 0.45 * std::tanh(25.0 * day_return);
  std::size_t moods = 1 + rng.index(2);
  for (std::size_t i = 0; i < moods; ++i) {
    bool positive = rng.uniform() < p_positive;
    bool negated = rng.uniform() < 0.1;
    if (negated) {
      words.push_back("not");
      positive = !positive;
    }
    words.push_back(positive ? rng.pick(kPositive) : rng.pick(kNegative));
  }
  if (rng.uniform() < 0.25) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * day_return);
    words.push_back(buf);
  }
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += ' ';
    text += i == 0 ? capitalize(words[i]) : words[i];
  }
  if (rng.uniform() < 0.3) text += "!";
  return text + noise_suffix(rng);
}

std::string ad_tweet(Rng& rng) {
  std::vector<std::string> words;
  std::size_t count = 3 + rng.index(4);
  for (std::size_t i = 0; i < count; ++i) {
    if (rng.uniform() < 0.25) words.push_back(rng.pick(kFiller));
    words.push_back(rng.pick(kAdWords));
  }
  if (rng.uniform() < 0.5) words.push_back("bitcoin");
  if (rng.uniform() < 0.5) words.push_back(rng.pick(std::vector<std::string>{"now", "today", "here"}));
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text += ' ';
    text += i == 0 ? capitalize(words[i]) : words[i];
  }
  return text + " https://bit.ly/" + std::to_string(rng.index(1000000));
}

void write_tweets(const fs::path& path, const std::vector<btca::PriceBar>& bars, Rng& rng) {
  std::ofstream out(path, std::ios::binary);
  out << "timestamp,username,replies,retweets,favorites,text\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double ret = i == 0 ? 0.0 : std::log(bars[i].close / bars[i - 1].close);
    // Quiet days with no tweets exercise the zero fill downstream.
    std::size_t count = rng.uniform() < 0.03 ? 0 : 1 + rng.index(5);
    std::vector<std::pair<int, std::string>> day;
    for (std::size_t k = 0; k < count; ++k) {
      int seconds = static_cast<int>(rng.index(86400));
      bool is_ad = rng.uniform() < 0.2;
      std::string user = is_ad ? kUsers[kUsers.size() - 4 + rng.index(4)] : kUsers[rng.index(kUsers.size() - 4)];
      bool prominent = std::find(kProminent.begin(), kProminent.end(), user) != kProminent.end();
      double scale = prominent ? 400.0 : 25.0;
      auto count_of = [&](double mean) { return static_cast<long>(-mean * std::log(std::max(rng.uniform(), 1e-12))); };
      long retweets = count_of(scale);
      long replies = count_of(scale / 4.0);
      long favorites = count_of(scale * 2.0);
      std::string text = is_ad ? ad_tweet(rng) : organic_tweet(rng, ret);
      char stamp[32];
      std::snprintf(stamp, sizeof stamp, "%s %02d:%02d:%02d", bars[i].date.iso().c_str(), seconds / 3600,
                    (seconds / 60) % 60, seconds % 60);
      std::string row = std::string(stamp) + "," + user + "," + std::to_string(replies) + "," +
                        std::to_string(retweets) + "," + std::to_string(favorites) + "," + btca::csv::quote(text);
      day.emplace_back(seconds, row);
    }
    std::sort(day.begin(), day.end());
    for (const auto& [s, row] : day) out << row << '\n';
  }
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

const char* kLexicon =
    "good\t1.9\ngreat\t3.1\nbullish\t2.4\ngains\t2.0\nprofit\t1.8\nstrong\t2.3\nlove\t3.2\namazing\t2.8\n"
    "happy\t2.7\nwinning\t2.4\noptimistic\t2.1\nsolid\t1.6\nrally\t1.3\nmoon\t1.5\nclimbs\t0.8\nbreakout\t1.1\n"
    "adoption\t1.0\napproval\t1.4\nsupport\t1.7\nupgrade\t1.2\nfree\t2.3\nbonus\t2.4\nwin\t2.8\nprize\t2.2\n"
    "reward\t2.1\ngiveaway\t1.6\nextra\t0.5\nlucky\t2.0\nsafe\t1.9\nhope\t1.9\nbest\t3.2\nnice\t1.8\n"
    "crash\t-2.4\ndump\t-1.6\nbearish\t-2.1\nfear\t-2.2\nscam\t-3.0\nloss\t-1.9\nweak\t-1.9\nbad\t-2.5\n"
    "panic\t-2.6\nworried\t-1.9\nugly\t-2.3\ncollapse\t-2.7\nban\t-2.0\nhack\t-2.3\nfraud\t-3.1\n"
    "drops\t-1.1\nfalls\t-1.2\nrisk\t-1.1\nterrible\t-3.1\nworst\t-3.1\nsad\t-2.1\nangry\t-2.3\n"
    "resistance\t-0.4\nlosses\t-2.0\nfud\t-1.5\nrekt\t-2.2\n";

const char* kStopwords =
    "i\nme\nmy\nmyself\nwe\nour\nours\nourselves\nyou\nyour\nyours\nyourself\nyourselves\nhe\nhim\nhis\n"
    "himself\nshe\nher\nhers\nherself\nit\nits\nitself\nthey\nthem\ntheir\ntheirs\nthemselves\nwhat\nwhich\n"
    "who\nwhom\nthis\nthat\nthese\nthose\nam\nis\nare\nwas\nwere\nbe\nbeen\nbeing\nhave\nhas\nhad\nhaving\n"
    "do\ndoes\ndid\ndoing\na\nan\nthe\nand\nbut\nif\nor\nbecause\nas\nuntil\nwhile\nof\nat\nby\nfor\nwith\n"
    "about\nagainst\nbetween\ninto\nthrough\nduring\nbefore\nafter\nabove\nbelow\nto\nfrom\nup\ndown\nin\n"
    "out\non\noff\nover\nunder\nagain\nfurther\nthen\nonce\nhere\nthere\nwhen\nwhere\nwhy\nhow\nall\nany\n"
    "both\neach\nfew\nmore\nmost\nother\nsome\nsuch\nonly\nown\nsame\nso\nthan\ntoo\nvery\ns\nt\ncan\nwill\n"
    "just\nshould\nnow\nd\nll\nm\no\nre\nve\ny\n";

const char* kAdSeeds =
    "Claim your free bitcoin bonus now https://bit.ly/abc\n"
    "Free airdrop giveaway, signup with referral code!\n"
    "Claim free coins from our faucet today\n"
    "Get a free bitcoin prize, claim the reward here\n"
    "Daily faucet bonus: claim free coins and promo rewards\n";

const char* kRules =
    "# Tweet weighting rules. Schedules are threshold:bonus pairs; the largest\n"
    "# threshold not above the count applies.\n"
    "[weights]\n"
    "base = 1.0\n"
    "prominent_user = 0.5\n"
    "prominent_users = chain_oracle, satoshi_daily, block_reporter, macro_mia\n"
    "keyword = 0.2\n"
    "keywords = halving, etf, adoption, institutional\n"
    "retweets = 100:0.3\n"
    "replies = 50:0.2\n"
    "favorites = 200:0.2\n"
    "time =\n";

const char* kPipeline =
    "# Pipeline configuration for the bundled fixture. Paths are relative to this file.\n"
    "[paths]\n"
    "prices = prices.csv\n"
    "tweets = tweets.csv\n"
    "lexicon = lexicon.tsv\n"
    "stopwords = stopwords.txt\n"
    "ad_seeds = ad_seeds.txt\n"
    "rules = rules.ini\n"
    "\n"
    "[indicators]\n"
    "sma_period = 140\n"
    "ema_period = 147\n"
    "ema_smoothing = 2\n"
    "rsi_period = 14\n"
    "price_coeff = 0.15\n"
    "scaling_coeff = 0.7\n"
    "\n"
    "[sentiment]\n"
    "num_topics = 8\n"
    "iterations = 300\n"
    "top_n = 10\n"
    "min_hits = 2\n"
    "seed = 13\n"
    "\n"
    "[split]\n"
    "train_len = 1233\n"
    "\n"
    "[env]\n"
    "window = 30\n"
    "fee = 0\n"
    "reward_mode = price_diff_long\n"
    "\n"
    "[train]\n"
    "total_timesteps = 50000\n"
    "rollout_len = 5\n"
    "learning_rate = 0.007\n"
    "gamma = 0.99\n"
    "entropy_coeff = 0.01\n"
    "value_coeff = 0.5\n"
    "hidden = 64\n"
    "max_grad_norm = 0.5\n"
    "seed = 7\n";

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: make_fixture <out-dir> [--seed N]\n";
    return 1;
  }
  unsigned long long seed = 20210401;
  for (int i = 2; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--seed") seed = std::stoull(argv[i + 1]);
  }
  fs::path dir = argv[1];
  fs::create_directories(dir);
  Rng rng(seed);

  auto bars = make_prices(rng);
  btca::PriceSeries series(bars);
  btca::write_price_csv(series, dir / "prices.csv");
  write_tweets(dir / "tweets.csv", bars, rng);
  write_text(dir / "lexicon.tsv", kLexicon);
  write_text(dir / "stopwords.txt", kStopwords);
  write_text(dir / "ad_seeds.txt", kAdSeeds);
  write_text(dir / "rules.ini", kRules);
  write_text(dir / "pipeline.ini", kPipeline);
  std::cout << "wrote " << series.size() << " bars to " << dir << "\n";
  return 0;
}

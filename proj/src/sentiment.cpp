#include "btca/sentiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "btca/csv.hpp"
#include "btca/error.hpp"

namespace btca {

namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

bool is_link(std::string_view chunk) {
  const std::string low = to_lower(chunk);
  return low.find("http://") != std::string::npos || low.find("https://") != std::string::npos ||
         low.find("www.") != std::string::npos || low.find("pic.twitter.com") != std::string::npos;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

constexpr std::array<std::string_view, 26> kNegations{
    "not",   "no",     "never",   "nor",    "none",  "nobody",   "nothing",  "neither", "without",
    "cannot", "cant",  "dont",    "doesnt", "didnt", "isnt",     "arent",    "wasnt",   "werent",
    "wont",  "wouldnt", "shouldnt", "couldnt", "aint", "havent", "hasnt", "hadnt"};

// `YYYY-MM-DD`, optionally followed by ` HH:MM[:SS]` or `THH:MM[:SS]` and a zone suffix.
bool parse_timestamp(std::string_view text, Date& date, int& hour) {
  text = trim(text);
  if (text.size() < 10) return false;
  auto d = Date::parse(text.substr(0, 10));
  if (!d) return false;
  date = *d;
  hour = 0;
  if (text.size() == 10) return true;
  if (text[10] != ' ' && text[10] != 'T') return false;
  if (text.size() < 16 || text[13] != ':') return false;
  auto h = csv::parse_int(text.substr(11, 2));
  if (!h || *h < 0 || *h > 23 || !std::isdigit(static_cast<unsigned char>(text[11]))) return false;
  hour = static_cast<int>(*h);
  return true;
}

}  // namespace

bool is_negation(std::string_view token) {
  return std::find(kNegations.begin(), kNegations.end(), token) != kNegations.end();
}

std::vector<std::string> tokenize(std::string_view text, const WordSet& stopwords, CleanOptions options) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view chunk = text.substr(i, j - i);
    i = j;
    if (chunk.empty() || is_link(chunk) || chunk.front() == '@') continue;
    if (chunk.front() == '#') {
      if (!options.keep_hashtag_words) continue;
      chunk.remove_prefix(1);
    }
    if (std::none_of(chunk.begin(), chunk.end(), is_alpha)) continue;

    std::size_t k = 0;
    while (k < chunk.size()) {
      while (k < chunk.size() && !is_alnum(chunk[k])) ++k;
      std::size_t e = k;
      while (e < chunk.size() && is_alnum(chunk[e])) ++e;
      if (e > k) {
        std::string word = to_lower(chunk.substr(k, e - k));
        bool digits = std::none_of(word.begin(), word.end(), is_alpha);
        if (!digits && !stopwords.contains(word)) tokens.push_back(std::move(word));
      }
      k = e;
    }
  }
  return tokens;
}

CleanTweet clean_tweet(const TweetRecord& raw, const WordSet& stopwords, CleanOptions options) {
  CleanTweet out{raw, tokenize(raw.text, stopwords, options), 1};
  if (out.tokens.empty()) throw Error(ErrorCode::EmptyAfterCleaning, "no tokens left in \"" + raw.text + "\"");
  return out;
}

Lexicon::Lexicon(std::map<std::string, double, std::less<>> valences) : valences_(std::move(valences)) {
  for (const auto& [word, v] : valences_) {
    if (!(v >= -4.0 && v <= 4.0)) throw Error(ErrorCode::InvalidLexicon, "valence of '" + word + "' outside [-4, 4]");
  }
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open lexicon " + path.string());
  std::map<std::string, double, std::less<>> valences;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::InvalidLexicon, path.string() + " line " + std::to_string(n) + ": expected token<TAB>valence");
    auto value = csv::parse_double(view.substr(tab + 1));
    std::string word = to_lower(trim(view.substr(0, tab)));
    if (!value || word.empty())
      throw Error(ErrorCode::InvalidLexicon, path.string() + " line " + std::to_string(n) + ": bad entry");
    valences[word] = *value;
  }
  Lexicon lex(std::move(valences));
  if (lex.empty()) throw Error(ErrorCode::InvalidLexicon, path.string() + " has no entries");
  return lex;
}

std::optional<double> Lexicon::valence(std::string_view word) const {
  auto it = valences_.find(word);
  if (it == valences_.end()) return std::nullopt;
  return it->second;
}

double score_valence(std::span<const std::string> tokens, const Lexicon& lexicon) {
  if (lexicon.empty()) throw Error(ErrorCode::InvalidLexicon, "empty lexicon");
  double sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto v = lexicon.valence(tokens[i]);
    if (!v) continue;
    bool negated = false;
    for (std::size_t back = 1; back <= 3 && back <= i; ++back) negated = negated || is_negation(tokens[i - back]);
    sum += negated ? -*v : *v;
  }
  return sum / std::sqrt(sum * sum + kValenceNormalization);
}

double score_valence(const CleanTweet& tweet, const Lexicon& lexicon) { return score_valence(tweet.tokens, lexicon); }

std::vector<CleanTweet> tag_ads(std::vector<CleanTweet> tweets, const WordSet& ad_words, std::size_t min_hits) {
  for (auto& t : tweets) {
    std::size_t hits = 0;
    if (!ad_words.empty()) {
      WordSet seen;
      for (const auto& tok : t.tokens) {
        if (ad_words.contains(tok)) seen.insert(tok);
      }
      hits = seen.size();
    }
    t.ad_score = (!ad_words.empty() && hits >= min_hits) ? 0 : 1;
  }
  return tweets;
}

double StepSchedule::bonus(double value) const {
  double b = 0.0;
  for (const auto& [threshold, bonus] : steps) {
    if (threshold > value) break;
    b = bonus;
  }
  return b;
}

void StepSchedule::validate(std::string_view name) const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& [t, b] = steps[i];
    if (!std::isfinite(t) || !(b >= 0.0) || !std::isfinite(b))
      throw Error(ErrorCode::InvalidConfig, std::string(name) + ": thresholds must be finite and bonuses >= 0");
    if (i > 0 && (t <= steps[i - 1].first || b < steps[i - 1].second))
      throw Error(ErrorCode::InvalidConfig, std::string(name) + ": schedule must be ascending in threshold and bonus");
  }
}

void WeightRules::validate() const {
  if (!(base_weight >= 0.0) || !(prominent_user_bonus >= 0.0) || !(keyword_bonus >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "weights must be >= 0");
  retweets.validate("retweets");
  replies.validate("replies");
  favorites.validate("favorites");
  time.validate("time");
}

double tweet_weight(const CleanTweet& tweet, const WeightRules& rules) {
  if (tweet.ad_score == 0) return 0.0;
  const auto& raw = tweet.original;
  double w = rules.base_weight;
  if (rules.prominent_users.contains(to_lower(raw.username))) w += rules.prominent_user_bonus;
  if (std::any_of(tweet.tokens.begin(), tweet.tokens.end(),
                  [&](const std::string& t) { return rules.keywords.contains(t); }))
    w += rules.keyword_bonus;
  w += rules.retweets.bonus(static_cast<double>(raw.retweets));
  w += rules.replies.bonus(static_cast<double>(raw.replies));
  w += rules.favorites.bonus(static_cast<double>(raw.favorites));
  w += rules.time.bonus(static_cast<double>(raw.hour));
  return w * tweet.ad_score;
}

std::vector<DailySentiment> daily_weighted_sentiment(std::span<const ScoredTweet> tweets,
                                                     std::optional<std::pair<Date, Date>> range) {
  struct Acc {
    double weighted = 0.0;
    double raw = 0.0;
    std::size_t count = 0;
  };
  std::map<Date, Acc> days;
  for (const auto& t : tweets) {
    if (range && (t.date < range->first || t.date > range->second)) continue;
    auto& a = days[t.date];
    a.weighted += t.valence * t.weight;
    a.raw += t.valence;
    ++a.count;
  }
  if (range) {
    for (Date d = range->first; d <= range->second; d = d + 1) days.try_emplace(d);
  }
  std::vector<DailySentiment> out;
  out.reserve(days.size());
  for (const auto& [date, a] : days) {
    DailySentiment s{date, 0.0, a.count, 0.0};
    if (a.count > 0) {
      s.weighted_score = a.weighted / static_cast<double>(a.count);
      s.raw_mean = a.raw / static_cast<double>(a.count);
    }
    out.push_back(s);
  }
  return out;
}

std::vector<TweetRecord> read_tweets_csv(std::istream& in) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MissingColumn, "tweet file has no header");
  const auto& header = records.front().fields;
  auto col = [&](std::string_view name) {
    auto idx = csv::column_index(header, name);
    if (!idx) throw Error(ErrorCode::MissingColumn, "tweet file lacks column '" + std::string(name) + "'");
    return *idx;
  };
  const std::size_t ts = col("timestamp"), user = col("username"), rep = col("replies"), rt = col("retweets"),
                    fav = col("favorites"), text = col("text");
  const std::size_t width = std::max({ts, user, rep, rt, fav, text}) + 1;

  std::vector<TweetRecord> out;
  out.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::UnparsableRow, "tweets line " + std::to_string(records[r].line) + ": " + why);
    };
    if (f.size() < width) throw bad("too few fields");
    TweetRecord t;
    if (!parse_timestamp(f[ts], t.date, t.hour)) throw bad("bad timestamp '" + f[ts] + "'");
    t.username = std::string(trim(f[user]));
    auto count = [&](std::size_t i, const char* what) {
      auto v = csv::parse_int(f[i]);
      if (!v || *v < 0) throw bad(std::string("bad ") + what + " count");
      return *v;
    };
    t.replies = count(rep, "replies");
    t.retweets = count(rt, "retweets");
    t.favorites = count(fav, "favorites");
    t.text = f[text];
    if (trim(t.text).empty()) continue;  // media-only posts carry no text to score
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TweetRecord> load_tweets_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_tweets_csv(in);
}

std::vector<std::string> load_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto view = trim(line);
    if (!view.empty()) lines.emplace_back(view);
  }
  return lines;
}

WordSet load_word_list(const std::filesystem::path& path) {
  WordSet words;
  for (const auto& line : load_lines(path)) {
    if (line.front() != '#') words.insert(to_lower(line));
  }
  return words;
}

void write_sentiment_csv(std::span<const DailySentiment> days, std::ostream& out) {
  out << "date,weighted_score,tweet_count,raw_mean\n";
  for (const auto& d : days) {
    out << d.date.iso() << ',' << csv::format_double(d.weighted_score) << ',' << d.tweet_count << ','
        << csv::format_double(d.raw_mean) << '\n';
  }
}

std::vector<DailySentiment> read_sentiment_csv(const std::filesystem::path& path) {
  auto records = csv::read_file(path);
  if (records.empty()) throw Error(ErrorCode::MissingColumn, path.string() + " is empty");
  const auto& header = records.front().fields;
  auto col = [&](std::string_view name) {
    auto idx = csv::column_index(header, name);
    if (!idx) throw Error(ErrorCode::MissingColumn, path.string() + " lacks column '" + std::string(name) + "'");
    return *idx;
  };
  const std::size_t c_date = col("date"), c_score = col("weighted_score"), c_count = col("tweet_count"),
                    c_raw = col("raw_mean");
  std::vector<DailySentiment> out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    auto bad = [&] { return Error(ErrorCode::UnparsableRow, path.string() + " line " + std::to_string(records[r].line)); };
    if (f.size() < std::max({c_date, c_score, c_count, c_raw}) + 1) throw bad();
    auto date = Date::parse(trim(f[c_date]));
    auto score = csv::parse_double(f[c_score]);
    auto count = csv::parse_int(f[c_count]);
    auto raw = csv::parse_double(f[c_raw]);
    if (!date || !score || !count || *count < 0 || !raw) throw bad();
    if (!out.empty() && *date <= out.back().date)
      throw Error(ErrorCode::NonMonotonicDates, path.string() + " line " + std::to_string(records[r].line));
    out.push_back({*date, *score, static_cast<std::size_t>(*count), *raw});
  }
  return out;
}

}  // namespace btca

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btca/date.hpp"

namespace btca {

using WordSet = std::set<std::string, std::less<>>;

struct TweetRecord {
  Date date;
  int hour = 0;  // UTC hour of day, 0-23
  std::string username;
  std::string text;
  long long replies = 0;
  long long retweets = 0;
  long long favorites = 0;
};

struct CleanTweet {
  TweetRecord original;
  std::vector<std::string> tokens;
  int ad_score = 1;  // 0 marks an advertisement
};

struct CleanOptions {
  /// Keep the word of a #hashtag instead of dropping the whole tag.
  bool keep_hashtag_words = false;
};

/// Drops URLs, pic links, @mentions, #hashtags and chunks without letters;
/// strips remaining non-alphanumerics, lowercases, removes stopwords and
/// pure-digit tokens.
std::vector<std::string> tokenize(std::string_view text, const WordSet& stopwords, CleanOptions options = {});

/// Throws EmptyAfterCleaning when nothing survives; callers drop such tweets.
CleanTweet clean_tweet(const TweetRecord& raw, const WordSet& stopwords, CleanOptions options = {});

/// Word valences on the [-4, 4] scale.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<std::string, double, std::less<>> valences);

  /// UTF-8 lines `token<TAB>valence`; blank lines and `#` comments skipped.
  static Lexicon load(const std::filesystem::path& path);

  std::optional<double> valence(std::string_view word) const;
  std::size_t size() const { return valences_.size(); }
  bool empty() const { return valences_.empty(); }

 private:
  std::map<std::string, double, std::less<>> valences_;
};

inline constexpr double kValenceNormalization = 15.0;

/// Sum of token valences, each flipped when a negation word appears among the
/// three preceding tokens, squashed to (-1, 1) by s / sqrt(s^2 + 15).
double score_valence(std::span<const std::string> tokens, const Lexicon& lexicon);
double score_valence(const CleanTweet& tweet, const Lexicon& lexicon);

bool is_negation(std::string_view token);

/// `ad_score = 0` iff the tweet contains at least `min_hits` distinct ad words.
std::vector<CleanTweet> tag_ads(std::vector<CleanTweet> tweets, const WordSet& ad_words, std::size_t min_hits);

/// Piecewise-constant bonus: the bonus of the largest threshold not above the
/// value, or 0 below every threshold.
struct StepSchedule {
  std::vector<std::pair<double, double>> steps;  // (threshold, bonus), ascending thresholds

  double bonus(double value) const;
  /// Thresholds strictly ascending, bonuses non-negative and non-decreasing.
  void validate(std::string_view name) const;
};

struct WeightRules {
  double base_weight = 1.0;
  double prominent_user_bonus = 0.5;
  double keyword_bonus = 0.2;
  StepSchedule retweets{{{100.0, 0.3}}};
  StepSchedule replies{{{50.0, 0.2}}};
  StepSchedule favorites{{{200.0, 0.2}}};
  StepSchedule time;  // keyed on the UTC hour of the tweet
  WordSet prominent_users;
  WordSet keywords;

  void validate() const;
};

/// [base + user + keyword + retweet + reply + favorite + time bonuses] * ad_score.
double tweet_weight(const CleanTweet& tweet, const WeightRules& rules);

struct ScoredTweet {
  Date date;
  double valence = 0.0;
  double weight = 0.0;
};

struct DailySentiment {
  Date date;
  double weighted_score = 0.0;
  std::size_t tweet_count = 0;
  double raw_mean = 0.0;

  friend bool operator==(const DailySentiment&, const DailySentiment&) = default;
};

/// Per day: sum(valence * weight) / tweets that day (ads included in the count).
/// With a range, every day in [first, last] is emitted and empty days are zero.
std::vector<DailySentiment> daily_weighted_sentiment(std::span<const ScoredTweet> tweets,
                                                     std::optional<std::pair<Date, Date>> range = std::nullopt);

// File formats.
std::vector<TweetRecord> load_tweets_csv(const std::filesystem::path& path);
std::vector<TweetRecord> read_tweets_csv(std::istream& in);
WordSet load_word_list(const std::filesystem::path& path);
std::vector<std::string> load_lines(const std::filesystem::path& path);
void write_sentiment_csv(std::span<const DailySentiment> days, std::ostream& out);
std::vector<DailySentiment> read_sentiment_csv(const std::filesystem::path& path);

}  // namespace btca

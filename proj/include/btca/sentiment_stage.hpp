#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "btca/lda.hpp"
#include "btca/sentiment.hpp"

namespace btca {

struct SentimentStageConfig {
  CleanOptions clean;
  LdaConfig lda;
  std::size_t top_n = 10;
  std::size_t min_hits = 2;
};

struct SentimentReport {
  std::vector<DailySentiment> daily;
  std::size_t ad_topic = 0;
  WordSet ad_words;
  std::vector<std::vector<std::string>> topic_words;  // top_n words per topic
  std::size_t tweets_read = 0;
  std::size_t tweets_dropped = 0;  // empty after cleaning
  std::size_t ads_tagged = 0;
};

/// Clean, fit LDA, find the ad cluster from the seed texts, tag ads, score,
/// weight and aggregate per day. With a range every day in it is emitted.
SentimentReport run_sentiment_stage(const std::vector<TweetRecord>& tweets, const Lexicon& lexicon,
                                    const WordSet& stopwords, const std::vector<std::string>& ad_seed_texts,
                                    const WeightRules& rules, const SentimentStageConfig& config,
                                    std::optional<std::pair<Date, Date>> range = std::nullopt);

}  // namespace btca

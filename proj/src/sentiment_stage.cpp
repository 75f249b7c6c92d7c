#include "btca/sentiment_stage.hpp"

#include "btca/error.hpp"

namespace btca {

SentimentReport run_sentiment_stage(const std::vector<TweetRecord>& tweets, const Lexicon& lexicon,
                                    const WordSet& stopwords, const std::vector<std::string>& ad_seed_texts,
                                    const WeightRules& rules, const SentimentStageConfig& config,
                                    std::optional<std::pair<Date, Date>> range) {
  rules.validate();
  SentimentReport report;
  report.tweets_read = tweets.size();

  std::vector<CleanTweet> clean;
  clean.reserve(tweets.size());
  for (const auto& t : tweets) {
    auto tokens = tokenize(t.text, stopwords, config.clean);
    if (tokens.empty()) {
      ++report.tweets_dropped;
      continue;
    }
    clean.push_back(CleanTweet{t, std::move(tokens), 1});
  }
  if (clean.empty()) throw Error(ErrorCode::EmptyCorpus, "no tweet survived cleaning");

  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(clean.size());
  for (const auto& c : clean) corpus.push_back(c.tokens);
  LdaModel model = fit_lda(corpus, config.lda);

  std::vector<std::vector<std::string>> seeds;
  for (const auto& text : ad_seed_texts) {
    auto tokens = tokenize(text, stopwords, config.clean);
    if (!tokens.empty()) seeds.push_back(std::move(tokens));
  }
  report.ad_topic = identify_ad_topic(model, seeds);
  model.set_ad_topic(report.ad_topic);
  report.ad_words = extract_ad_word_list(model, report.ad_topic, config.top_n);
  for (std::size_t k = 0; k < model.num_topics(); ++k) report.topic_words.push_back(model.top_words(k, config.top_n));

  clean = tag_ads(std::move(clean), report.ad_words, config.min_hits);
  std::vector<ScoredTweet> scored;
  scored.reserve(clean.size());
  for (const auto& c : clean) {
    if (c.ad_score == 0) ++report.ads_tagged;
    scored.push_back({c.original.date, score_valence(c, lexicon), tweet_weight(c, rules)});
  }
  report.daily = daily_weighted_sentiment(scored, range);
  return report;
}

}  // namespace btca

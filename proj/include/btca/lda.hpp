#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "btca/sentiment.hpp"

namespace btca {

struct LdaConfig {
  std::size_t num_topics = 20;
  double alpha = 0.0;  // <= 0 means 50 / K
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;
  std::size_t infer_sweeps = 60;  // the first half is burn-in

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / static_cast<double>(num_topics); }
  void validate() const;
};

class Vocabulary {
 public:
  std::size_t add(std::string_view word);
  std::optional<std::size_t> id(std::string_view word) const;
  const std::string& word(std::size_t id) const { return words_.at(id); }
  std::size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> ids_;
};

struct TopicInference {
  std::size_t topic = 0;
  std::vector<double> probabilities;
};

class LdaModel {
 public:
  LdaModel() = default;

  bool fitted() const { return fitted_; }
  const LdaConfig& config() const { return config_; }
  std::size_t num_topics() const { return config_.num_topics; }
  const Vocabulary& vocabulary() const { return vocab_; }

  /// K x V, row-major.
  std::span<const std::int64_t> topic_word_counts() const { return topic_word_; }
  std::span<const std::int64_t> topic_totals() const { return topic_totals_; }
  /// Final topic of every token, per document.
  const std::vector<std::vector<std::uint32_t>>& assignments() const { return assignments_; }

  /// (n_kw + beta) / (n_k + V beta); sums to 1.
  std::vector<double> topic_word_distribution(std::size_t topic) const;
  /// Highest-probability words first; equal counts go to the lower word id.
  std::vector<std::string> top_words(std::size_t topic, std::size_t n) const;

  /// Gibbs sweeps with topic-word counts frozen, averaging theta over the
  /// post burn-in sweeps. Documents with no known word get the prior.
  TopicInference infer(std::span<const std::string> tokens) const;

  std::optional<std::size_t> ad_topic() const { return ad_topic_; }
  void set_ad_topic(std::size_t topic);

 private:
  friend LdaModel fit_lda(const std::vector<std::vector<std::string>>&, const LdaConfig&,
                          const std::function<void(std::size_t, const LdaModel&)>&);

  void require_fitted() const;
  void require_topic(std::size_t topic) const;

  LdaConfig config_;
  Vocabulary vocab_;
  std::vector<std::int64_t> topic_word_;
  std::vector<std::int64_t> topic_totals_;
  std::vector<std::vector<std::uint32_t>> assignments_;
  std::optional<std::size_t> ad_topic_;
  bool fitted_ = false;
};

/// Collapsed Gibbs sampling. `after_sweep` sees the model state after every sweep.
LdaModel fit_lda(const std::vector<std::vector<std::string>>& corpus, const LdaConfig& config,
                 const std::function<void(std::size_t sweep, const LdaModel&)>& after_sweep = {});

TopicInference infer_topic(const LdaModel& model, const CleanTweet& tweet);

WordSet extract_ad_word_list(const LdaModel& model, std::size_t ad_topic, std::size_t top_n);

/// Runs every seed document through the model; they must all land on one topic.
std::size_t identify_ad_topic(const LdaModel& model, const std::vector<std::vector<std::string>>& seed_docs);

}  // namespace btca

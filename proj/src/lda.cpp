#include "btca/lda.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "btca/error.hpp"

namespace btca {

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t sample(std::span<const double> cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  auto k = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(k, cumulative.size() - 1);
}

std::uint64_t fnv1a(std::span<const std::string> tokens) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& t : tokens) {
    for (unsigned char c : t) h = (h ^ c) * 1099511628211ull;
    h = (h ^ 0xffu) * 1099511628211ull;
  }
  return h;
}

}  // namespace

void LdaConfig::validate() const {
  if (num_topics < 2) throw Error(ErrorCode::InvalidConfig, "LDA needs at least 2 topics");
  if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "LDA needs at least 1 iteration");
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidConfig, "LDA beta must be positive");
  if (!(effective_alpha() > 0.0)) throw Error(ErrorCode::InvalidConfig, "LDA alpha must be positive");
  if (infer_sweeps < 2) throw Error(ErrorCode::InvalidConfig, "LDA inference needs at least 2 sweeps");
}

std::size_t Vocabulary::add(std::string_view word) {
  auto [it, inserted] = ids_.try_emplace(std::string(word), words_.size());
  if (inserted) words_.emplace_back(word);
  return it->second;
}

std::optional<std::size_t> Vocabulary::id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void LdaModel::require_fitted() const {
  if (!fitted_) throw Error(ErrorCode::UnfittedModel, "LDA model has not been fitted");
}

void LdaModel::require_topic(std::size_t topic) const {
  if (topic >= config_.num_topics)
    throw Error(ErrorCode::TopicOutOfRange,
                "topic " + std::to_string(topic) + " not in [0, " + std::to_string(config_.num_topics) + ")");
}

void LdaModel::set_ad_topic(std::size_t topic) {
  require_fitted();
  require_topic(topic);
  ad_topic_ = topic;
}

std::vector<double> LdaModel::topic_word_distribution(std::size_t topic) const {
  require_fitted();
  require_topic(topic);
  const std::size_t V = vocab_.size();
  const double beta = config_.beta;
  const double denom = static_cast<double>(topic_totals_[topic]) + static_cast<double>(V) * beta;
  std::vector<double> phi(V);
  for (std::size_t w = 0; w < V; ++w) phi[w] = (static_cast<double>(topic_word_[topic * V + w]) + beta) / denom;
  return phi;
}

std::vector<std::string> LdaModel::top_words(std::size_t topic, std::size_t n) const {
  require_fitted();
  require_topic(topic);
  const std::size_t V = vocab_.size();
  std::vector<std::size_t> ids(V);
  std::iota(ids.begin(), ids.end(), 0);
  const auto* row = topic_word_.data() + topic * V;
  n = std::min(n, V);
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(),
                    [&](std::size_t a, std::size_t b) { return row[a] != row[b] ? row[a] > row[b] : a < b; });
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(vocab_.word(ids[i]));
  return out;
}

TopicInference LdaModel::infer(std::span<const std::string> tokens) const {
  require_fitted();
  const std::size_t K = config_.num_topics;
  const std::size_t V = vocab_.size();
  const double alpha = config_.effective_alpha();
  const double beta = config_.beta;

  std::vector<std::size_t> words;
  for (const auto& t : tokens) {
    if (auto id = vocab_.id(t)) words.push_back(*id);
  }
  TopicInference result;
  result.probabilities.assign(K, 1.0 / static_cast<double>(K));
  if (words.empty()) return result;

  std::mt19937_64 rng(config_.seed ^ fnv1a(tokens));
  std::vector<std::size_t> z(words.size());
  std::vector<double> doc(K, 0.0), cumulative(K), theta(K, 0.0);
  for (auto& k : z) {
    k = static_cast<std::size_t>(uniform(rng) * static_cast<double>(K));
    if (k >= K) k = K - 1;
    doc[k] += 1.0;
  }
  const double vbeta = static_cast<double>(V) * beta;
  const std::size_t burn_in = config_.infer_sweeps / 2;
  for (std::size_t sweep = 0; sweep < config_.infer_sweeps; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      doc[z[i]] -= 1.0;
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double phi = (static_cast<double>(topic_word_[k * V + words[i]]) + beta) /
                           (static_cast<double>(topic_totals_[k]) + vbeta);
        acc += (doc[k] + alpha) * phi;
        cumulative[k] = acc;
      }
      z[i] = sample(cumulative, uniform(rng));
      doc[z[i]] += 1.0;
    }
    if (sweep >= burn_in) {
      for (std::size_t k = 0; k < K; ++k) theta[k] += doc[k] + alpha;
    }
  }
  const double total = std::accumulate(theta.begin(), theta.end(), 0.0);
  for (std::size_t k = 0; k < K; ++k) result.probabilities[k] = theta[k] / total;
  result.topic = static_cast<std::size_t>(
      std::max_element(result.probabilities.begin(), result.probabilities.end()) - result.probabilities.begin());
  return result;
}

LdaModel fit_lda(const std::vector<std::vector<std::string>>& corpus, const LdaConfig& config,
                 const std::function<void(std::size_t, const LdaModel&)>& after_sweep) {
  config.validate();
  LdaModel model;
  model.config_ = config;

  std::vector<std::vector<std::size_t>> docs;
  docs.reserve(corpus.size());
  std::size_t tokens = 0;
  for (const auto& doc : corpus) {
    std::vector<std::size_t> ids;
    ids.reserve(doc.size());
    for (const auto& w : doc) ids.push_back(model.vocab_.add(w));
    tokens += ids.size();
    docs.push_back(std::move(ids));
  }
  if (tokens == 0) throw Error(ErrorCode::EmptyCorpus, "LDA corpus has no tokens");
  const std::size_t K = config.num_topics;
  const std::size_t V = model.vocab_.size();
  if (V < K)
    throw Error(ErrorCode::DegenerateVocabulary,
                "vocabulary of " + std::to_string(V) + " words is smaller than " + std::to_string(K) + " topics");

  const double alpha = config.effective_alpha();
  const double beta = config.beta;
  const double vbeta = static_cast<double>(V) * beta;
  auto& nkw = model.topic_word_;
  auto& nk = model.topic_totals_;
  auto& z = model.assignments_;
  nkw.assign(K * V, 0);
  nk.assign(K, 0);
  z.resize(docs.size());
  std::vector<std::vector<std::int64_t>> ndk(docs.size(), std::vector<std::int64_t>(K, 0));

  std::mt19937_64 rng(config.seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      auto k = static_cast<std::size_t>(uniform(rng) * static_cast<double>(K));
      if (k >= K) k = K - 1;
      z[d][i] = static_cast<std::uint32_t>(k);
      ++ndk[d][k];
      ++nkw[k * V + docs[d][i]];
      ++nk[k];
    }
  }
  model.fitted_ = true;

  std::vector<double> cumulative(K);
  for (std::size_t sweep = 0; sweep < config.iterations; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      auto& nd = ndk[d];
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const std::size_t w = docs[d][i];
        std::size_t k = z[d][i];
        --nd[k];
        --nkw[k * V + w];
        --nk[k];
        double acc = 0.0;
        for (std::size_t t = 0; t < K; ++t) {
          acc += (static_cast<double>(nd[t]) + alpha) * (static_cast<double>(nkw[t * V + w]) + beta) /
                 (static_cast<double>(nk[t]) + vbeta);
          cumulative[t] = acc;
        }
        k = sample(cumulative, uniform(rng));
        z[d][i] = static_cast<std::uint32_t>(k);
        ++nd[k];
        ++nkw[k * V + w];
        ++nk[k];
      }
    }
    if (after_sweep) after_sweep(sweep, model);
  }
  return model;
}

TopicInference infer_topic(const LdaModel& model, const CleanTweet& tweet) { return model.infer(tweet.tokens); }

WordSet extract_ad_word_list(const LdaModel& model, std::size_t ad_topic, std::size_t top_n) {
  auto words = model.top_words(ad_topic, top_n);
  return WordSet(words.begin(), words.end());
}

std::size_t identify_ad_topic(const LdaModel& model, const std::vector<std::vector<std::string>>& seed_docs) {
  if (seed_docs.empty()) throw Error(ErrorCode::AdClusterAmbiguous, "no ad seed documents");
  std::optional<std::size_t> topic;
  for (const auto& doc : seed_docs) {
    const std::size_t k = model.infer(doc).topic;
    if (topic && *topic != k)
      throw Error(ErrorCode::AdClusterAmbiguous,
                  "ad seeds map to topics " + std::to_string(*topic) + " and " + std::to_string(k));
    topic = k;
  }
  return *topic;
}

}  // namespace btca

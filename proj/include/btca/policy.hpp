#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "btca/trading_env.hpp"

namespace btca {

struct NetworkShape {
  std::size_t input = 0;
  std::size_t hidden = 64;

  std::size_t parameter_count() const;
  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Two tanh layers shared by a 2-logit policy head (index 0 = Sell, 1 = Buy)
/// and a scalar value head, stored as one flat vector:
/// W1 [H x D], b1 [H], W2 [H x H], b2 [H], Wp [2 x H], bp [2], Wv [1 x H], bv [1].
class PolicyParams {
 public:
  struct Layer {
    const char* name;
    std::size_t rows, cols, offset;
    std::size_t size() const { return rows * cols; }
  };

  PolicyParams() = default;
  explicit PolicyParams(NetworkShape shape);
  PolicyParams(NetworkShape shape, std::vector<double> values);

  /// Glorot-uniform trunk and value head, policy head scaled by 0.01, zero biases.
  static PolicyParams initialize(NetworkShape shape, std::uint64_t seed);

  const NetworkShape& shape() const { return shape_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::array<Layer, 8> layers() const;

  const double* w1() const { return values_.data() + layers()[0].offset; }
  const double* b1() const { return values_.data() + layers()[1].offset; }
  const double* w2() const { return values_.data() + layers()[2].offset; }
  const double* b2() const { return values_.data() + layers()[3].offset; }
  const double* wp() const { return values_.data() + layers()[4].offset; }
  const double* bp() const { return values_.data() + layers()[5].offset; }
  const double* wv() const { return values_.data() + layers()[6].offset; }
  const double* bv() const { return values_.data() + layers()[7].offset; }

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

 private:
  NetworkShape shape_;
  std::vector<double> values_;
};

struct ForwardPass {
  std::vector<double> h1, h2;
  std::array<double, 2> logits{};
  std::array<double, 2> log_probs{};
  std::array<double, 2> probs{};
  double value = 0.0;
};

ForwardPass forward(const PolicyParams& params, std::span<const double> obs);

/// -sum p ln p with 0 ln 0 = 0.
double entropy(std::span<const double> probs);

/// Buy only when strictly more likely than Sell.
AgentAction predict_action(const PolicyParams& params, std::span<const double> obs);
/// Sell when u < p(Sell) for u uniform on [0, 1) drawn from `rng`.
AgentAction sample_action(const PolicyParams& params, std::span<const double> obs, std::mt19937_64& rng);
AgentAction sample_from(const std::array<double, 2>& probs, std::mt19937_64& rng);

/// Uniform [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& rng);

struct LossCoefficients {
  double value = 0.5;
  double entropy = 0.01;
};

/// Which loss terms contribute to a gradient.
struct LossTerms {
  bool policy = true;
  bool value = true;
  bool entropy = true;
};

/// A rollout prepared for the loss: advantages are constants.
struct LossBatch {
  std::vector<std::vector<double>> observations;
  std::vector<AgentAction> actions;
  std::vector<double> returns;
  std::vector<double> advantages;
};

struct LossBreakdown {
  double policy = 0.0;   // sum -ln pi(a|s) * A
  double value = 0.0;    // c_v * sum (R - V)^2
  double entropy = 0.0;  // -c_e * sum H
  double mean_entropy = 0.0;

  double total() const { return policy + value + entropy; }
  friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

LossBreakdown evaluate_loss(const PolicyParams& params, const LossBatch& batch, const LossCoefficients& coeffs);
/// Analytic gradient of the selected terms; the returned losses cover all terms.
LossBreakdown loss_gradient(const PolicyParams& params, const LossBatch& batch, const LossCoefficients& coeffs,
                            LossTerms terms, std::span<double> grad);

/// R_t = r_t + gamma R_{t+1}, restarting at episode ends, seeded with `bootstrap`.
std::vector<double> discounted_returns(std::span<const double> rewards, std::span<const std::uint8_t> dones,
                                       double bootstrap, double gamma);

enum class Optimizer { Sgd, RmsProp };

struct TrainConfig {
  std::size_t total_timesteps = 50000;
  std::size_t rollout_len = 5;
  double learning_rate = 0.007;
  double gamma = 0.99;
  double entropy_coeff = 0.01;
  double value_coeff = 0.5;
  std::size_t hidden = 64;
  double max_grad_norm = 0.5;  // 0 disables clipping
  double reward_scale = 1.0;   // rewards are multiplied by this before the loss
  Optimizer optimizer = Optimizer::Sgd;
  LossTerms update_terms;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Rollout {
  std::vector<std::vector<double>> observations;
  std::vector<AgentAction> actions;
  std::vector<double> rewards;
  std::vector<std::uint8_t> dones;
  std::vector<double> values;
};

struct UpdateRecord {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy_loss = 0.0;
  double entropy = 0.0;  // mean raw H over the rollout
  double grad_norm = 0.0;

  friend bool operator==(const UpdateRecord&, const UpdateRecord&) = default;
};

/// Optimizer state carried across updates.
struct OptimizerState {
  std::vector<double> square_avg;
};

/// One A2C step on `rollout`; `bootstrap_value` is V(s_{t+n}) or 0 at a terminal state.
UpdateRecord a2c_update(PolicyParams& params, const Rollout& rollout, double bootstrap_value, const TrainConfig& cfg,
                        OptimizerState& state);

struct TrainReport {
  std::vector<UpdateRecord> updates;
  std::vector<double> episode_rewards;
  std::vector<double> episode_profits;
  PolicyParams params;
  std::size_t timesteps = 0;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

/// Synchronous A2C against one environment; deterministic given cfg.seed.
TrainReport train(Environment& env, const TrainConfig& cfg);

/// Everything needed to rebuild observations and run the policy.
struct PolicyModel {
  PolicyParams params;
  Normalizer normalizer;
  EnvConfig env;
  TrainConfig train;

  friend bool operator==(const PolicyModel& a, const PolicyModel& b) {
    return a.params == b.params && a.normalizer.mean == b.normalizer.mean &&
           a.normalizer.inv_std == b.normalizer.inv_std && a.env.window == b.env.window && a.env.fee == b.env.fee;
  }
};

void write_model(const PolicyModel& model, std::ostream& out);
PolicyModel read_model(std::istream& in);
void save_model(const PolicyModel& model, const std::filesystem::path& path);
PolicyModel load_model(const std::filesystem::path& path);

}  // namespace btca

#include "btca/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "btca/csv.hpp"
#include "btca/error.hpp"
#include "btca/kernels/kernels.hpp"

namespace btca {

std::size_t NetworkShape::parameter_count() const {
  return hidden * input + hidden + hidden * hidden + hidden + 2 * hidden + 2 + hidden + 1;
}

PolicyParams::PolicyParams(NetworkShape shape) : shape_(shape), values_(shape.parameter_count(), 0.0) {}

PolicyParams::PolicyParams(NetworkShape shape, std::vector<double> values) : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.parameter_count())
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(shape_.parameter_count()) + " parameters, got " +
                                              std::to_string(values_.size()));
}

std::array<PolicyParams::Layer, 8> PolicyParams::layers() const {
  const std::size_t D = shape_.input, H = shape_.hidden;
  std::array<Layer, 8> out{{{"W1", H, D, 0},
                            {"b1", H, 1, 0},
                            {"W2", H, H, 0},
                            {"b2", H, 1, 0},
                            {"Wp", 2, H, 0},
                            {"bp", 2, 1, 0},
                            {"Wv", 1, H, 0},
                            {"bv", 1, 1, 0}}};
  std::size_t offset = 0;
  for (auto& l : out) {
    l.offset = offset;
    offset += l.size();
  }
  return out;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

PolicyParams PolicyParams::initialize(NetworkShape shape, std::uint64_t seed) {
  if (shape.input == 0 || shape.hidden == 0) throw Error(ErrorCode::ShapeMismatch, "network dimensions must be positive");
  PolicyParams p(shape);
  std::mt19937_64 rng(seed);
  auto glorot = [&](const Layer& l, double scale) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.rows + l.cols)) * scale;
    for (std::size_t i = 0; i < l.size(); ++i) p.values_[l.offset + i] = (2.0 * uniform01(rng) - 1.0) * limit;
  };
  const auto ls = p.layers();
  glorot(ls[0], 1.0);
  glorot(ls[2], 1.0);
  glorot(ls[4], 0.01);
  glorot(ls[6], 1.0);
  return p;
}

ForwardPass forward(const PolicyParams& params, std::span<const double> obs) {
  const auto& shape = params.shape();
  if (obs.size() != shape.input)
    throw Error(ErrorCode::ShapeMismatch, "observation has " + std::to_string(obs.size()) + " entries, network expects " +
                                              std::to_string(shape.input));
  const std::size_t H = shape.hidden;
  const auto& k = kernels::active();
  ForwardPass f;
  f.h1.resize(H);
  f.h2.resize(H);
  k.gemv(params.w1(), H, shape.input, obs.data(), params.b1(), f.h1.data());
  for (auto& v : f.h1) v = std::tanh(v);
  k.gemv(params.w2(), H, H, f.h1.data(), params.b2(), f.h2.data());
  for (auto& v : f.h2) v = std::tanh(v);
  k.gemv(params.wp(), 2, H, f.h2.data(), params.bp(), f.logits.data());
  k.gemv(params.wv(), 1, H, f.h2.data(), params.bv(), &f.value);

  const double m = std::max(f.logits[0], f.logits[1]);
  const double lse = m + std::log(std::exp(f.logits[0] - m) + std::exp(f.logits[1] - m));
  for (int i = 0; i < 2; ++i) {
    f.log_probs[i] = f.logits[i] - lse;
    f.probs[i] = std::exp(f.log_probs[i]);
  }
  return f;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

AgentAction predict_action(const PolicyParams& params, std::span<const double> obs) {
  const auto f = forward(params, obs);
  return f.probs[1] > f.probs[0] ? AgentAction::Buy : AgentAction::Sell;
}

AgentAction sample_from(const std::array<double, 2>& probs, std::mt19937_64& rng) {
  return uniform01(rng) < probs[0] ? AgentAction::Sell : AgentAction::Buy;
}

AgentAction sample_action(const PolicyParams& params, std::span<const double> obs, std::mt19937_64& rng) {
  return sample_from(forward(params, obs).probs, rng);
}

namespace {

void check_batch(const LossBatch& b) {
  const std::size_t n = b.observations.size();
  if (b.actions.size() != n || b.returns.size() != n || b.advantages.size() != n)
    throw Error(ErrorCode::ShapeMismatch, "loss batch fields differ in length");
}

// Entropy of a two-way softmax from its log-probabilities; stable when a probability underflows.
double entropy_from_log(const ForwardPass& f) { return -(f.probs[0] * f.log_probs[0] + f.probs[1] * f.log_probs[1]); }

}  // namespace

LossBreakdown evaluate_loss(const PolicyParams& params, const LossBatch& batch, const LossCoefficients& coeffs) {
  check_batch(batch);
  LossBreakdown out;
  for (std::size_t t = 0; t < batch.observations.size(); ++t) {
    const auto f = forward(params, batch.observations[t]);
    const double h = entropy_from_log(f);
    const double diff = batch.returns[t] - f.value;
    out.policy -= f.log_probs[encode(batch.actions[t])] * batch.advantages[t];
    out.value += coeffs.value * diff * diff;
    out.entropy -= coeffs.entropy * h;
    out.mean_entropy += h;
  }
  if (!batch.observations.empty()) out.mean_entropy /= static_cast<double>(batch.observations.size());
  return out;
}

LossBreakdown loss_gradient(const PolicyParams& params, const LossBatch& batch, const LossCoefficients& coeffs,
                            LossTerms terms, std::span<double> grad) {
  check_batch(batch);
  const auto& shape = params.shape();
  if (grad.size() != shape.parameter_count()) throw Error(ErrorCode::ShapeMismatch, "gradient buffer has the wrong size");
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t D = shape.input, H = shape.hidden;
  const auto ls = params.layers();
  double* gw1 = grad.data() + ls[0].offset;
  double* gb1 = grad.data() + ls[1].offset;
  double* gw2 = grad.data() + ls[2].offset;
  double* gb2 = grad.data() + ls[3].offset;
  double* gwp = grad.data() + ls[4].offset;
  double* gbp = grad.data() + ls[5].offset;
  double* gwv = grad.data() + ls[6].offset;
  double* gbv = grad.data() + ls[7].offset;
  const auto& k = kernels::active();

  LossBreakdown out;
  std::vector<double> dh2(H), dh1(H);
  for (std::size_t t = 0; t < batch.observations.size(); ++t) {
    const auto& obs = batch.observations[t];
    const auto f = forward(params, obs);
    const int a = encode(batch.actions[t]);
    const double adv = batch.advantages[t];
    const double h = entropy_from_log(f);
    const double diff = batch.returns[t] - f.value;
    out.policy -= f.log_probs[a] * adv;
    out.value += coeffs.value * diff * diff;
    out.entropy -= coeffs.entropy * h;
    out.mean_entropy += h;

    std::array<double, 2> dlogits{0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
      if (terms.policy) dlogits[i] += adv * (f.probs[i] - (i == a ? 1.0 : 0.0));
      // d(-c_e H)/dz_i = c_e p_i (ln p_i + H)
      if (terms.entropy) dlogits[i] += coeffs.entropy * f.probs[i] * (f.log_probs[i] + h);
    }
    const double dvalue = terms.value ? -2.0 * coeffs.value * diff : 0.0;

    k.rank1_acc(gwp, 2, H, dlogits.data(), f.h2.data());
    gbp[0] += dlogits[0];
    gbp[1] += dlogits[1];
    k.rank1_acc(gwv, 1, H, &dvalue, f.h2.data());
    gbv[0] += dvalue;

    std::fill(dh2.begin(), dh2.end(), 0.0);
    k.gemv_t_acc(params.wp(), 2, H, dlogits.data(), dh2.data());
    k.gemv_t_acc(params.wv(), 1, H, &dvalue, dh2.data());
    for (std::size_t j = 0; j < H; ++j) dh2[j] *= 1.0 - f.h2[j] * f.h2[j];
    k.rank1_acc(gw2, H, H, dh2.data(), f.h1.data());
    k.axpy(1.0, dh2.data(), gb2, H);

    std::fill(dh1.begin(), dh1.end(), 0.0);
    k.gemv_t_acc(params.w2(), H, H, dh2.data(), dh1.data());
    for (std::size_t j = 0; j < H; ++j) dh1[j] *= 1.0 - f.h1[j] * f.h1[j];
    k.rank1_acc(gw1, H, D, dh1.data(), obs.data());
    k.axpy(1.0, dh1.data(), gb1, H);
  }
  if (!batch.observations.empty()) out.mean_entropy /= static_cast<double>(batch.observations.size());
  return out;
}

std::vector<double> discounted_returns(std::span<const double> rewards, std::span<const std::uint8_t> dones,
                                       double bootstrap, double gamma) {
  if (rewards.size() != dones.size()) throw Error(ErrorCode::ShapeMismatch, "rewards and dones differ in length");
  std::vector<double> out(rewards.size());
  double r = bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    if (dones[i]) r = 0.0;
    r = rewards[i] + gamma * r;
    out[i] = r;
  }
  return out;
}

void TrainConfig::validate() const {
  if (rollout_len < 1 || total_timesteps < rollout_len)
    throw Error(ErrorCode::InvalidConfig, "need total_timesteps >= rollout_len >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidConfig, "gamma must lie in (0, 1]");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be positive");
  if (!(entropy_coeff >= 0.0) || !(value_coeff >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "loss coefficients must be >= 0");
  if (!(max_grad_norm >= 0.0)) throw Error(ErrorCode::InvalidConfig, "max_grad_norm must be >= 0");
  if (!(reward_scale > 0.0) || !std::isfinite(reward_scale))
    throw Error(ErrorCode::InvalidConfig, "reward_scale must be positive");
  if (hidden < 1) throw Error(ErrorCode::InvalidConfig, "hidden width must be >= 1");
}

UpdateRecord a2c_update(PolicyParams& params, const Rollout& rollout, double bootstrap_value, const TrainConfig& cfg,
                        OptimizerState& state) {
  const std::size_t n = rollout.observations.size();
  if (n == 0 || rollout.actions.size() != n || rollout.rewards.size() != n || rollout.dones.size() != n ||
      rollout.values.size() != n)
    throw Error(ErrorCode::ShapeMismatch, "rollout fields differ in length or are empty");
  for (double r : rollout.rewards) {
    if (!std::isfinite(r)) throw Error(ErrorCode::NonFiniteGradient, "non-finite reward in rollout");
  }

  LossBatch batch;
  batch.observations = rollout.observations;
  batch.actions = rollout.actions;
  batch.returns = discounted_returns(rollout.rewards, rollout.dones, bootstrap_value, cfg.gamma);
  batch.advantages.resize(n);
  for (std::size_t i = 0; i < n; ++i) batch.advantages[i] = batch.returns[i] - rollout.values[i];

  std::vector<double> grad(params.values().size());
  const auto losses =
      loss_gradient(params, batch, LossCoefficients{cfg.value_coeff, cfg.entropy_coeff}, cfg.update_terms, grad);

  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    throw Error(ErrorCode::NonFiniteGradient, "gradient norm is not finite (policy loss " +
                                                  csv::format_double(losses.policy) + ", value loss " +
                                                  csv::format_double(losses.value) + ")");
  }
  if (cfg.max_grad_norm > 0.0 && norm > cfg.max_grad_norm) {
    const double s = cfg.max_grad_norm / norm;
    for (auto& g : grad) g *= s;
  }

  auto theta = params.values();
  if (cfg.optimizer == Optimizer::Sgd) {
    kernels::axpy(-cfg.learning_rate, grad, theta);
  } else {
    constexpr double rho = 0.99, eps = 1e-5;
    if (state.square_avg.size() != grad.size()) state.square_avg.assign(grad.size(), 0.0);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      state.square_avg[i] = rho * state.square_avg[i] + (1.0 - rho) * grad[i] * grad[i];
      theta[i] -= cfg.learning_rate * grad[i] / (std::sqrt(state.square_avg[i]) + eps);
    }
  }
  if (!std::all_of(theta.begin(), theta.end(), [](double v) { return std::isfinite(v); }))
    throw Error(ErrorCode::NonFiniteGradient, "parameters became non-finite after an update");

  return UpdateRecord{losses.policy, losses.value, losses.entropy, losses.mean_entropy, norm};
}

TrainReport train(Environment& env, const TrainConfig& cfg) {
  cfg.validate();
  TrainReport report;
  report.params = PolicyParams::initialize(NetworkShape{env.observation_size(), cfg.hidden}, cfg.seed);
  // Separate streams for initialization and action sampling.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  OptimizerState opt;

  Observation obs = env.reset();
  double episode_reward = 0.0;
  while (report.timesteps < cfg.total_timesteps) {
    Rollout ro;
    const std::size_t steps = std::min(cfg.rollout_len, cfg.total_timesteps - report.timesteps);
    bool ended = false;
    for (std::size_t i = 0; i < steps && !ended; ++i) {
      const auto f = forward(report.params, obs);
      const AgentAction a = sample_from(f.probs, rng);
      auto out = env.step(a);
      ro.observations.push_back(std::move(obs));
      ro.actions.push_back(a);
      ro.rewards.push_back(out.reward * cfg.reward_scale);
      ro.dones.push_back(out.done ? 1 : 0);
      ro.values.push_back(f.value);
      episode_reward += out.reward;
      ++report.timesteps;
      if (out.done) {
        report.episode_rewards.push_back(episode_reward);
        if (auto p = env.episode_profit()) report.episode_profits.push_back(*p);
        episode_reward = 0.0;
        obs = env.reset();
        ended = true;
      } else {
        obs = std::move(out.observation);
      }
    }
    const double bootstrap = ended ? 0.0 : forward(report.params, obs).value;
    report.updates.push_back(a2c_update(report.params, ro, bootstrap, cfg, opt));
  }
  return report;
}

// Model file.

namespace {

constexpr const char* kMagic = "btca-policy-model";
constexpr int kVersion = 1;

std::string_view optimizer_name(Optimizer o) { return o == Optimizer::RmsProp ? "rmsprop" : "sgd"; }

[[noreturn]] void bad_model(const std::string& why) { throw Error(ErrorCode::InvalidModelFile, why); }

double read_double(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) bad_model(std::string("missing ") + what);
  auto v = csv::parse_double(tok);
  if (!v) bad_model(std::string("bad number for ") + what + ": '" + tok + "'");
  return *v;
}

std::size_t read_count(std::istream& in, const char* what) {
  std::string tok;
  if (!(in >> tok)) bad_model(std::string("missing ") + what);
  auto v = csv::parse_int(tok);
  if (!v || *v < 0) bad_model(std::string("bad count for ") + what + ": '" + tok + "'");
  return static_cast<std::size_t>(*v);
}

void expect(std::istream& in, std::string_view keyword) {
  std::string tok;
  if (!(in >> tok) || tok != keyword) bad_model("expected '" + std::string(keyword) + "', found '" + tok + "'");
}

}  // namespace

void write_model(const PolicyModel& model, std::ostream& out) {
  const auto& shape = model.params.shape();
  const auto& t = model.train;
  out << kMagic << ' ' << kVersion << '\n';
  out << "input " << shape.input << '\n';
  out << "hidden " << shape.hidden << '\n';
  out << "window " << model.env.window << '\n';
  out << "features " << model.normalizer.features() << '\n';
  out << "fee " << csv::format_double(model.env.fee) << '\n';
  out << "seed " << t.seed << '\n';
  out << "train total_timesteps " << t.total_timesteps << " rollout_len " << t.rollout_len << " learning_rate "
      << csv::format_double(t.learning_rate) << " gamma " << csv::format_double(t.gamma) << " entropy_coeff "
      << csv::format_double(t.entropy_coeff) << " value_coeff " << csv::format_double(t.value_coeff)
      << " max_grad_norm " << csv::format_double(t.max_grad_norm) << " reward_scale "
      << csv::format_double(t.reward_scale) << " optimizer " << optimizer_name(t.optimizer) << '\n';
  out << "normalizer_mean";
  for (double v : model.normalizer.mean) out << ' ' << csv::format_double(v);
  out << "\nnormalizer_inv_std";
  for (double v : model.normalizer.inv_std) out << ' ' << csv::format_double(v);
  out << '\n';
  const auto values = model.params.values();
  for (const auto& l : model.params.layers()) {
    out << "layer " << l.name << ' ' << l.rows << ' ' << l.cols << '\n';
    for (std::size_t i = 0; i < l.size(); ++i) {
      out << csv::format_double(values[l.offset + i]) << ((i + 1) % 8 == 0 || i + 1 == l.size() ? '\n' : ' ');
    }
  }
  out << "end\n";
}

PolicyModel read_model(std::istream& in) {
  expect(in, kMagic);
  if (read_count(in, "version") != kVersion) bad_model("unsupported model file version");
  PolicyModel m;
  NetworkShape shape;
  expect(in, "input");
  shape.input = read_count(in, "input");
  expect(in, "hidden");
  shape.hidden = read_count(in, "hidden");
  expect(in, "window");
  m.env.window = read_count(in, "window");
  expect(in, "features");
  const std::size_t features = read_count(in, "features");
  if (features != kFeatureCount || m.env.window * features != shape.input || shape.hidden == 0)
    bad_model("inconsistent input shape");
  expect(in, "fee");
  m.env.fee = read_double(in, "fee");
  expect(in, "seed");
  std::string seed_tok;
  in >> seed_tok;
  try {
    m.train.seed = std::stoull(seed_tok);
  } catch (const std::exception&) {
    bad_model("bad seed");
  }
  m.train.hidden = shape.hidden;
  expect(in, "train");
  std::string line;
  std::getline(in, line);
  std::istringstream ts(line);
  std::string key;
  while (ts >> key) {
    if (key == "total_timesteps") m.train.total_timesteps = read_count(ts, "total_timesteps");
    else if (key == "rollout_len") m.train.rollout_len = read_count(ts, "rollout_len");
    else if (key == "learning_rate") m.train.learning_rate = read_double(ts, "learning_rate");
    else if (key == "gamma") m.train.gamma = read_double(ts, "gamma");
    else if (key == "entropy_coeff") m.train.entropy_coeff = read_double(ts, "entropy_coeff");
    else if (key == "value_coeff") m.train.value_coeff = read_double(ts, "value_coeff");
    else if (key == "max_grad_norm") m.train.max_grad_norm = read_double(ts, "max_grad_norm");
    else if (key == "reward_scale") m.train.reward_scale = read_double(ts, "reward_scale");
    else if (key == "optimizer") {
      std::string name;
      ts >> name;
      if (name == "sgd") m.train.optimizer = Optimizer::Sgd;
      else if (name == "rmsprop") m.train.optimizer = Optimizer::RmsProp;
      else bad_model("unknown optimizer '" + name + "'");
    } else {
      bad_model("unknown train key '" + key + "'");
    }
  }
  expect(in, "normalizer_mean");
  m.normalizer.mean.resize(features);
  for (auto& v : m.normalizer.mean) v = read_double(in, "normalizer_mean");
  expect(in, "normalizer_inv_std");
  m.normalizer.inv_std.resize(features);
  for (auto& v : m.normalizer.inv_std) v = read_double(in, "normalizer_inv_std");

  PolicyParams layout(shape);
  std::vector<double> values(shape.parameter_count());
  for (const auto& l : layout.layers()) {
    expect(in, "layer");
    expect(in, l.name);
    if (read_count(in, "rows") != l.rows || read_count(in, "cols") != l.cols)
      bad_model(std::string("layer ") + l.name + " has the wrong shape");
    for (std::size_t i = 0; i < l.size(); ++i) values[l.offset + i] = read_double(in, l.name);
  }
  expect(in, "end");
  m.params = PolicyParams(shape, std::move(values));
  return m;
}

void save_model(const PolicyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_model(model, out);
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

PolicyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open model " + path.string());
  return read_model(in);
}

}  // namespace btca

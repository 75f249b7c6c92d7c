#include "btca/indicators.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "btca/csv.hpp"
#include "btca/error.hpp"
#include "btca/kernels/bmsb_formula.hpp"
#include "btca/kernels/kernels.hpp"

namespace btca {

namespace {

void require_length(std::size_t have, std::size_t need, const char* what) {
  if (have < need) {
    throw Error(ErrorCode::PeriodExceedsSeries, std::string(what) + " needs " + std::to_string(need) +
                                                    " prices, got " + std::to_string(have));
  }
}

void require_coefficients(double price_coeff, double scaling_coeff) {
  if (!(price_coeff > 0.0 && price_coeff < 1.0) || !(scaling_coeff > 0.0 && scaling_coeff < 1.0)) {
    throw Error(ErrorCode::InvalidCoefficient, "price and scaling coefficients must lie in (0, 1)");
  }
}

}  // namespace

void IndicatorConfig::validate() const {
  if (sma_period < 1 || ema_period < 1 || rsi_period < 1) {
    throw Error(ErrorCode::InvalidConfig, "indicator periods must be >= 1");
  }
  if (!(ema_smoothing > 0.0)) throw Error(ErrorCode::InvalidConfig, "ema smoothing must be > 0");
  require_coefficients(price_coeff, scaling_coeff);
}

std::size_t IndicatorConfig::defined_from() const {
  return std::max({sma_period - 1, ema_period - 1, rsi_period});
}

IndicatorValues sma(std::span<const double> prices, std::size_t period) {
  if (period < 1) throw Error(ErrorCode::InvalidConfig, "sma period must be >= 1");
  require_length(prices.size(), period, "sma");
  IndicatorValues out(prices.size());
  // Running sum re-anchored every period bars keeps drift far below 1e-9 on long series.
  double sum = 0.0;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    sum += prices[t];
    if (t >= period) sum -= prices[t - period];
    if (t + 1 >= period) {
      if ((t + 1) % period == 0) {
        sum = 0.0;
        for (std::size_t j = t + 1 - period; j <= t; ++j) sum += prices[j];
      }
      out[t] = sum / static_cast<double>(period);
    }
  }
  return out;
}

IndicatorValues ema(std::span<const double> prices, std::size_t period, double smoothing) {
  if (period < 1) throw Error(ErrorCode::InvalidConfig, "ema period must be >= 1");
  if (!(smoothing > 0.0)) throw Error(ErrorCode::InvalidConfig, "ema smoothing must be > 0");
  require_length(prices.size(), period, "ema");
  IndicatorValues out(prices.size());
  const double k = smoothing / (1.0 + static_cast<double>(period));
  double seed = 0.0;
  for (std::size_t i = 0; i < period; ++i) seed += prices[i];
  double value = seed / static_cast<double>(period);
  out[period - 1] = value;
  for (std::size_t t = period; t < prices.size(); ++t) {
    value = prices[t] * k + value * (1.0 - k);
    out[t] = value;
  }
  return out;
}

IndicatorValues rsi(std::span<const double> prices, std::size_t period) {
  if (period < 1) throw Error(ErrorCode::InvalidConfig, "rsi period must be >= 1");
  require_length(prices.size(), period + 1, "rsi");
  IndicatorValues out(prices.size());
  const double n = static_cast<double>(period);

  auto to_rsi = [](double avg_gain, double avg_loss) {
    if (avg_loss == 0.0) return 100.0;
    if (avg_gain == 0.0) return 0.0;
    return 100.0 - 100.0 / (1.0 + avg_gain / avg_loss);
  };

  double gain = 0.0;
  double loss = 0.0;
  for (std::size_t t = 1; t <= period; ++t) {
    double move = prices[t] - prices[t - 1];
    gain += std::max(move, 0.0);
    loss += std::max(-move, 0.0);
  }
  gain /= n;
  loss /= n;
  out[period] = to_rsi(gain, loss);

  for (std::size_t t = period + 1; t < prices.size(); ++t) {
    double move = prices[t] - prices[t - 1];
    gain = (gain * (n - 1.0) + std::max(move, 0.0)) / n;
    loss = (loss * (n - 1.0) + std::max(-move, 0.0)) / n;
    out[t] = to_rsi(gain, loss);
  }
  return out;
}

double bmsb_index(double price, double sma_value, double ema_value, double price_coeff, double scaling_coeff) {
  require_coefficients(price_coeff, scaling_coeff);
  if (!(price > 0.0 && sma_value > 0.0 && ema_value > 0.0)) {
    throw Error(ErrorCode::NonPositivePrice, "bmsb inputs must be positive");
  }
  return bmsb_branch::evaluate(price, sma_value, ema_value, price_coeff, scaling_coeff);
}

void bmsb_index(std::span<const double> prices, std::span<const double> sma_values,
                std::span<const double> ema_values, std::span<double> out, double price_coeff,
                double scaling_coeff) {
  require_coefficients(price_coeff, scaling_coeff);
  const std::size_t n = prices.size();
  if (sma_values.size() != n || ema_values.size() != n || out.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "bmsb batch arrays differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(prices[i] > 0.0 && sma_values[i] > 0.0 && ema_values[i] > 0.0)) {
      throw Error(ErrorCode::NonPositivePrice, "bmsb inputs must be positive");
    }
  }
  kernels::active().bmsb(prices.data(), sma_values.data(), ema_values.data(), out.data(), n, price_coeff,
                         scaling_coeff);
}

IndicatorTable compute_indicator_frames(const PriceSeries& series, const IndicatorConfig& cfg) {
  cfg.validate();
  const auto closes = series.closes();
  const std::size_t from = cfg.defined_from();
  require_length(closes.size(), from + 1, "indicator frames");

  const auto sma_values = sma(closes, cfg.sma_period);
  const auto ema_values = ema(closes, cfg.ema_period, cfg.ema_smoothing);
  const auto rsi_values = rsi(closes, cfg.rsi_period);

  const std::size_t count = closes.size() - from;
  std::vector<double> p(count), s(count), e(count), b(count);
  for (std::size_t i = 0; i < count; ++i) {
    p[i] = closes[from + i];
    s[i] = *sma_values[from + i];
    e[i] = *ema_values[from + i];
  }
  bmsb_index(p, s, e, b, cfg.price_coeff, cfg.scaling_coeff);

  IndicatorTable table;
  table.defined_from = from;
  table.frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    table.frames.push_back({series[from + i].date, s[i], e[i], *rsi_values[from + i], b[i]});
  }
  return table;
}

void write_indicator_csv(const IndicatorTable& table, std::ostream& out) {
  out << "date,sma,ema,rsi,bmsb\n";
  for (const auto& f : table.frames) {
    out << f.date.iso() << ',' << csv::format_double(f.sma) << ',' << csv::format_double(f.ema) << ','
        << csv::format_double(f.rsi) << ',' << csv::format_double(f.bmsb) << '\n';
  }
}

std::vector<IndicatorFrame> read_indicator_csv(const std::filesystem::path& path) {
  auto records = csv::read_file(path);
  if (records.empty()) throw Error(ErrorCode::MissingColumn, path.string() + " has no header");
  const auto& header = records.front().fields;
  static constexpr const char* kColumns[] = {"date", "sma", "ema", "rsi", "bmsb"};
  std::size_t idx[5];
  for (std::size_t c = 0; c < 5; ++c) {
    auto found = csv::column_index(header, kColumns[c]);
    if (!found) throw Error(ErrorCode::MissingColumn, kColumns[c]);
    idx[c] = *found;
  }
  std::vector<IndicatorFrame> frames;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r].fields;
    auto fail = [&] { return Error(ErrorCode::UnparsableRow, "line " + std::to_string(records[r].line)); };
    if (f.size() != header.size()) throw fail();
    auto date = Date::parse(f[idx[0]]);
    if (!date) throw fail();
    IndicatorFrame frame{*date};
    double* targets[] = {&frame.sma, &frame.ema, &frame.rsi, &frame.bmsb};
    for (std::size_t c = 1; c < 5; ++c) {
      auto v = csv::parse_double(f[idx[c]]);
      if (!v) throw fail();
      *targets[c - 1] = *v;
    }
    frames.push_back(frame);
  }
  return frames;
}

}  // namespace btca

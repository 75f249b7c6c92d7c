#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "btca/date.hpp"
#include "btca/market_data.hpp"

namespace btca {

/// Periods are in daily bars; weekly periods are expressed as weeks * 7.
struct IndicatorConfig {
  std::size_t sma_period = 140;  // 20 weeks
  std::size_t ema_period = 147;  // 21 weeks
  double ema_smoothing = 2.0;
  std::size_t rsi_period = 14;
  double price_coeff = 0.15;
  double scaling_coeff = 0.70;

  /// Throws InvalidConfig / InvalidCoefficient.
  void validate() const;
  /// First bar index at which SMA, EMA and RSI are all defined.
  std::size_t defined_from() const;
};

/// One value per input bar; std::nullopt before the indicator's warm-up completes.
using IndicatorValues = std::vector<std::optional<double>>;

IndicatorValues sma(std::span<const double> prices, std::size_t period);

/// Seeded at index period-1 with the period-bar SMA, then
/// ema[t] = price[t] * k + ema[t-1] * (1 - k) with k = smoothing / (1 + period).
IndicatorValues ema(std::span<const double> prices, std::size_t period, double smoothing);

/// Wilder RSI. First value at index `period` from simple averages of the first
/// `period` up/down moves, then avg = (avg * (period - 1) + move) / period.
/// Zero average loss gives 100; otherwise zero average gain gives 0.
IndicatorValues rsi(std::span<const double> prices, std::size_t period = 14);

/// Bull-market-support-band index in (-100, 100).
double bmsb_index(double price, double sma_value, double ema_value, double price_coeff, double scaling_coeff);

/// Batch form over aligned arrays; uses the active SIMD kernel.
void bmsb_index(std::span<const double> prices, std::span<const double> sma_values,
                std::span<const double> ema_values, std::span<double> out, double price_coeff,
                double scaling_coeff);

struct IndicatorFrame {
  Date date;
  double sma = 0.0;
  double ema = 0.0;
  double rsi = 0.0;
  double bmsb = 0.0;

  friend bool operator==(const IndicatorFrame&, const IndicatorFrame&) = default;
};

struct IndicatorTable {
  /// Index into the source series of frames.front().
  std::size_t defined_from = 0;
  std::vector<IndicatorFrame> frames;
};

/// Close-price indicators for every bar from cfg.defined_from() onward.
IndicatorTable compute_indicator_frames(const PriceSeries& series, const IndicatorConfig& cfg);

/// CSV `date,sma,ema,rsi,bmsb`.
void write_indicator_csv(const IndicatorTable& table, std::ostream& out);
std::vector<IndicatorFrame> read_indicator_csv(const std::filesystem::path& path);

}  // namespace btca

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "btca/date.hpp"

namespace btca {

struct PriceBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;  // BTC traded

  friend bool operator==(const PriceBar&, const PriceBar&) = default;
};

/// Contiguous daily bars, strictly increasing by one day. Immutable once built.
class PriceSeries {
 public:
  /// Validates every bar and the one-bar-per-day ordering; throws btca::Error.
  explicit PriceSeries(std::vector<PriceBar> bars);

  std::size_t size() const { return bars_.size(); }
  const PriceBar& operator[](std::size_t i) const { return bars_[i]; }
  std::span<const PriceBar> bars() const { return bars_; }
  const PriceBar& front() const { return bars_.front(); }
  const PriceBar& back() const { return bars_.back(); }

  std::vector<double> closes() const;
  std::vector<double> volumes() const;

  /// Bars [first, first + count).
  PriceSeries slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

 private:
  std::vector<PriceBar> bars_;
};

struct SplitSpec {
  std::size_t train_len = 0;
  std::size_t window = 1;
};

struct TrainTestSplit {
  PriceSeries train;
  PriceSeries test;
};

/// Header `date,open,high,low,close,volume` (any column order); rows must already be in date order.
PriceSeries load_price_csv(const std::filesystem::path& path);
PriceSeries read_price_csv(std::istream& in);

/// Canonical column order, shortest round-trip number formatting.
void write_price_csv(const PriceSeries& series, std::ostream& out);
void write_price_csv(const PriceSeries& series, const std::filesystem::path& path);

TrainTestSplit split(const PriceSeries& series, const SplitSpec& spec);

}  // namespace btca

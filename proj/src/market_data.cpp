#include "btca/market_data.hpp"

#include <array>
#include <fstream>
#include <ostream>
#include <string>

#include "btca/csv.hpp"
#include "btca/error.hpp"

namespace btca {

namespace {

void validate_bar(const PriceBar& bar, const std::string& where) {
  if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0)) {
    throw Error(ErrorCode::NonPositivePrice, where + " (" + bar.date.iso() + ")");
  }
  if (!(bar.volume >= 0.0)) {
    throw Error(ErrorCode::InconsistentBar, where + ": negative volume on " + bar.date.iso());
  }
  bool ordered = bar.low <= bar.open && bar.open <= bar.high && bar.low <= bar.close &&
                 bar.close <= bar.high;
  if (!ordered) {
    throw Error(ErrorCode::InconsistentBar, where + ": low/open/close/high out of order on " + bar.date.iso());
  }
}

}  // namespace

PriceSeries::PriceSeries(std::vector<PriceBar> bars) : bars_(std::move(bars)) {
  if (bars_.empty()) throw Error(ErrorCode::InconsistentBar, "price series is empty");
  for (std::size_t i = 0; i < bars_.size(); ++i) {
    validate_bar(bars_[i], "bar " + std::to_string(i));
    if (i == 0) continue;
    int step = bars_[i].date - bars_[i - 1].date;
    if (step <= 0) {
      throw Error(ErrorCode::NonMonotonicDates,
                  bars_[i].date.iso() + " does not follow " + bars_[i - 1].date.iso());
    }
    if (step > 1) {
      throw Error(ErrorCode::DateGap, "missing days between " + bars_[i - 1].date.iso() + " and " +
                                          bars_[i].date.iso());
    }
  }
}

std::vector<double> PriceSeries::closes() const {
  std::vector<double> out;
  out.reserve(bars_.size());
  for (const auto& b : bars_) out.push_back(b.close);
  return out;
}

std::vector<double> PriceSeries::volumes() const {
  std::vector<double> out;
  out.reserve(bars_.size());
  for (const auto& b : bars_) out.push_back(b.volume);
  return out;
}

PriceSeries PriceSeries::slice(std::size_t first, std::size_t count) const {
  if (first + count > bars_.size() || count == 0) {
    throw Error(ErrorCode::SplitOutOfRange, "slice outside series");
  }
  return PriceSeries(std::vector<PriceBar>(bars_.begin() + static_cast<std::ptrdiff_t>(first),
                                           bars_.begin() + static_cast<std::ptrdiff_t>(first + count)));
}

PriceSeries read_price_csv(std::istream& in) {
  auto records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::MissingColumn, "empty file, expected a header row");
  const auto& header = records.front().fields;

  static constexpr std::array<const char*, 6> kColumns{"date", "open", "high", "low", "close", "volume"};
  std::array<std::size_t, 6> idx{};
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    auto found = csv::column_index(header, kColumns[c]);
    if (!found) throw Error(ErrorCode::MissingColumn, kColumns[c]);
    idx[c] = *found;
  }

  std::vector<PriceBar> bars;
  bars.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    auto fail = [&] { return Error(ErrorCode::UnparsableRow, "line " + std::to_string(rec.line)); };
    if (rec.fields.size() != header.size()) throw fail();
    auto date = Date::parse(rec.fields[idx[0]]);
    if (!date) throw fail();
    PriceBar bar{*date};
    double* targets[] = {&bar.open, &bar.high, &bar.low, &bar.close, &bar.volume};
    for (std::size_t c = 1; c < 6; ++c) {
      auto v = csv::parse_double(rec.fields[idx[c]]);
      if (!v) throw fail();
      *targets[c - 1] = *v;
    }
    if (!bars.empty() && bar.date <= bars.back().date) {
      throw Error(ErrorCode::NonMonotonicDates,
                  "line " + std::to_string(rec.line) + ": " + bar.date.iso() + " not after " + bars.back().date.iso());
    }
    if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0)) {
      throw Error(ErrorCode::NonPositivePrice, "line " + std::to_string(rec.line));
    }
    bars.push_back(bar);
  }
  return PriceSeries(std::move(bars));
}

PriceSeries load_price_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_price_csv(in);
}

void write_price_csv(const PriceSeries& series, std::ostream& out) {
  out << "date,open,high,low,close,volume\n";
  for (const auto& b : series.bars()) {
    out << b.date.iso() << ',' << csv::format_double(b.open) << ',' << csv::format_double(b.high) << ','
        << csv::format_double(b.low) << ',' << csv::format_double(b.close) << ','
        << csv::format_double(b.volume) << '\n';
  }
}

void write_price_csv(const PriceSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_price_csv(series, out);
}

TrainTestSplit split(const PriceSeries& series, const SplitSpec& spec) {
  if (spec.window < 1 || spec.train_len < spec.window || spec.train_len >= series.size()) {
    throw Error(ErrorCode::SplitOutOfRange, "train_len " + std::to_string(spec.train_len) + ", window " +
                                                std::to_string(spec.window) + ", series length " +
                                                std::to_string(series.size()));
  }
  return {series.slice(0, spec.train_len), series.slice(spec.train_len, series.size() - spec.train_len)};
}

}  // namespace btca

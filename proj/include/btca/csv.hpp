#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace btca::csv {

/// One parsed record plus the 1-based line it started on.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// RFC-4180 reader: quoted fields may contain commas, doubled quotes and newlines.
/// Blank lines are skipped. A trailing '\r' on each line is dropped.
std::vector<Record> read(std::istream& in);
std::vector<Record> read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote or line break.
std::string quote(std::string_view field);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Index of `name` in a header row, if present.
std::optional<std::size_t> column_index(const std::vector<std::string>& header, std::string_view name);

}  // namespace btca::csv

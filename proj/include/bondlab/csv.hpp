#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bondlab::csv {

// In-memory CSV table with a header row. Fields may be double-quoted; a
// doubled quote inside a quoted field is a literal quote.
class Table {
 public:
  static Table read(const std::filesystem::path& path);
  static Table parse(std::istream& in, const std::string& source = "<stream>");

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  bool has(std::string_view column) const;
  // Column position; throws SchemaError naming the column when absent.
  std::size_t require(std::string_view column) const;
  std::optional<std::size_t> find(std::string_view column) const;

  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

// Shortest representation that parses back to the same double; NaN is
// written as an empty field.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

// Parse a numeric field. Empty, "NA" and "nan" yield nullopt.
std::optional<double> parse_optional_double(std::string_view field);
double parse_double(std::string_view field, std::size_t row, std::string_view column);
long long parse_int(std::string_view field, std::size_t row, std::string_view column);

std::string quote_if_needed(std::string_view field);

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  Writer& header(const std::vector<std::string>& columns);
  Writer& row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace bondlab::csv

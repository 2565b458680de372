#include "bondlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "bondlab/errors.hpp"

namespace bondlab::csv {
namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return parse(in, path.string());
}

Table Table::parse(std::istream& in, const std::string& source) {
  Table t;
  t.source_ = source;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      // UTF-8 byte-order mark
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line.empty()) continue;
      t.header_ = split_record(line);
      for (std::size_t i = 0; i < t.header_.size(); ++i) t.index_.emplace(t.header_[i], i);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split_record(line);
    if (fields.size() != t.header_.size()) {
      throw ValidationError(t.rows_.size() + 1,
                            "expected " + std::to_string(t.header_.size()) + " fields, got " +
                                std::to_string(fields.size()));
    }
    t.rows_.push_back(std::move(fields));
  }
  if (!have_header) throw SchemaError("", source + ": missing header row");
  return t;
}

bool Table::has(std::string_view column) const { return index_.count(std::string(column)) > 0; }

std::optional<std::size_t> Table::find(std::string_view column) const {
  auto it = index_.find(std::string(column));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Table::require(std::string_view column) const {
  auto pos = find(column);
  if (!pos) {
    throw SchemaError(std::string(column),
                      source_ + ": missing required column '" + std::string(column) + "'");
  }
  return *pos;
}

std::string format_double(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

std::optional<double> parse_optional_double(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
  if (field.empty() || field == "NA" || field == "nan" || field == "NaN") return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error("not a number: '" + std::string(field) + "'");
  }
  return v;
}

double parse_double(std::string_view field, std::size_t row, std::string_view column) {
  std::optional<double> v;
  try {
    v = parse_optional_double(field);
  } catch (const Error&) {
    throw ValidationError(row, "column '" + std::string(column) + "' is not a number: '" +
                                   std::string(field) + "'");
  }
  if (!v) throw ValidationError(row, "column '" + std::string(column) + "' is empty");
  return *v;
}

long long parse_int(std::string_view field, std::size_t row, std::string_view column) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ValidationError(row, "column '" + std::string(column) + "' is not an integer: '" +
                                   std::string(field) + "'");
  }
  return v;
}

std::string quote_if_needed(std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Writer& Writer::header(const std::vector<std::string>& columns) { return row(columns); }

Writer& Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote_if_needed(fields[i]);
  }
  out_ << '\n';
  return *this;
}

}  // namespace bondlab::csv

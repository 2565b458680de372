#include "bondlab/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <ostream>
#include <set>
#include <tuple>

#include "bondlab/csv.hpp"
#include "bondlab/errors.hpp"

namespace bondlab {
namespace {

const std::vector<std::string> kTransactionColumns = {"bond_id", "timestamp", "price", "volume",
                                                      "seq"};
const std::vector<std::string> kDailyColumns = {
    "bond_id",          "date",        "vwap_price",   "high",     "low",
    "accrued_interest", "coupon_paid", "rating_sp",    "rating_moody",
    "duration",         "amount_outstanding"};
const std::vector<std::string> kMonthlyColumns = {
    "bond_id", "firm_id",     "month",  "p_end",          "p_end_date",  "p_bgn_next",
    "p_bgn_next_date", "ai_end", "coupon_next", "rating", "maturity_years", "market_value"};

constexpr std::string_view kSigPrefix = "sig_";
constexpr std::string_view kGapPrefix = "sig_gap_";

std::vector<std::size_t> require_all(const csv::Table& t, const std::vector<std::string>& cols) {
  std::vector<std::size_t> pos;
  pos.reserve(cols.size());
  for (const auto& c : cols) pos.push_back(t.require(c));
  return pos;
}

Date parse_date_field(const std::string& f, std::size_t row, std::string_view col) {
  try {
    return parse_date(f);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(row, "column '" + std::string(col) + "': " + e.what());
  }
}

std::optional<double> opt_field(const std::string& f, std::size_t row, std::string_view col) {
  try {
    return csv::parse_optional_double(f);
  } catch (const Error&) {
    throw ValidationError(row, "column '" + std::string(col) + "' is not a number: '" + f + "'");
  }
}

std::optional<int> opt_int(const std::string& f, std::size_t row, std::string_view col) {
  if (f.empty() || f == "NA") return std::nullopt;
  return static_cast<int>(csv::parse_int(f, row, col));
}

template <class T>
std::vector<T> permute(std::vector<T>& v, const std::vector<std::size_t>& order) {
  std::vector<T> out;
  out.reserve(v.size());
  for (auto i : order) out.push_back(std::move(v[i]));
  return out;
}

}  // namespace

bool is_investment_grade(int rating) { return rating >= 1 && rating <= 10; }
bool is_high_yield(int rating) { return rating >= 11 && rating <= 21; }

void sort_panel(TransactionPanel& panel) {
  std::stable_sort(panel.begin(), panel.end(), [](const auto& a, const auto& b) {
    return std::tie(a.bond_id, a.timestamp, a.seq) < std::tie(b.bond_id, b.timestamp, b.seq);
  });
}

void sort_panel(DailyPanel& panel) {
  std::stable_sort(panel.begin(), panel.end(), [](const auto& a, const auto& b) {
    return std::tie(a.bond_id, a.date) < std::tie(b.bond_id, b.date);
  });
}

void sort_panel(MonthlyPanel& panel) {
  auto less = [](const auto& a, const auto& b) {
    return std::tie(a.bond_id, a.month) < std::tie(b.bond_id, b.month);
  };
  if (!std::is_sorted(panel.begin(), panel.end(), less)) {
    std::stable_sort(panel.begin(), panel.end(), less);
  }
}

TransactionPanel read_transactions(std::istream& in, const std::string& source) {
  const auto t = csv::Table::parse(in, source);
  const auto c = require_all(t, kTransactionColumns);
  TransactionPanel out;
  out.reserve(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto& f = t.row(r);
    const std::size_t row = r + 1;
    TransactionRecord rec;
    rec.bond_id = f[c[0]];
    if (rec.bond_id.empty()) throw ValidationError(row, "empty bond_id");
    try {
      rec.timestamp = parse_timestamp(f[c[1]]);
    } catch (const Error& e) {
      throw ValidationError(row, std::string("column 'timestamp': ") + e.what());
    }
    rec.price = csv::parse_double(f[c[2]], row, "price");
    rec.volume = csv::parse_double(f[c[3]], row, "volume");
    rec.seq = csv::parse_int(f[c[4]], row, "seq");
    if (!(rec.price > 0.0)) throw ValidationError(row, "price must be positive");
    if (!(rec.volume >= 0.0)) throw ValidationError(row, "volume must be nonnegative");
    out.push_back(std::move(rec));
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::tie(out[a].bond_id, out[a].timestamp, out[a].seq) <
           std::tie(out[b].bond_id, out[b].timestamp, out[b].seq);
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = out[order[k - 1]];
    const auto& cur = out[order[k]];
    if (prev.bond_id == cur.bond_id && prev.timestamp.day == cur.timestamp.day &&
        cur.seq <= prev.seq) {
      throw ValidationError(order[k] + 1, "seq must be strictly increasing within bond and day");
    }
  }
  return permute(out, order);
}

DailyPanel read_daily(std::istream& in, const std::string& source) {
  const auto t = csv::Table::parse(in, source);
  const auto c = require_all(t, kDailyColumns);
  DailyPanel out;
  out.reserve(t.rows());
  std::set<std::pair<std::string, Date>> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto& f = t.row(r);
    const std::size_t row = r + 1;
    DailyBondRecord d;
    d.bond_id = f[c[0]];
    if (d.bond_id.empty()) throw ValidationError(row, "empty bond_id");
    d.date = parse_date_field(f[c[1]], row, "date");
    d.vwap_price = csv::parse_double(f[c[2]], row, "vwap_price");
    d.high = opt_field(f[c[3]], row, "high");
    d.low = opt_field(f[c[4]], row, "low");
    d.accrued_interest = opt_field(f[c[5]], row, "accrued_interest").value_or(0.0);
    d.coupon_paid = opt_field(f[c[6]], row, "coupon_paid").value_or(0.0);
    d.rating_sp = opt_int(f[c[7]], row, "rating_sp");
    d.rating_moody = opt_int(f[c[8]], row, "rating_moody");
    d.duration = opt_field(f[c[9]], row, "duration");
    d.amount_outstanding = opt_field(f[c[10]], row, "amount_outstanding").value_or(0.0);
    if (!(d.vwap_price > 0.0)) throw ValidationError(row, "vwap_price must be positive");
    if (d.high && d.low && *d.low > *d.high) throw ValidationError(row, "low exceeds high");
    if (d.rating_sp && (*d.rating_sp < 1 || *d.rating_sp > 22)) {
      throw ValidationError(row, "rating_sp outside 1..22");
    }
    if (d.rating_moody && (*d.rating_moody < 1 || *d.rating_moody > 21)) {
      throw ValidationError(row, "rating_moody outside 1..21");
    }
    if (!seen.emplace(d.bond_id, d.date).second) {
      throw ValidationError(row, "duplicate (bond_id, date)");
    }
    out.push_back(std::move(d));
  }
  sort_panel(out);
  return out;
}

MonthlyPanel read_monthly(std::istream& in, const std::string& source) {
  const auto t = csv::Table::parse(in, source);
  const auto c = require_all(t, kMonthlyColumns);
  const auto dur_col = t.find("duration");
  const auto ai_bgn_col = t.find("ai_bgn_next");
  std::vector<std::pair<std::string, std::size_t>> sig_cols;
  std::vector<std::pair<std::string, std::size_t>> gap_cols;
  for (std::size_t i = 0; i < t.header().size(); ++i) {
    const auto& h = t.header()[i];
    if (h.rfind(kGapPrefix, 0) == 0) {
      gap_cols.emplace_back(h.substr(kGapPrefix.size()), i);
    } else if (h.rfind(kSigPrefix, 0) == 0) {
      sig_cols.emplace_back(h.substr(kSigPrefix.size()), i);
    }
  }
  MonthlyPanel out;
  out.reserve(t.rows());
  std::set<std::pair<std::string, int>> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto& f = t.row(r);
    const std::size_t row = r + 1;
    BondMonth m;
    m.bond_id = f[c[0]];
    if (m.bond_id.empty()) throw ValidationError(row, "empty bond_id");
    m.firm_id = f[c[1]];
    try {
      m.month = parse_month(f[c[2]]);
    } catch (const Error& e) {
      throw ValidationError(row, std::string("column 'month': ") + e.what());
    }
    if (auto p = opt_field(f[c[3]], row, "p_end")) {
      if (!(*p > 0.0)) throw ValidationError(row, "p_end must be positive");
      m.p_end = DatedPrice{*p, parse_date_field(f[c[4]], row, "p_end_date")};
    }
    if (auto p = opt_field(f[c[5]], row, "p_bgn_next")) {
      if (!(*p > 0.0)) throw ValidationError(row, "p_bgn_next must be positive");
      m.p_bgn_next = DatedPrice{*p, parse_date_field(f[c[6]], row, "p_bgn_next_date")};
      if (m.p_end && !(m.p_bgn_next->date > m.p_end->date)) {
        throw ValidationError(row, "p_bgn_next_date must be after p_end_date");
      }
    }
    m.ai_end = opt_field(f[c[7]], row, "ai_end").value_or(0.0);
    m.coupon_next = opt_field(f[c[8]], row, "coupon_next").value_or(0.0);
    m.rating = opt_int(f[c[9]], row, "rating").value_or(0);
    if (m.rating < 0 || m.rating > 22) throw ValidationError(row, "rating outside 1..22");
    m.in_default = m.rating == kDefaultRating;
    m.maturity_years = opt_field(f[c[10]], row, "maturity_years");
    m.market_value = opt_field(f[c[11]], row, "market_value").value_or(0.0);
    if (!(m.market_value >= 0.0)) throw ValidationError(row, "market_value must be nonnegative");
    if (dur_col) m.duration = opt_field(f[*dur_col], row, "duration");
    if (ai_bgn_col) m.ai_bgn_next = opt_field(f[*ai_bgn_col], row, "ai_bgn_next");
    for (const auto& [name, pos] : sig_cols) {
      m.signals[name] = opt_field(f[pos], row, t.header()[pos]).value_or(std::nan(""));
    }
    for (const auto& [name, pos] : gap_cols) {
      m.signals_gapped[name] = opt_field(f[pos], row, t.header()[pos]).value_or(std::nan(""));
    }
    if (!seen.emplace(m.bond_id, month_index(m.month)).second) {
      throw ValidationError(row, "duplicate (bond_id, month)");
    }
    out.push_back(std::move(m));
  }
  sort_panel(out);
  return out;
}

TransactionPanel load_transactions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_transactions(in, path.string());
}

DailyPanel load_daily(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_daily(in, path.string());
}

MonthlyPanel load_monthly(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_monthly(in, path.string());
}

Panel load_panel(const std::filesystem::path& path, Schema schema) {
  switch (schema) {
    case Schema::transaction:
      return load_transactions(path);
    case Schema::daily:
      return load_daily(path);
    case Schema::monthly:
      return load_monthly(path);
  }
  throw Error("unknown schema");
}

std::optional<Schema> detect_schema(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream hdr(line + "\n");
  const auto t = csv::Table::parse(hdr, path.string());
  auto has_all = [&](const std::vector<std::string>& cols) {
    return std::all_of(cols.begin(), cols.end(), [&](const auto& c) { return t.has(c); });
  };
  if (has_all(kMonthlyColumns)) return Schema::monthly;
  if (has_all(kDailyColumns)) return Schema::daily;
  if (has_all(kTransactionColumns)) return Schema::transaction;
  return std::nullopt;
}

void write_transactions(std::ostream& out, const TransactionPanel& panel) {
  csv::Writer w(out);
  w.header(kTransactionColumns);
  for (const auto& r : panel) {
    w.row({r.bond_id, format_timestamp(r.timestamp), csv::format_double(r.price),
           csv::format_double(r.volume), std::to_string(r.seq)});
  }
}

void write_daily(std::ostream& out, const DailyPanel& panel) {
  csv::Writer w(out);
  w.header(kDailyColumns);
  auto opt_int_str = [](const std::optional<int>& v) {
    return v ? std::to_string(*v) : std::string{};
  };
  for (const auto& d : panel) {
    w.row({d.bond_id, format_date(d.date), csv::format_double(d.vwap_price),
           csv::format_optional(d.high), csv::format_optional(d.low),
           csv::format_double(d.accrued_interest), csv::format_double(d.coupon_paid),
           opt_int_str(d.rating_sp), opt_int_str(d.rating_moody), csv::format_optional(d.duration),
           csv::format_double(d.amount_outstanding)});
  }
}

std::vector<std::string> signal_names(const MonthlyPanel& panel) {
  std::set<std::string> names;
  for (const auto& m : panel) {
    for (const auto& [k, v] : m.signals) names.insert(k);
    for (const auto& [k, v] : m.signals_gapped) names.insert(k);
  }
  return {names.begin(), names.end()};
}

std::vector<std::string> monthly_columns(const MonthlyPanel& panel) {
  auto cols = kMonthlyColumns;
  bool any_duration = false;
  bool any_ai_bgn = false;
  std::set<std::string> sig;
  std::set<std::string> gap;
  for (const auto& m : panel) {
    any_duration = any_duration || m.duration.has_value();
    any_ai_bgn = any_ai_bgn || m.ai_bgn_next.has_value();
    for (const auto& [k, v] : m.signals) sig.insert(k);
    for (const auto& [k, v] : m.signals_gapped) gap.insert(k);
  }
  if (any_duration) cols.push_back("duration");
  if (any_ai_bgn) cols.push_back("ai_bgn_next");
  for (const auto& s : sig) cols.push_back(std::string(kSigPrefix) + s);
  for (const auto& s : gap) cols.push_back(std::string(kGapPrefix) + s);
  return cols;
}

std::vector<std::string> monthly_fields(const BondMonth& m,
                                        const std::vector<std::string>& columns) {
  std::vector<std::string> out;
  out.reserve(columns.size());
  auto lookup = [](const std::map<std::string, double>& src, const std::string& key) {
    auto it = src.find(key);
    return it == src.end() ? std::string{} : csv::format_double(it->second);
  };
  for (const auto& col : columns) {
    if (col == "bond_id") out.push_back(m.bond_id);
    else if (col == "firm_id") out.push_back(m.firm_id);
    else if (col == "month") out.push_back(format_month(m.month));
    else if (col == "p_end") out.push_back(m.p_end ? csv::format_double(m.p_end->price) : "");
    else if (col == "p_end_date") out.push_back(m.p_end ? format_date(m.p_end->date) : "");
    else if (col == "p_bgn_next")
      out.push_back(m.p_bgn_next ? csv::format_double(m.p_bgn_next->price) : "");
    else if (col == "p_bgn_next_date")
      out.push_back(m.p_bgn_next ? format_date(m.p_bgn_next->date) : "");
    else if (col == "ai_end") out.push_back(csv::format_double(m.ai_end));
    else if (col == "coupon_next") out.push_back(csv::format_double(m.coupon_next));
    else if (col == "rating") out.push_back(m.rating ? std::to_string(m.rating) : "");
    else if (col == "maturity_years") out.push_back(csv::format_optional(m.maturity_years));
    else if (col == "market_value") out.push_back(csv::format_double(m.market_value));
    else if (col == "duration") out.push_back(csv::format_optional(m.duration));
    else if (col == "ai_bgn_next") out.push_back(csv::format_optional(m.ai_bgn_next));
    else if (col.rfind(kGapPrefix, 0) == 0)
      out.push_back(lookup(m.signals_gapped, col.substr(kGapPrefix.size())));
    else if (col.rfind(kSigPrefix, 0) == 0)
      out.push_back(lookup(m.signals, col.substr(kSigPrefix.size())));
    else
      out.emplace_back();
  }
  return out;
}

void write_monthly(std::ostream& out, const MonthlyPanel& panel) {
  csv::Writer w(out);
  const auto cols = monthly_columns(panel);
  w.header(cols);
  for (const auto& m : panel) w.row(monthly_fields(m, cols));
}

}  // namespace bondlab

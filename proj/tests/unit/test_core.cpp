#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "bondlab/calendar.hpp"
#include "bondlab/csv.hpp"
#include "bondlab/dates.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/panel.hpp"
#include "fixtures.hpp"

using namespace bondlab;
using fx::ymd;
using fx::ym;

TEST_SUITE("dates") {
  TEST_CASE("round trips") {
    CHECK(format_date(parse_date("2024-02-29")) == "2024-02-29");
    CHECK(format_month(parse_month("2023-11")) == "2023-11");
    CHECK(format_timestamp(parse_timestamp("2024-01-05T09:30:15")) == "2024-01-05T09:30:15");
    CHECK(parse_timestamp("2024-01-05 09:30").seconds == 9 * 3600 + 30 * 60);
    CHECK_THROWS_AS(parse_date("2024-13-01"), Error);
    CHECK_THROWS_AS(parse_timestamp("2024-01-05X09:30"), Error);
  }

  TEST_CASE("month arithmetic") {
    CHECK(first_day(ym(2024, 2)) == ymd(2024, 2, 1));
    CHECK(last_day(ym(2024, 2)) == ymd(2024, 2, 29));
    CHECK(month_of(ymd(2023, 12, 31)) == ym(2023, 12));
    CHECK(month_index(ym(2024, 1)) - month_index(ym(2023, 12)) == 1);
  }

  TEST_CASE("last five business days of January 2024") {
    const auto cal = TradingCalendar::for_years(2024, 2024);
    const auto w = window_dates(cal, ym(2024, 1), WindowSide::last_n, 5);
    const std::vector<Date> want = {ymd(2024, 1, 25), ymd(2024, 1, 26), ymd(2024, 1, 29),
                                    ymd(2024, 1, 30), ymd(2024, 1, 31)};
    CHECK(w == want);
  }

  TEST_CASE("first business day and holidays") {
    const auto plain = TradingCalendar::for_years(2024, 2024);
    CHECK(window_dates(plain, ym(2024, 6), WindowSide::first_n, 1) ==
          std::vector<Date>{ymd(2024, 6, 3)});
    const std::vector<Date> hol = {ymd(2024, 1, 1)};
    const auto cal = TradingCalendar::for_years(2024, 2024, hol);
    const auto w = window_dates(cal, ym(2024, 1), WindowSide::first_n, 5);
    REQUIRE(w.size() == 5);
    CHECK(w.front() == ymd(2024, 1, 2));
    CHECK(w.back() == ymd(2024, 1, 8));
  }

  TEST_CASE("month outside calendar") {
    const auto cal = TradingCalendar::for_years(2024, 2024);
    CHECK_THROWS_AS(window_dates(cal, ym(2025, 1), WindowSide::last_n, 5), RangeError);
  }

  TEST_CASE("business day distance") {
    const auto cal = TradingCalendar::for_years(2024, 2024);
    CHECK(cal.business_days_between(ymd(2024, 1, 31), ymd(2024, 2, 1)) == 1);
    CHECK(cal.business_days_between(ymd(2024, 1, 26), ymd(2024, 1, 29)) == 1);
  }
}

TEST_SUITE("panel") {
  TEST_CASE("three valid transactions load sorted by seq") {
    std::istringstream in(
        "bond_id,timestamp,price,volume,seq\n"
        "B1,2024-01-02T10:00:00,100.0,10,1\n"
        "B1,2024-01-02T11:00:00,100.5,10,2\n"
        "B1,2024-01-03T10:00:00,101.0,10,3\n");
    const auto p = read_transactions(in);
    REQUIRE(p.size() == 3);
    CHECK(p[0].seq == 1);
    CHECK(p[2].seq == 3);
  }

  TEST_CASE("non-positive price names the row") {
    std::istringstream in(
        "bond_id,timestamp,price,volume,seq\n"
        "B1,2024-01-02T10:00:00,100.0,10,1\n"
        "B1,2024-01-02T11:00:00,0,10,2\n");
    try {
      read_transactions(in);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.row() == 2);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }

  TEST_CASE("missing column names the column") {
    std::istringstream in("bond_id,timestamp,volume,seq\nB1,2024-01-02,10,1\n");
    try {
      read_transactions(in);
      FAIL("expected a schema error");
    } catch (const SchemaError& e) {
      CHECK(e.column() == "price");
    }
  }

  TEST_CASE("unsorted input matches a pre-sorted copy") {
    const std::string head = "bond_id,timestamp,price,volume,seq\n";
    std::istringstream unsorted(head +
                                "B2,2024-01-02T10:00:00,99,1,1\n"
                                "B1,2024-01-03T10:00:00,101,1,3\n"
                                "B1,2024-01-02T10:00:00,100,1,2\n"
                                "B1,2024-01-02T10:00:00,100.2,1,1\n");
    std::istringstream sorted(head +
                              "B1,2024-01-02T10:00:00,100.2,1,1\n"
                              "B1,2024-01-02T10:00:00,100,1,2\n"
                              "B1,2024-01-03T10:00:00,101,1,3\n"
                              "B2,2024-01-02T10:00:00,99,1,1\n");
    const auto a = read_transactions(unsorted);
    const auto b = read_transactions(sorted);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].bond_id == b[i].bond_id);
      CHECK(a[i].seq == b[i].seq);
      CHECK(a[i].price == b[i].price);
    }
  }

  TEST_CASE("monthly panel round trip keeps signals") {
    MonthlyPanel p;
    auto c = fx::cell(100.25);
    c.signals["str"] = -0.01;
    c.signals_gapped["str"] = -0.012;
    c.p_bgn_next = DatedPrice{100.5, ymd(2024, 2, 1)};
    c.maturity_years = 7.5;
    p.push_back(c);
    std::ostringstream out;
    write_monthly(out, p);
    std::istringstream in(out.str());
    const auto q = read_monthly(in);
    REQUIRE(q.size() == 1);
    CHECK(q[0].p_end->price == 100.25);
    CHECK(q[0].p_bgn_next->date == ymd(2024, 2, 1));
    CHECK(q[0].signals.at("str") == -0.01);
    CHECK(q[0].signals_gapped.at("str") == -0.012);
    CHECK(*q[0].maturity_years == 7.5);
  }

  TEST_CASE("rating classes") {
    CHECK(is_investment_grade(1));
    CHECK(is_investment_grade(10));
    CHECK_FALSE(is_investment_grade(11));
    CHECK(is_high_yield(21));
    CHECK_FALSE(is_high_yield(22));
    CHECK_FALSE(is_investment_grade(0));
  }

  TEST_CASE("csv quoting round trip") {
    std::ostringstream out;
    csv::Writer(out).header({"a", "b"}).row({"x,y", "plain"});
    std::istringstream in(out.str());
    const auto t = csv::Table::parse(in);
    REQUIRE(t.rows() == 1);
    CHECK(t.row(0)[0] == "x,y");
    CHECK(t.row(0)[1] == "plain");
    CHECK(csv::parse_double(csv::format_double(0.1 + 0.2), 1, "v") == 0.1 + 0.2);
  }
}

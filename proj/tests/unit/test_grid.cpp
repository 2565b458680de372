#include <doctest.h>

#include <set>
#include <sstream>

#include "bondlab/bias_lab.hpp"
#include "bondlab/grid.hpp"
#include "bondlab/stats.hpp"
#include "fixtures.hpp"

using namespace bondlab;
using namespace bondlab::grid;

TEST_SUITE("grid") {
  TEST_CASE("data grid sizes") {
    const auto f = enumerate_filters();
    CHECK(f.size() == 108);
    std::size_t trims = 0, prices = 0, bounces = 0;
    std::set<std::string> labels;
    for (const auto& c : f) {
      trims += c.family == Family::return_trim;
      prices += c.family == Family::price_range;
      bounces += c.family == Family::bid_ask_bounce;
      labels.insert(to_string(c.family) + c.params());
    }
    CHECK(trims == 48);
    CHECK(prices == 30);
    CHECK(bounces == 30);
    CHECK(labels.size() == 108);
    const auto g = enumerate_data_grid();
    CHECK(g.size() == 648);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i].id == static_cast<int>(i));
  }

  TEST_CASE("trim thresholds run from 20% to 95%") {
    const auto f = enumerate_filters();
    CHECK(f.front().tau == doctest::Approx(0.20));
    CHECK(f[15].tau == doctest::Approx(0.95));
  }

  TEST_CASE("method grid sizes") {
    const auto raw = enumerate_method_grid(true);
    CHECK(raw.size() == 216);
    std::size_t dropped = 0;
    for (const auto& m : raw) dropped += !m.admissible;
    CHECK(dropped == 48);
    CHECK(enumerate_method_grid().size() == 168);
  }

  TEST_CASE("formation-time exclusions") {
    returns::FormationRow row;
    row.cell = fx::cell(30.0);
    row.r_prev = 0.25;
    row.p_end_prev = 20.0;
    DataFilterConfig trim;
    trim.family = Family::return_trim;
    trim.tail = bias::Tail::right;
    trim.tau = 0.20;
    CHECK(trim.excludes(row));
    trim.tail = bias::Tail::left;
    CHECK_FALSE(trim.excludes(row));
    DataFilterConfig price;
    price.family = Family::price_range;
    price.price_mode = PriceMode::lower_only;
    price.lower = 40.0;
    CHECK(price.excludes(row));
    DataFilterConfig bounce;
    bounce.family = Family::bid_ask_bounce;
    bounce.direction = Direction::neg;
    bounce.phi = 0.05;
    CHECK_FALSE(bounce.excludes(row));
    bounce.direction = Direction::pos;
    CHECK(bounce.excludes(row));
  }

  TEST_CASE("an inert filter reproduces the baseline") {
    auto mp = fx::random_monthly(31, 60, 24);
    for (auto& c : mp) c.p_end->price = std::max(c.p_end->price, 25.0);
    const auto fp = returns::build_factor_panel(mp);
    DataFilterConfig inert;
    inert.family = Family::price_range;
    inert.price_mode = PriceMode::lower_only;
    inert.lower = 20.0;
    inert.weighting = portfolio::Weighting::value;
    GridOptions opt;
    const auto res = run_data_grid(fp, "sig", std::span(&inert, 1), opt);
    REQUIRE(res.size() == 1);
    REQUIRE(res[0].premium.has_value());
    portfolio::SortSpec spec;
    const auto base = bias::build_factor(fp, "sig", spec, bias::Approach::unadjusted);
    const auto r = stats::nw_mean(base.series.valid_returns());
    CHECK(res[0].premium->estimate == r.estimate);
    CHECK(res[0].premium->se == r.se);
  }

  TEST_CASE("parallel and serial runs agree") {
    const auto fp = returns::build_factor_panel(fx::random_monthly(32, 60, 24));
    const auto specs = enumerate_method_grid();
    const std::vector<MethodSpec> some(specs.begin(), specs.begin() + 12);
    GridOptions serial;
    GridOptions par;
    par.jobs = 3;
    const auto a = run_method_grid(fp, "sig", some, serial);
    const auto b = run_method_grid(fp, "sig", some, par);
    std::ostringstream sa, sb;
    write_grid(sa, a);
    write_grid(sb, b);
    CHECK(sa.str() == sb.str());
  }

  TEST_CASE("summary leaves degenerate and failed paths out") {
    std::vector<PathResult> rs(6);
    const double est[] = {1, 2, 3, 4, 5, 100};
    for (int i = 0; i < 6; ++i) {
      rs[i].config_id = i;
      rs[i].premium = stats::InferenceResult{est[i], 1.0, 1.0, 0.3, 1, 10};
    }
    rs[5].degenerate_months = 1;
    PathResult failed;
    failed.error = "boom";
    rs.push_back(failed);
    const auto s = summarize(rs);
    CHECK(s.paths == 7);
    CHECK(s.used == 5);
    CHECK(s.degenerate_excluded == 1);
    CHECK(s.failed == 1);
    CHECK(*s.premium_nse == 2.0);
    CHECK(*s.premium_median == 3.0);
  }

  TEST_CASE("grid output header") {
    std::ostringstream out;
    write_grid(out, {});
    CHECK(out.str() ==
          "config_id,family,params,weighting,subsample,premium,prem_t,alpha,alpha_t,months,"
          "degenerate_months\n");
  }
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bondlab/ceiv_sim.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/hash.hpp"
#include "bondlab/rng.hpp"
#include "oracles.hpp"

using namespace bondlab;
using namespace bondlab::sim;

namespace {

// Computed once with oracle::kappa and frozen.
constexpr double kKappa10 = 1.754983319324862;
constexpr double kKappa50 = 0.797884560802871;

SimConfig small(SignalKind kind) {
  SimConfig c;
  c.kind = kind;
  c.n_bonds = 200;
  c.n_months = 24;
  return c;
}

}  // namespace

TEST_SUITE("ceiv_sim") {
  TEST_CASE("tail constant") {
    CHECK(kappa(0.10) == doctest::Approx(kKappa10).epsilon(1e-12));
    CHECK(oracle::kappa(0.10) == doctest::Approx(kKappa10).epsilon(1e-12));
    CHECK(kappa(0.50) == doctest::Approx(kKappa50).epsilon(1e-12));
    CHECK(kappa(0.50) == doctest::Approx(1.0 / std::sqrt(2.0 * 3.141592653589793) / 0.5));
    CHECK(kappa(1.0) == 0.0);
    for (double a : {0.02, 0.05, 0.2, 0.25, 0.4}) {
      CHECK(kappa(a) == doctest::Approx(oracle::kappa(a)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(kappa(0.0), DomainError);
    CHECK_THROWS_AS(kappa(1.5), DomainError);
  }

  TEST_CASE("closed-form bias") {
    SimConfig c;
    c.sigma_s = sigma_s_for_rho(c, 1.0);
    CHECK(c.rho() == doctest::Approx(1.0));
    CHECK(theoretical_bias(c) == doctest::Approx(2.0 * kKappa10 * 0.005).epsilon(1e-12));
    CHECK(std::round(theoretical_bias(c) * 1e7) / 1e7 == 0.0175498);
    c.kind = SignalKind::reversal;
    c.sigma_s = sigma_s_for_rho(c, 1.0);
    CHECK(theoretical_bias(c) == doctest::Approx(std::sqrt(2.0) * kKappa10 * 0.005).epsilon(1e-12));
    CHECK(theoretical_bias(c) == doctest::Approx(0.0124097).epsilon(1e-5));
    c.kind = SignalKind::non_price;
    CHECK(theoretical_bias(c) == 0.0);
    c.kind = SignalKind::price_level;
    c.sigma_s = sigma_s_for_rho(c, 0.5);
    CHECK(c.rho() == doctest::Approx(0.5));
    CHECK(theoretical_bias(c) == doctest::Approx(kKappa10 * 0.005).epsilon(1e-12));
  }

  TEST_CASE("footnote economy") {
    const auto r = footnote_economy();
    CHECK(r.measured_ls == doctest::Approx(100.0 / 99.5 - 100.0 / 100.5).epsilon(1e-12));
    CHECK(std::round(r.measured_ls * 1e8) / 1e8 == 0.01000025);
    CHECK(r.true_ls == 0.0);
  }

  TEST_CASE("no noise means observed equals true") {
    auto c = small(SignalKind::price_level);
    c.sigma_delta = 0.0;
    c.sigma_s = 1.0;
    const auto sim = simulate_panel(c);
    for (const auto& t : sim.truth) {
      if (std::isnan(t.r_true)) continue;
      CHECK(t.r_obs == doctest::Approx(t.r_true).epsilon(1e-12));
    }
    const auto res = run_experiment(c, 2);
    CHECK(res.approaches[0].measured == doctest::Approx(res.approaches[1].measured).epsilon(1e-12));
    CHECK(res.approaches[0].measured == doctest::Approx(res.approaches[2].measured).epsilon(1e-12));
  }

  TEST_CASE("decomposition adds up") {
    auto c = small(SignalKind::price_level);
    const auto sim = simulate_panel(c, 3);
    portfolio::SortSpec spec;
    spec.n_portfolios = c.n_portfolios();
    spec.weighting = portfolio::Weighting::equal;
    const auto d = decompose(sim, spec);
    REQUIRE(!d.measured.empty());
    for (std::size_t i = 0; i < d.measured.size(); ++i) {
      CHECK(d.measured[i] == doctest::Approx(d.true_part[i] + d.bias_part[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("noise covariance is about sigma_delta squared") {
    auto c = small(SignalKind::price_level);
    c.n_bonds = 1000;
    const auto sim = simulate_panel(c);
    CHECK(noise_covariance(sim) == doctest::Approx(c.sigma_delta * c.sigma_delta).epsilon(0.1));
    CHECK(realized_rho(sim) == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("replications are reproducible and independent") {
    const auto c = small(SignalKind::reversal);
    const auto a = simulate_panel(c, 1);
    const auto b = simulate_panel(c, 1);
    const auto d = simulate_panel(c, 2);
    REQUIRE(a.truth.size() == b.truth.size());
    CHECK(a.truth[10].delta == b.truth[10].delta);
    CHECK(a.truth[10].delta != d.truth[10].delta);
    const auto r1 = run_experiment(c, 3, 1);
    const auto r2 = run_experiment(c, 3, 2);
    CHECK(r1.config_hash == r2.config_hash);
    CHECK(r1.approaches[0].measured == r2.approaches[0].measured);
  }

  TEST_CASE("counter RNG") {
    CounterRng g(42);
    CHECK(g.bits(1, 2, 3, 4) == CounterRng(42).bits(1, 2, 3, 4));
    CHECK(g.bits(1, 2, 3, 4) != g.bits(1, 2, 3, 5));
    double s = 0.0, s2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double z = g.normal(7, 0, 0, static_cast<std::uint64_t>(i));
      s += z;
      s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.05);
    CHECK(std::abs(s2 / n - 1.0) < 0.05);
    for (int i = 0; i < 1000; ++i) {
      const double u = g.uniform(1, 1, 1, static_cast<std::uint64_t>(i));
      CHECK(u > 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("configuration checks") {
    SimConfig c;
    c.alpha = 0.3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.alpha = 0.25;
    CHECK_NOTHROW(c.validate());
    CHECK(c.n_portfolios() == 4);
    CHECK_THROWS_AS(run_experiment(small(SignalKind::price_level), 1), ConfigError);
  }

  TEST_CASE("rebound harness plants right-tail losers") {
    ReboundConfig rc;
    rc.n_bonds = 100;
    rc.n_months = 24;
    const auto p = simulate_rebound_panel(rc);
    CHECK(p.size() == 2400);
    std::size_t big = 0;
    for (const auto& c : p) {
      auto it = c.signals.find("mom");
      if (it != c.signals.end() && it->second < -0.2) ++big;
    }
    CHECK(big > 0);
  }

  TEST_CASE("report format and hashing") {
    SimResult r;
    r.config_hash = "abc";
    r.approaches[0] = {"unadjusted", 0.0175, 0.0001, 0.0175, 0.0};
    r.approaches[1] = {"adjusted_signal", 0.0, 0.0001, 0.0, 0.0};
    r.approaches[2] = {"adjusted_return", 0.0, 0.0001, 0.0, 0.0};
    std::ostringstream out;
    write_report(out, r);
    CHECK(out.str().rfind("config_hash,approach,measured,mc_se,theory,z\n", 0) == 0);
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "bondlab/ceiv_sim.hpp"
#include "bondlab/cli.hpp"
#include "bondlab/errors.hpp"
#include "bondlab/grid.hpp"
#include "bondlab/stats.hpp"
#include "bondlab/txn_clean.hpp"

namespace py = pybind11;
using namespace bondlab;

namespace {

py::dict inference_dict(const stats::InferenceResult& r) {
  py::dict d;
  d["estimate"] = r.estimate;
  d["se"] = r.se;
  d["t"] = r.t ? py::cast(*r.t) : py::none();
  d["p"] = r.p ? py::cast(*r.p) : py::none();
  d["lags"] = r.lags;
  d["n"] = r.n;
  return d;
}

sim::SimConfig sim_config(const std::string& kind, double alpha, double sigma_delta, double rho,
                          double a, int n_bonds, int n_months, std::uint64_t seed) {
  sim::SimConfig c;
  c.kind = sim::parse_signal_kind(kind);
  c.alpha = alpha;
  c.sigma_delta = sigma_delta;
  c.a = a;
  c.n_bonds = n_bonds;
  c.n_months = n_months;
  c.seed = seed;
  c.sigma_s = sim::sigma_s_for_rho(c, rho);
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Corporate bond factor backtesting: cleaning filters, CEIV simulation and inference.";

  // Later registrations are matched first, so the base class goes first.
  py::register_exception<Error>(m, "BondlabError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("kappa", &sim::kappa, py::arg("alpha"));

  m.def(
      "theoretical_bias",
      [](const std::string& kind, double alpha, double sigma_delta, double rho, double a) {
        return sim::theoretical_bias(sim_config(kind, alpha, sigma_delta, rho, a, 1000, 120, 1));
      },
      py::arg("kind") = "price_level", py::arg("alpha") = 0.10, py::arg("sigma_delta") = 0.005,
      py::arg("rho") = 1.0, py::arg("a") = -1.0);

  m.def(
      "run_experiment",
      [](const std::string& kind, double alpha, double sigma_delta, double rho, double a,
         int n_bonds, int n_months, int reps, std::uint64_t seed, unsigned jobs) {
        const auto c = sim_config(kind, alpha, sigma_delta, rho, a, n_bonds, n_months, seed);
        sim::SimResult r;
        {
          py::gil_scoped_release release;
          r = sim::run_experiment(c, reps, jobs);
        }
        py::dict out;
        out["theory"] = r.theory;
        out["kappa"] = r.kappa;
        out["realized_rho"] = r.realized_rho;
        out["noise_cov"] = r.noise_cov;
        out["reps"] = r.reps;
        out["config_hash"] = r.config_hash;
        py::dict approaches;
        for (const auto& ap : r.approaches) {
          py::dict d;
          d["measured"] = ap.measured;
          d["mc_se"] = ap.mc_se;
          d["theory"] = ap.theory;
          d["z"] = ap.z;
          approaches[py::str(ap.approach)] = d;
        }
        out["approaches"] = approaches;
        return out;
      },
      py::arg("kind") = "price_level", py::arg("alpha") = 0.10, py::arg("sigma_delta") = 0.005,
      py::arg("rho") = 1.0, py::arg("a") = -1.0, py::arg("n_bonds") = 1000,
      py::arg("n_months") = 120, py::arg("reps") = 20, py::arg("seed") = 1, py::arg("jobs") = 1);

  m.def(
      "footnote_economy",
      [](double delta) {
        const auto f = sim::footnote_economy(delta);
        return py::make_tuple(f.measured_ls, f.true_ls);
      },
      py::arg("delta") = 0.005);

  m.def(
      "nw_mean",
      [](const std::vector<double>& x, std::optional<int> lags) {
        return inference_dict(lags ? stats::nw_mean(x, *lags) : stats::nw_mean(x));
      },
      py::arg("x"), py::arg("lags") = py::none());
  m.def("nw_lags", &stats::nw_lags, py::arg("T"));

  m.def(
      "capmb_alpha",
      [](const std::vector<double>& factor, const std::vector<double>& market) {
        const auto r = stats::capmb_alpha(factor, market);
        py::dict d = inference_dict(r.alpha_inference());
        d["alpha"] = r.alpha;
        d["beta"] = r.beta;
        d["residuals"] = r.residuals;
        return d;
      },
      py::arg("factor"), py::arg("market"));

  m.def(
      "bh_fdr", [](const std::vector<double>& p, double q) { return stats::bh_fdr(p, q); },
      py::arg("p_values"), py::arg("q") = 0.05);
  m.def(
      "nse", [](const std::vector<double>& e) { return stats::nse(e); }, py::arg("estimates"));
  m.def(
      "nse_ratio",
      [](const std::vector<double>& e, const std::vector<double>& se) {
        return stats::nse_ratio(e, se);
      },
      py::arg("estimates"), py::arg("ses"));
  m.def(
      "quantile", [](std::vector<double> v, double p) { return stats::quantile(std::move(v), p); },
      py::arg("values"), py::arg("p"));

  m.def(
      "decimal_shift_correct",
      [](const std::vector<double>& prices) {
        TransactionPanel series;
        for (std::size_t i = 0; i < prices.size(); ++i) {
          TransactionRecord r;
          r.bond_id = "py";
          r.price = prices[i];
          r.seq = static_cast<std::int64_t>(i);
          series.push_back(r);
        }
        const auto res = txn::decimal_shift_correct(series);
        std::vector<double> out;
        for (const auto& r : res.series) out.push_back(r.price);
        py::list log;
        for (const auto& e : res.log) {
          py::dict d;
          d["index"] = e.index;
          d["action"] = txn::to_string(e.action);
          d["orig_price"] = e.orig_price;
          d["new_price"] = e.new_price ? py::cast(*e.new_price) : py::none();
          d["factor"] = e.factor ? py::cast(*e.factor) : py::none();
          d["raw_error"] = e.raw_error;
          log.append(d);
        }
        return py::make_tuple(out, log);
      },
      py::arg("prices"));

  m.def(
      "bounce_back_flag",
      [](const std::vector<double>& prices) {
        return txn::bounce_back_flag(std::span<const double>(prices)).flags;
      },
      py::arg("prices"));

  m.def("data_grid_size", [] { return grid::enumerate_data_grid().size(); });
  m.def(
      "method_grid_size",
      [](bool include_inadmissible) {
        return grid::enumerate_method_grid(include_inadmissible).size();
      },
      py::arg("include_inadmissible") = false);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "bondlab");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}

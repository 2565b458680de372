#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bondlab/cli.hpp"
#include "bondlab/csv.hpp"

namespace fs = std::filesystem;

#ifndef BONDLAB_TEST_DATA
#define BONDLAB_TEST_DATA "tests/data"
#endif

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bondlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Run r;
  r.code = bondlab::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bondlab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("grid counts") {
    auto r = run({"grid-method", "--count-only"});
    CHECK(r.code == 0);
    CHECK(r.out == "168\n");
    r = run({"grid-method", "--count-only", "--include-inadmissible"});
    CHECK(r.out == "216\n");
    r = run({"grid-data", "--count-only"});
    CHECK(r.out == "648\n");
  }

  TEST_CASE("simulate reports the closed-form theory") {
    const auto dir = scratch("sim");
    const auto r = run({"simulate", "--alpha", "0.10", "--sigma-delta", "0.005", "--rho", "1.0",
                        "--bonds", "100", "--months", "12", "--reps", "2", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto t = bondlab::csv::Table::read(dir / "sim_report.csv");
    REQUIRE(t.rows() == 3);
    const double theory = std::stod(t.row(0)[t.require("theory")]);
    CHECK(theory == doctest::Approx(0.0175498).epsilon(1e-6));
    CHECK(fs::exists(dir / "manifest.json"));
  }

  TEST_CASE("clean-txn on the 985.0 fixture") {
    const auto dir = scratch("txn");
    const auto r = run({"clean-txn", "--input", std::string(BONDLAB_TEST_DATA) + "/txn_decimal.csv",
                        "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto t = bondlab::csv::Table::read(dir / "corrections.csv");
    REQUIRE(t.rows() == 1);
    CHECK(t.row(0)[t.require("factor")] == "0.1");
    CHECK(t.row(0)[t.require("new_price")] == "98.5");
    std::ifstream in(dir / "manifest.json");
    const auto m = nlohmann::json::parse(in);
    CHECK(m.at("status") == "ok");
    CHECK(m.at("command") == "clean-txn");
  }

  TEST_CASE("manifests are byte-identical across runs") {
    const auto a = scratch("rep_a");
    const auto b = scratch("rep_b");
    const std::string in = std::string(BONDLAB_TEST_DATA) + "/txn_decimal.csv";
    REQUIRE(run({"clean-txn", "--input", in, "--out", a.string()}).code == 0);
    REQUIRE(run({"clean-txn", "--input", in, "--out", b.string()}).code == 0);
    std::ifstream fa(a / "transactions_clean.csv"), fb(b / "transactions_clean.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
  }

  TEST_CASE("unknown configuration key exits with the key") {
    const auto dir = scratch("cfg");
    std::ofstream(dir / "bad.json") << R"({"filter": {"qq": 0.01}})";
    const auto r = run({"factor", "--config", (dir / "bad.json").string(), "--input", "x.csv"});
    CHECK(r.code == 1);
    CHECK(r.err.find("filter.qq") != std::string::npos);
  }

  TEST_CASE("missing input names the key") {
    const auto dir = scratch("missing");
    const auto r = run({"clean-txn", "--input", (dir / "nope.csv").string(), "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("input") != std::string::npos);
  }

  TEST_CASE("invalid rows are a pipeline failure with a partial manifest") {
    const auto dir = scratch("invalid");
    std::ofstream(dir / "bad.csv") << "bond_id,timestamp,price,volume,seq\nB1,2024-01-02,0,1,1\n";
    const auto r = run({"clean-txn", "--input", (dir / "bad.csv").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("row 1") != std::string::npos);
    std::ifstream in(dir / "manifest.json");
    REQUIRE(in.good());
    CHECK(nlohmann::json::parse(in).at("status") == "partial");
  }
}

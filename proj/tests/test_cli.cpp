#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "bellmom/cli.hpp"
#include "bellmom/serialize.hpp"

using namespace bellmom;
using io::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "bellmom_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("verify") {
  auto r = run({"verify", "in33"});
  CHECK(r.code == 0);
  CHECK(r.out.find("VIOLATED (expected VIOLATED)") != std::string::npos);

  r = run({"verify", "in33", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(std::abs(j["report"]["lhs"].get<double>() - 1.125) <= 1e-12);
  CHECK(std::abs(j["report"]["rhs"].get<double>() - 1.25) <= 1e-12);
  CHECK(j["config"]["null_rate"] == 1.0);
  CHECK(j["config"]["scenario"] == "bell");

  CHECK(run({"verify", "cfrd"}).code == 0);
  CHECK(run({"verify", "ine22"}).code == 0);
  CHECK(run({"verify", "in33r"}).code == 0);

  r = run({"verify", "in33", "--null-rate", "0.01"});
  CHECK(r.code == 0);
  CHECK(r.out.find("SATISFIED (expected SATISFIED)") != std::string::npos);
  r = run({"verify", "in33r", "--null-rate", "0.01"});
  CHECK(r.code == 0);
  CHECK(r.out.find("VIOLATED (expected VIOLATED)") != std::string::npos);
  CHECK(run({"verify", "in33", "--null-rate", "0.9"}).code == 0);
  CHECK(run({"verify", "ine22", "--phi", "0.9"}).code == 0);  // outside (0, pi/4): satisfied
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  const auto r = run({"verify", "chsh"});
  CHECK(r.code == 2);
  CHECK(r.err.find("UnknownInequality") != std::string::npos);
  CHECK(run({"verify", "in33", "--null-rate", "0"}).code == 2);
  CHECK(run({"verify", "in33", "--null-rate", "abc"}).code == 2);
  CHECK(run({"sweep", "--steps", "1"}).code == 2);
  CHECK(run({"lhv-check", "--N", "1"}).code == 2);
  CHECK(run({"simulate", "--g", "-1"}).code == 2);
  CHECK(run({"simulate", "--scenario", "nowhere.json"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("numerical failures exit 3") {
  const auto path = scratch("unnormalized.json");
  io::write_file(path.string(), R"({"state": {"dim_a": 2, "dim_b": 2, "amplitudes": [1, 0, 0, 1]},
    "obs_a": [[[1, 0], [0, 0]]], "obs_b": [[[1, 0], [0, 0]]]})");
  const auto r = run({"simulate", "--scenario", path.string(), "--samples", "10"});
  CHECK(r.code == 3);
  CHECK(r.err.find("NotNormalized") != std::string::npos);
}

TEST_CASE("sweep") {
  auto r = run({"sweep", "--steps", "2"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "phi,lhs,rhs,margin");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double margin = io::parse_double(line.substr(line.rfind(',') + 1));
    CHECK(std::abs(margin) <= 1e-10);
  }
  CHECK(rows == 2);

  r = run({"sweep", "--steps", "101"});
  std::istringstream in2(r.out);
  std::getline(in2, line);
  int negative = 0;
  for (int i = 0; std::getline(in2, line); ++i) {
    const double margin = io::parse_double(line.substr(line.rfind(',') + 1));
    if (i > 0 && i < 100) {
      CHECK(margin < 0.0);
      ++negative;
    }
  }
  CHECK(negative == 99);

  const auto j = Json::parse(run({"sweep", "--steps", "3", "--format", "json"}).out);
  CHECK(j["points"].size() == 3);
  CHECK(j["config"]["steps"] == 3);
}

TEST_CASE("simulate: determinism and the noiseless limit") {
  const std::vector<std::string> args{"simulate", "--samples", "5000", "--seed", "3"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = Json::parse(a.out);
  CHECK(j["config"]["weak"]["samples"] == 5000);
  CHECK(j["config"]["weak"]["scheme"] == "twin");
  CHECK(j["estimate"]["pairs"].size() == 9);

  auto t1 = args, t3 = args;
  t1.insert(t1.begin(), {"--threads", "1"});
  t3.insert(t3.begin(), {"--threads", "3"});
  auto j1 = Json::parse(run(t1).out), j3 = Json::parse(run(t3).out);
  j1["config"].erase("threads");
  j3["config"].erase("threads");
  j1["config"].erase("resolved_threads");
  j3["config"].erase("resolved_threads");
  CHECK(j1 == j3);

  const auto strong = Json::parse(run({"simulate", "--g", "1e8", "--samples", "20000"}).out);
  for (const auto& v : strong["verdicts"]) CHECK(v["verdict_matches_exact"] == true);
}

TEST_CASE("simulate writes records") {
  const auto path = scratch("records.csv");
  const auto r = run({"simulate", "--scenario", "tilted", "--scheme", "subtract", "--samples", "7",
                      "--records", path.string()});
  REQUIRE(r.code == 0);
  const auto text = io::read_file(path.string());
  CHECK(text.rfind("x,y,a,a_prime,b,b_prime\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 * 7);
  CHECK(text.find(",,") != std::string::npos);
}

TEST_CASE("lhv-check") {
  auto r = run({"lhv-check", "--N", "2", "--trials", "100"});
  CHECK(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["max_discrepancy"].get<double>() <= 1e-9);
  CHECK(j["trials"].size() == 100);

  r = run({"lhv-check", "--N", "3", "--dim-b", "5", "--trials", "20"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["c_positive_trials"].get<int>() > 0);

  r = run({"lhv-check", "--N", "2", "--b", "identity", "--trials", "10"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["max_discrepancy"].get<double>() <= 1e-14);
}

TEST_CASE("poly") {
  const auto r = run({"poly", "--restarts", "20"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["minimum"]["value"].get<double>() >= -1e-8);
  CHECK(j["non_sos_certificate"]["verdict"] == "Infeasible");
  CHECK(j["non_sos_certificate"]["lower_bound"].get<double>() == doctest::Approx(3.375));
  CHECK(j["non_sos_certificate"]["upper_bound"].get<double>() == 3.0);
  const auto csv = run({"poly", "--restarts", "5", "--seed", "9", "--format", "csv"}).out;
  CHECK(csv.rfind("seed,restart,value,a1,a2,b1,b2\n9,0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("search") {
  auto r = run({"search", "cfrd", "--starts", "4", "--max-evals", "3000"});
  CHECK(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["result"]["best_margin"].get<double>() >= -1e-6);
  CHECK(j["config"]["space"] == "projectors");
  CHECK(j["config"]["simplex"]["mode"] == "adaptive");
  CHECK(j["starts"].size() == 4);

  r = run({"search", "in33", "--starts", "1", "--max-evals", "2000", "--include-known"});
  CHECK(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["result"]["best_margin"].get<double>() <= -0.125 + 1e-9);
  CHECK(j["result"]["best_start"] == 0);

  const auto dir = scratch("traces");
  std::filesystem::remove_all(dir);
  r = run({"search", "ine22", "--starts", "2", "--max-evals", "500", "--simplex", "standard",
           "--trace-dir", dir.string(), "--format", "csv"});
  CHECK(r.out.rfind("start,margin,evaluations,iterations,budget_exhausted\n", 0) == 0);
  const auto trace = io::read_file((dir / "trace_ine22_1.csv").string());
  CHECK(trace.rfind("iteration,margin\n0,", 0) == 0);
}

TEST_CASE("config file precedence and output directory") {
  const auto cfg = scratch("run.toml");
  io::write_file(cfg.string(), "threads = 1\n[sweep]\nsteps = 4\nformat = \"json\"\n");
  auto j = Json::parse(run({"--config", cfg.string(), "sweep"}).out);
  CHECK(j["points"].size() == 4);
  CHECK(j["config"]["threads"] == 1);
  CHECK(j["config"]["config_file"] == cfg.string());
  j = Json::parse(run({"--config", cfg.string(), "sweep", "--steps", "6"}).out);
  CHECK(j["points"].size() == 6);

  const auto dir = scratch("outdir");
  std::filesystem::create_directories(dir);
  ::setenv(cli::kOutputDirEnv, dir.string().c_str(), 1);
  const auto r = run({"sweep", "--steps", "2", "--out", "sweep.csv"});
  ::unsetenv(cli::kOutputDirEnv);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(io::read_file((dir / "sweep.csv").string()).rfind("phi,lhs,rhs,margin\n", 0) == 0);
}

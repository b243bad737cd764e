#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "martvar/common.hpp"
#include "martvar/runner.hpp"
#include "martvar/splitting_tree.hpp"

using namespace martvar;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("martvar_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bounds run writes csv and summary") {
  TempDir tmp("bounds");
  runner::RunConfig cfg;
  cfg.command = "bounds";
  cfg.params = {{"k", 9}, {"d", 4}};
  cfg.results_dir = tmp.path;
  runner::RunRecord rec = runner::run(cfg);
  CHECK(rec.all_hold);
  CHECK(fs::exists(tmp.path / "bounds.csv"));
  CHECK(fs::exists(tmp.path / "bounds_summary.json"));
  CHECK_FALSE(fs::exists(tmp.path / ".lock"));  // released

  const std::string csv = slurp(tmp.path / "bounds.csv");
  CHECK(csv.rfind("bound,value\n", 0) == 0);
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 6);  // header + five bounds

  nlohmann::json summary;
  std::ifstream(tmp.path / "bounds_summary.json") >> summary;
  CHECK(summary["k"] == 9);
  CHECK(summary["bounds"]["trivial_bound"] == 18.0);
}

TEST_CASE("bounds run accepts an explicit prior") {
  TempDir tmp("bounds_p");
  runner::RunConfig cfg;
  cfg.command = "bounds";
  cfg.params = {{"k", 9}, {"p", {0.5, 0.3, 0.2}}};
  cfg.results_dir = tmp.path;
  runner::RunRecord rec = runner::run(cfg);

  const Distribution p(LabelSet{"0", "1", "2"}, {0.5, 0.3, 0.2});
  CHECK(rec.summary["p"] == nlohmann::json({0.5, 0.3, 0.2}));
  CHECK(rec.summary["bounds"]["entropy_bound"].get<double>() ==
        doctest::Approx(bound_entropy(9, p)).epsilon(1e-15));
  CHECK(rec.summary["bounds"]["per_coordinate_bound"].get<double>() ==
        doctest::Approx(bound_per_coordinate(9, p)).epsilon(1e-15));
}

TEST_CASE("repeated runs are byte identical and append to the index") {
  TempDir a("det_a"), b("det_b");
  runner::RunConfig cfg;
  cfg.command = "maxvar";
  cfg.params = {{"k", 2}, {"h", 1e-2}};

  cfg.results_dir = a.path;
  runner::run(cfg);
  cfg.results_dir = b.path;
  runner::run(cfg);
  CHECK(slurp(a.path / "maxvar.csv") == slurp(b.path / "maxvar.csv"));

  cfg.results_dir = a.path;
  runner::run(cfg);  // second run in the same directory
  const std::string index = slurp(a.path / "runs.ndjson");
  int lines = 0;
  std::istringstream ss(index);
  for (std::string line; std::getline(ss, line);) {
    ++lines;
    const nlohmann::json rec = nlohmann::json::parse(line);
    CHECK(rec["version"] == "0.1.0");
    CHECK(rec["all_hold"] == true);
  }
  CHECK(lines == 2);
}

TEST_CASE("lock file blocks concurrent runs") {
  TempDir tmp("lock");
  fs::create_directories(tmp.path);
  std::ofstream(tmp.path / ".lock") << "12345\n";
  runner::RunConfig cfg;
  cfg.command = "bounds";
  cfg.params = {{"k", 1}, {"d", 2}};
  cfg.results_dir = tmp.path;
  CHECK_THROWS_AS(runner::run(cfg), ConfigError);
  fs::remove(tmp.path / ".lock");
  CHECK_NOTHROW(runner::run(cfg));
}

TEST_CASE("construct doubling reports exact variation") {
  TempDir tmp("construct");
  runner::RunConfig cfg;
  cfg.command = "construct";
  cfg.params = {{"kind", "doubling"}, {"ell", 3}, {"tree_budget", 100000}};
  cfg.results_dir = tmp.path;
  runner::RunRecord rec = runner::run(cfg);
  CHECK(rec.all_hold);
  CHECK(rec.summary["variation"] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rec.summary["tree_omitted"] == false);
  CHECK(fs::exists(tmp.path / "construct_tree.json"));
  CHECK(fs::exists(tmp.path / "construct_certificates.csv"));

  // tiny budget: the tree is omitted but the run still succeeds
  TempDir tmp2("construct2");
  cfg.params["tree_budget"] = 3;
  cfg.results_dir = tmp2.path;
  rec = runner::run(cfg);
  CHECK(rec.summary["tree_omitted"] == true);
  CHECK_FALSE(fs::exists(tmp2.path / "construct_tree.json"));
}

TEST_CASE("game value degrades to the recursion over budget") {
  TempDir tmp("degrade");
  runner::RunConfig cfg;
  cfg.command = "game";
  cfg.params = {{"action", "value"}, {"k", 2}, {"method", "exact"}};
  cfg.budget = 10;  // 2 * 16 = 32 exceeds it
  cfg.results_dir = tmp.path;
  runner::RunRecord rec = runner::run(cfg);
  CHECK(rec.summary["approximate"] == true);
  CHECK(rec.summary.contains("budget_note"));
  const double v = rec.summary["value"].get<double>();
  CHECK(v > 0.0);
  CHECK(v < 1.0);
}

TEST_CASE("config errors surface for bad requests") {
  TempDir tmp("bad");
  runner::RunConfig cfg;
  cfg.results_dir = tmp.path;

  cfg.command = "nope";
  CHECK_THROWS_AS(runner::run(cfg), ConfigError);

  cfg.command = "bounds";
  cfg.params = {{"k", 3}};  // neither d nor p
  CHECK_THROWS_AS(runner::run(cfg), ConfigError);

  cfg.command = "construct";
  cfg.params = {{"kind", "mystery"}};
  CHECK_THROWS_AS(runner::run(cfg), ConfigError);

  cfg.command = "verify-all";
  cfg.params = nlohmann::json::object();
  cfg.has_seed = false;
  CHECK_THROWS_AS(runner::run(cfg), ConfigError);  // seed required
}

TEST_CASE("results dir resolution order") {
  runner::RunConfig cfg;
  cfg.results_dir = "explicit";
  CHECK(runner::resolve_results_dir(cfg) == fs::path("explicit"));

  cfg.results_dir.clear();
  ::setenv("MARTVAR_RESULTS_DIR", "/tmp/martvar_env_dir", 1);
  CHECK(runner::resolve_results_dir(cfg) == fs::path("/tmp/martvar_env_dir"));
  ::unsetenv("MARTVAR_RESULTS_DIR");
  CHECK(runner::resolve_results_dir(cfg) == fs::path("results"));
}

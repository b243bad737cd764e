// martvar command line tool.
//
// Exit codes: 0 = run completed and every certificate holds, 2 = run
// completed but at least one certificate failed, 1 = operational error
// (bad arguments, unsupported sizes, solver failure, I/O).

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "martvar/common.hpp"
#include "martvar/runner.hpp"

namespace {

using martvar::runner::RunConfig;
using martvar::runner::RunRecord;

int execute(RunConfig& cfg) {
  try {
    RunRecord rec = martvar::runner::run(cfg);
    std::cout << rec.summary.dump(2) << "\n";
    if (!rec.all_hold) {
      std::cerr << "certificate violations:\n";
      for (const auto& c : rec.certificates)
        if (!c.holds)
          std::cerr << "  " << c.name << ": lhs=" << martvar::format_double(c.lhs)
                    << " rhs=" << martvar::format_double(c.rhs)
                    << " slack=" << martvar::format_double(c.slack) << "\n";
      return 2;
    }
    return 0;
  } catch (const martvar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const martvar::SizeError& e) {
    std::cerr << "size error: " << e.what() << "\n";
  } catch (const martvar::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"martingale variation toolkit"};
  app.set_help_flag("--help", "print help");  // keep -h / --h free for grid steps
  app.require_subcommand(1);

  RunConfig cfg;
  std::string results_dir;
  std::uint64_t seed = 0;
  app.add_option("--results-dir", results_dir,
                 "output directory (default: $MARTVAR_RESULTS_DIR or ./results)");
  app.add_option("--budget", cfg.budget, "size budget for the exact game solver");
  auto* seed_opt = app.add_option("--seed", seed, "seed for stochastic subcommands");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "closed-form variation bounds for one prior");
  bounds->set_help_flag("--help", "print help");
  int bounds_k = 0, bounds_d = 0;
  std::vector<double> bounds_p;
  bounds->add_option("--k", bounds_k, "number of stages")->required();
  auto* opt_d = bounds->add_option("--d", bounds_d, "uniform prior on d labels");
  auto* opt_p = bounds->add_option("--p", bounds_p, "explicit prior probabilities");
  opt_d->excludes(opt_p);

  // construct
  auto* construct = app.add_subcommand("construct", "build a named martingale and certify it");
  construct->set_help_flag("--help", "print help");
  std::string kind;
  int c_ell = 0, c_k = 0, c_d = 0;
  double c_p0 = 0.5, c_delta = 0.1;
  long long c_tree_budget = 100000;
  construct->add_option("--kind", kind, "doubling | walk | witness")->required();
  construct->add_option("--ell", c_ell, "doubling: number of stages");
  construct->add_option("--k", c_k, "walk/witness: number of stages");
  construct->add_option("--p0", c_p0, "walk: starting probability");
  construct->add_option("--delta", c_delta, "walk: step size");
  construct->add_option("--d", c_d, "witness: support size");
  construct->add_option("--tree-budget", c_tree_budget, "max nodes serialized to JSON");

  // maxvar
  auto* maxvar = app.add_subcommand("maxvar", "maximal variation table on two atoms");
  maxvar->set_help_flag("--help", "print help");
  int m_k = 0;
  double m_h = 1e-2;
  maxvar->add_option("--k", m_k, "number of stages")->required();
  maxvar->add_option("--h", m_h, "grid step (1e-2, 1e-3 or 5e-4)");

  // game
  auto* game = app.add_subcommand("game", "repeated game with one-sided incomplete information");
  game->set_help_flag("--help", "print help");
  std::string action, method = "exact", game_file;
  int g_k = 1, g_times = 2;
  double g_h = 1e-2;
  game->add_option("action", action, "example | value | cavu | certify | tensor")->required();
  game->add_option("--k", g_k, "number of stages");
  game->add_option("--method", method, "value: exact | recursive");
  game->add_option("--h", g_h, "cavu: grid step");
  game->add_option("--times", g_times, "tensor: number of factors");
  game->add_option("--game-file", game_file, "JSON game description (default: built-in example)");

  // verify-all
  auto* verify = app.add_subcommand("verify-all", "run the full certificate suite");
  verify->set_help_flag("--help", "print help");
  verify->add_flag("--quick", cfg.quick, "smaller instance counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 1;
  }

  cfg.results_dir = results_dir;
  cfg.has_seed = seed_opt->count() > 0;
  cfg.seed = seed;

  if (bounds->parsed()) {
    cfg.command = "bounds";
    cfg.params["k"] = bounds_k;
    if (opt_d->count()) cfg.params["d"] = bounds_d;
    if (opt_p->count()) cfg.params["p"] = bounds_p;
  } else if (construct->parsed()) {
    cfg.command = "construct";
    cfg.params["kind"] = kind;
    if (construct->count("--ell")) cfg.params["ell"] = c_ell;
    if (construct->count("--k")) cfg.params["k"] = c_k;
    if (construct->count("--p0")) cfg.params["p0"] = c_p0;
    if (construct->count("--delta")) cfg.params["delta"] = c_delta;
    if (construct->count("--d")) cfg.params["d"] = c_d;
    cfg.params["tree_budget"] = c_tree_budget;
  } else if (maxvar->parsed()) {
    cfg.command = "maxvar";
    cfg.params["k"] = m_k;
    cfg.params["h"] = m_h;
  } else if (game->parsed()) {
    cfg.command = "game";
    cfg.params["action"] = action;
    cfg.params["k"] = g_k;
    cfg.params["method"] = method;
    cfg.params["h"] = g_h;
    cfg.params["times"] = g_times;
    if (!game_file.empty()) cfg.params["game_file"] = game_file;
  } else if (verify->parsed()) {
    cfg.command = "verify-all";
  }

  return execute(cfg);
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "martvar/certificate.hpp"

namespace martvar::runner {

/// One CLI invocation, normalized.  `params` holds the per-command knobs
/// (k, d, ell, grid steps, paths, ...); stochastic commands must carry a
/// seed.
struct RunConfig {
  std::string command;  // bounds | construct | maxvar | game | verify-all
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool quick = false;
  std::size_t budget = 1000000;       // value_exact size budget
  std::filesystem::path results_dir;  // empty: $MARTVAR_RESULTS_DIR or ./results
};

struct RunRecord {
  nlohmann::json config;
  std::string version;
  double duration_ms = 0.0;
  std::vector<std::string> outputs;
  std::vector<BoundCertificate> certificates;
  bool all_hold = true;
  nlohmann::json summary;

  nlohmann::json to_json() const;
};

/// Executes one run: takes the results-directory lock, dispatches the
/// command, writes every output atomically (tmp file + rename), appends the
/// record to runs.ndjson and returns it.  Configuration problems raise
/// ConfigError; failed certificates are reported in the record, not thrown.
/// Identical config + seed produce byte-identical CSV outputs.
RunRecord run(const RunConfig& cfg);

std::filesystem::path resolve_results_dir(const RunConfig& cfg);

}  // namespace martvar::runner

#pragma once

// Sweep runner: one chain per (d, increment spec, seed index), scheduled on a
// pool of worker threads, with results written in a fixed order.
//
// Output directory layout:
//   results.csv    one row per (d, spec, seed, diagnostic), sorted by that key
//   chains.jsonl   one summary object per chain, same order
//   manifest.json  config hash, code version, timestamp, counts

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rwmlab/config.hpp"

namespace rwmlab {

inline constexpr const char* kCsvHeader =
    "experiment_id,d,target_kind,nu,family,l,gamma,seed,n_steps,diagnostic_name,value";

struct CsvRow {
  std::string experiment_id;
  std::size_t d = 0;
  std::string target_kind;
  double nu = 0.0;
  std::string family;
  double l = 0.0;
  double gamma = 0.0;
  std::size_t seed = 0;  // seed index within the sweep
  std::int64_t n_steps = 0;
  std::string diagnostic;
  double value = 0.0;
};

/// "%.17g" for finite values, "nan"/"inf"/"-inf" otherwise.
std::string format_double(double v);
std::string to_csv_line(const CsvRow& row);
/// Parses results.csv; throws ConfigError on a header or field mismatch.
std::vector<CsvRow> read_results_csv(const std::filesystem::path& path);

struct SweepOutcome {
  std::filesystem::path dir;
  std::string config_hash;
  std::size_t n_chains = 0;
  std::size_t n_failed = 0;
  std::vector<CsvRow> rows;
};

/// Called inside each chain's failure boundary just before it runs; an
/// exception thrown here fails that chain only. Used for fault injection.
using ChainHook = std::function<void(std::size_t d, std::size_t spec_index, std::size_t seed_index)>;

/// Runs every chain of the sweep and writes the output files. Chain failures
/// become "chain_failed" rows; the others are unaffected.
SweepOutcome run_sweep(const ExperimentConfig& cfg,
                       const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                       std::optional<std::size_t> workers = std::nullopt, const ChainHook& before_chain = {});

/// Workers actually used: RWM_LAB_THREADS if set, else the override, else the config.
std::size_t resolve_workers(const ExperimentConfig& cfg, std::optional<std::size_t> override_workers);

/// Code version string written to manifests.
std::string code_version();

}  // namespace rwmlab

#pragma once

// Sweep configuration: a JSON document with a strict schema (see README).
// Validation collects every violation before reporting, so one run of
// `rwm-lab run` shows all mistakes in a config at once.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwmlab/increments.hpp"
#include "rwmlab/targets.hpp"

namespace rwmlab {

/// Names accepted in the "diagnostics" list.
const std::vector<std::string>& known_diagnostics();

/// n = ceil(c * d^beta).
struct PowerRule {
  double c = 1.0;
  double beta = 1.0;
  std::int64_t at(std::size_t d) const;
};

enum class IactFunctional { X1ClippedSquare, ZClipped };

struct DiagnosticParams {
  IactFunctional iact_functional = IactFunctional::X1ClippedSquare;
  double clip = 10.0;                    // cap of min(x_1^2, clip) / min(Z, clip)
  PowerRule degeneracy_m{1.0, 0.5};      // M(d) for the degeneracy statistic
  PowerRule z_alpha{1.0, 1.5};           // alpha_d for z_oscillation
  double z_t = 1.0;                      // T for z_oscillation
  double threshold_eps = 0.05;           // band for the threshold proxy
};

struct ExperimentConfig {
  std::string experiment_id;
  std::string target_kind;  // "gaussian" | "student_t"
  double nu = 0.0;
  std::vector<IncrementSpec> increments;
  std::vector<std::size_t> dims;
  PowerRule steps{1000.0, 1.0};
  std::size_t seed_count = 1;
  std::uint64_t master_seed = 0;
  std::size_t tracked_coords = 1;
  std::int64_t record_stride = 1;
  std::vector<std::string> diagnostics;
  DiagnosticParams params;
  std::string output = "out";
  std::size_t workers = 1;

  /// Normalized document (defaults filled in); its dump is what gets hashed.
  nlohmann::json canonical;

  TargetSpec target(std::size_t d) const;
  bool wants(const std::string& diagnostic) const;
};

/// Throws ConfigValidationError listing every problem.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace rwmlab

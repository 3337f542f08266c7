#pragma once

// Rate fits over a finished sweep: one fit of log(cost) on log(d) per
// (target, increment family, l, gamma) cell.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwmlab/diagnostics.hpp"
#include "rwmlab/sweep.hpp"

namespace rwmlab {

enum class CostProxy { Iact, ThresholdM };

/// "iact" or "threshold"; throws ConfigError otherwise.
CostProxy parse_cost_proxy(const std::string& name);
std::string cost_proxy_name(CostProxy proxy);
/// Name of the results.csv diagnostic carrying the proxy.
std::string cost_proxy_column(CostProxy proxy);

struct FitCell {
  std::string target_kind;
  double nu = 0.0;
  std::string family;
  double l = 0.0;
  double gamma = 0.0;
  std::vector<std::size_t> dims;
  std::vector<double> median_cost;
  std::vector<double> censored_fraction;  // NaN where the sweep has no censoring flag
  diag::RateFit fit;

  std::string label() const;
};

struct FitReport {
  CostProxy proxy = CostProxy::Iact;
  std::string experiment_id;
  std::vector<FitCell> cells;
};

/// Throws MissingDiagnosticError naming the cell (and d) when proxy rows are
/// absent, and ConfigError when the rows cannot be fitted.
FitReport fit_report(const std::vector<CsvRow>& rows, CostProxy proxy);
FitReport fit_report(const std::filesystem::path& sweep_dir, CostProxy proxy);

std::string render_table(const FitReport& report);
std::string render_csv(const FitReport& report);
nlohmann::json to_json(const FitReport& report);

/// Writes fit_<proxy>.json and fit_<proxy>.csv (proxy = iact|threshold) into `dir`.
void write_fit_report(const FitReport& report, const std::filesystem::path& dir);

}  // namespace rwmlab

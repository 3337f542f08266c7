// rwm-lab: run sweeps, check the analytic battery, fit cost exponents.
//
// Exit codes: 0 success, 1 invalid input, 2 runtime failure, 3 verification failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "rwmlab/config.hpp"
#include "rwmlab/error.hpp"
#include "rwmlab/fit_report.hpp"
#include "rwmlab/sweep.hpp"
#include "rwmlab/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kRuntime = 2;
constexpr int kVerifyFailed = 3;

int cmd_run(const std::string& config_path, std::optional<std::size_t> workers,
            const std::optional<std::string>& out) {
  const rwmlab::ExperimentConfig cfg = rwmlab::load_config(config_path);
  std::optional<std::filesystem::path> dir;
  if (out) dir = *out;
  const auto outcome = rwmlab::run_sweep(cfg, dir, workers);
  std::printf("%s: %zu chains, %zu failed, %zu rows -> %s (config %s)\n", cfg.experiment_id.c_str(),
              outcome.n_chains, outcome.n_failed, outcome.rows.size(), outcome.dir.string().c_str(),
              outcome.config_hash.c_str());
  return outcome.n_failed == 0 ? kOk : kRuntime;
}

int cmd_verify(const std::string& profile, const std::optional<std::string>& json_path) {
  const rwmlab::VerifyReport report = rwmlab::verify_analytics(profile);
  for (const auto& e : report.entries) {
    std::printf("%-4s %-13s %-48s %.3e %s %.3e\n", e.pass ? "PASS" : "FAIL", e.group.c_str(), e.name.c_str(),
                e.measured, e.strict ? "< " : "<=", e.bound);
  }
  std::printf("%zu/%zu passed (profile %s)\n", report.entries.size() - report.n_failed, report.entries.size(),
              report.profile.c_str());
  if (json_path) {
    std::ofstream out(*json_path, std::ios::trunc);
    out << rwmlab::to_json(report).dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write '" + *json_path + "'");
  }
  return report.pass ? kOk : kVerifyFailed;
}

int cmd_fit(const std::string& sweep_dir, const std::string& proxy) {
  const auto report = rwmlab::fit_report(std::filesystem::path(sweep_dir), rwmlab::parse_cost_proxy(proxy));
  rwmlab::write_fit_report(report, sweep_dir);
  std::fputs(rwmlab::render_table(report).c_str(), stdout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("rwm-lab"));

  CLI::App app{"Random-walk Metropolis scaling lab"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  auto* run = app.add_subcommand("run", "run every chain of a sweep config");
  std::string config_path;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
  run->add_option("--config", config_path, "sweep config (JSON)")->required();
  run->add_option("--workers", workers, "worker threads (RWM_LAB_THREADS wins)")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (defaults to the config's)");

  auto* verify = app.add_subcommand("verify", "run the analytic identity battery");
  std::string profile = "default";
  std::optional<std::string> json_path;
  verify->add_option("--profile", profile, "default|zero")->capture_default_str();
  verify->add_option("--json", json_path, "write the JSON report here");

  auto* fit = app.add_subcommand("fit", "fit cost exponents over a finished sweep");
  std::string sweep_dir, proxy;
  fit->add_option("--sweep", sweep_dir, "sweep output directory")->required();
  fit->add_option("--proxy", proxy, "cost proxy")->required()->check(CLI::IsMember({"iact", "threshold"}));

  auto* version = app.add_subcommand("version", "print the code version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(config_path, workers, out_dir);
    if (*verify) return cmd_verify(profile, json_path);
    if (*fit) return cmd_fit(sweep_dir, proxy);
    if (*version) {
      std::printf("rwm-lab %s\n", rwmlab::code_version().c_str());
      return kOk;
    }
  } catch (const rwmlab::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kInvalid;
  } catch (const rwmlab::MissingDiagnosticError& e) {
    spdlog::error("{}", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntime;
  }
  return kInvalid;
}

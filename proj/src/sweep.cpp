#include "rwmlab/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "rwmlab/diagnostics.hpp"
#include "rwmlab/error.hpp"
#include "rwmlab/kernel.hpp"
#include "rwmlab/rng.hpp"

#ifndef RWMLAB_VERSION
#define RWMLAB_VERSION "unknown"
#endif

namespace rwmlab {

using nlohmann::json;

std::string code_version() { return RWMLAB_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv_line(const CsvRow& r) {
  std::ostringstream os;
  os << r.experiment_id << ',' << r.d << ',' << r.target_kind << ',' << format_double(r.nu) << ','
     << r.family << ',' << format_double(r.l) << ',' << format_double(r.gamma) << ',' << r.seed << ','
     << r.n_steps << ',' << r.diagnostic << ',' << format_double(r.value);
  return os.str();
}

std::vector<CsvRow> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ConfigError("'" + path.string() + "' does not start with the results header");
  }
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 11 fields");
    }
    try {
      CsvRow r;
      r.experiment_id = f[0];
      r.d = std::stoull(f[1]);
      r.target_kind = f[2];
      r.nu = std::stod(f[3]);
      r.family = f[4];
      r.l = std::stod(f[5]);
      r.gamma = std::stod(f[6]);
      r.seed = std::stoull(f[7]);
      r.n_steps = std::stoll(f[8]);
      r.diagnostic = f[9];
      r.value = std::stod(f[10]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed field");
    }
  }
  return rows;
}

std::size_t resolve_workers(const ExperimentConfig& cfg, std::optional<std::size_t> override_workers) {
  if (const char* env = std::getenv("RWM_LAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    spdlog::warn("ignoring RWM_LAB_THREADS='{}' (not a positive integer)", env);
  }
  if (override_workers && *override_workers >= 1) return *override_workers;
  return std::max<std::size_t>(cfg.workers, 1);
}

namespace {

struct Task {
  std::size_t d_index, spec_index, seed_index;
};

struct ChainOutput {
  std::vector<CsvRow> rows;
  json summary;
  bool failed = false;
};

json summary_json(const Trajectory& traj) {
  const auto& s = traj.summary;
  return json{{"status", "ok"},
              {"accepted", s.accepted},
              {"acceptance_rate", s.acceptance_rate()},
              {"zero_proposals", s.zero_proposals},
              {"mean_jump_sq", s.n_steps > 0 ? s.sum_jump_sq / static_cast<double>(s.n_steps) : 0.0},
              {"z_min", s.z_min},
              {"z_max", s.z_max},
              {"tracked_ids", traj.tracked_ids},
              {"tracked_min", s.tracked_min},
              {"tracked_max", s.tracked_max}};
}

ChainOutput run_one(const ExperimentConfig& cfg, const Task& task, double reference, const ChainHook& hook) {
  const std::size_t d = cfg.dims[task.d_index];
  const IncrementSpec& spec = cfg.increments[task.spec_index];
  const TargetSpec target = cfg.target(d);
  const std::uint64_t spec_id = fnv1a64(target.describe() + "|" + spec.describe());
  const std::uint64_t stream = derive_stream_seed(cfg.master_seed, d, spec_id, task.seed_index);
  const std::int64_t n_steps = cfg.steps.at(d);

  CsvRow base;
  base.experiment_id = cfg.experiment_id;
  base.d = d;
  base.target_kind = cfg.target_kind;
  base.nu = cfg.nu;
  base.family = family_name(spec.family);
  base.l = spec.l;
  base.gamma = spec.gamma;
  base.seed = task.seed_index;
  base.n_steps = n_steps;

  ChainOutput out;
  out.summary = json{{"d", d},
                     {"spec_index", task.spec_index},
                     {"target", target.describe()},
                     {"increment", spec.describe()},
                     {"seed", task.seed_index},
                     {"stream_seed", stream},
                     {"n_steps", n_steps}};
  auto emit = [&](const std::string& name, double value) {
    CsvRow r = base;
    r.diagnostic = name;
    r.value = value;
    out.rows.push_back(std::move(r));
  };

  try {
    if (hook) hook(d, task.spec_index, task.seed_index);
    RunOptions opts;
    opts.n_steps = n_steps;
    opts.record_stride = cfg.record_stride;
    opts.tracked_coords.clear();
    for (std::size_t k = 0; k < cfg.tracked_coords; ++k) opts.tracked_coords.push_back(k);
    opts.seed = stream;
    opts.keep_step_records = false;
    const std::int64_t m_deg = cfg.params.degeneracy_m.at(d);
    if (cfg.wants("degeneracy")) opts.degeneracy_horizon = m_deg;

    const Trajectory traj = run_chain(target, spec, opts);
    const double clip = cfg.params.clip;
    const BoundedFunction x1_sq = BoundedFunction::clipped_square(clip);
    const std::size_t first[] = {0};

    for (const auto& name : cfg.diagnostics) {
      if (name == "acceptance_rate") {
        emit(name, traj.summary.acceptance_rate());
      } else if (name == "esjd") {
        emit(name, diag::esjd(traj));
      } else if (name == "iact") {
        std::vector<double> series;
        if (cfg.params.iact_functional == IactFunctional::ZClipped) {
          series.reserve(traj.z.size());
          for (double z : traj.z) series.push_back(std::min(z, clip));
        } else {
          series = diag::functional_series(traj, x1_sq, first);
        }
        const diag::IactResult r = diag::iact(series);
        const double tau_steps = r.tau * static_cast<double>(cfg.record_stride);
        // A chain that never decorrelates within its run is censored at its
        // length: the true cost is at least n_steps.
        const bool censored = r.status != diag::IactStatus::Ok || !std::isfinite(tau_steps) ||
                              tau_steps > static_cast<double>(n_steps);
        emit("iact", censored ? static_cast<double>(n_steps) : tau_steps);
        emit("iact_raw", r.status == diag::IactStatus::Degenerate
                             ? std::numeric_limits<double>::quiet_NaN()
                             : tau_steps);
        emit("iact_censored", censored ? 1.0 : 0.0);
      } else if (name == "threshold") {
        const diag::Threshold t =
            diag::threshold_crossing(traj, x1_sq, first, reference, cfg.params.threshold_eps);
        emit("threshold_m", static_cast<double>(std::max<std::int64_t>(t.m, 1)));
        emit("threshold_censored", t.censored ? 1.0 : 0.0);
      } else if (name == "degeneracy") {
        emit(name, diag::degeneracy_statistic(traj, m_deg));
      } else if (name == "coordinate_range") {
        emit(name, diag::coordinate_range(traj, 0, m_deg));
      } else if (name == "z_oscillation") {
        emit(name, diag::z_oscillation(traj, cfg.params.z_t, cfg.params.z_alpha.at(d)));
      } else if (name == "ergodic_error") {
        const diag::ErgodicError e = diag::ergodic_error(traj, x1_sq, first, reference);
        emit("ergodic_error", e.error);
        emit("ergodic_se", e.batch_se);
      }
    }
    out.summary.update(summary_json(traj));
  } catch (const std::exception& e) {
    out.rows.clear();
    out.failed = true;
    emit("chain_failed", 1.0);
    out.summary["status"] = "failed";
    out.summary["error"] = e.what();
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

SweepOutcome run_sweep(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                       std::optional<std::size_t> workers, const ChainHook& before_chain) {
  SweepOutcome outcome;
  outcome.dir = out_dir ? *out_dir : std::filesystem::path(cfg.output);
  outcome.config_hash = config_hash(cfg);
  std::filesystem::create_directories(outcome.dir);

  // Task order is the output order: sorted by (d, spec, seed).
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cfg.dims.size(); ++i) {
    for (std::size_t j = 0; j < cfg.increments.size(); ++j) {
      for (std::size_t k = 0; k < cfg.seed_count; ++k) tasks.push_back({i, j, k});
    }
  }
  outcome.n_chains = tasks.size();

  double reference = std::numeric_limits<double>::quiet_NaN();
  if (cfg.wants("threshold") || cfg.wants("ergodic_error")) {
    // The one-coordinate marginal does not depend on d.
    reference = marginal_expectation(cfg.target(cfg.dims.front()),
                                     BoundedFunction::clipped_square(cfg.params.clip), 1);
  }

  const std::size_t n_workers = std::min(resolve_workers(cfg, workers), std::max<std::size_t>(tasks.size(), 1));
  spdlog::info("sweep '{}': {} chains on {} worker(s), output {}", cfg.experiment_id, tasks.size(),
               n_workers, outcome.dir.string());

  std::vector<ChainOutput> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const auto start = std::chrono::steady_clock::now();
      results[i] = run_one(cfg, tasks[i], reference, before_chain);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const Task& t = tasks[i];
      if (results[i].failed) {
        spdlog::error("chain d={} spec={} seed={} failed: {}", cfg.dims[t.d_index], t.spec_index,
                      t.seed_index, results[i].summary.value("error", ""));
      } else {
        spdlog::debug("chain d={} spec={} seed={} done in {:.2f}s", cfg.dims[t.d_index], t.spec_index,
                      t.seed_index, secs);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::string csv = std::string(kCsvHeader) + "\n";
  std::string jsonl;
  for (auto& r : results) {
    if (r.failed) ++outcome.n_failed;
    for (auto& row : r.rows) {
      csv += to_csv_line(row) + "\n";
      outcome.rows.push_back(std::move(row));
    }
    jsonl += r.summary.dump() + "\n";
  }
  write_file(outcome.dir / "results.csv", csv);
  write_file(outcome.dir / "chains.jsonl", jsonl);

  json manifest{{"experiment_id", cfg.experiment_id},
                {"config_hash", outcome.config_hash},
                {"config", cfg.canonical},
                {"code_version", code_version()},
                {"timestamp", utc_timestamp()},
                {"n_chains", outcome.n_chains},
                {"n_failed", outcome.n_failed},
                {"files", {"results.csv", "chains.jsonl"}}};
  write_file(outcome.dir / "manifest.json", manifest.dump(2) + "\n");
  spdlog::info("sweep '{}': {} chains, {} failed", cfg.experiment_id, outcome.n_chains, outcome.n_failed);
  return outcome;
}

}  // namespace rwmlab

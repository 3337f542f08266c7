// Acceptance gate: one PASS/FAIL line per criterion. `--only NAME` runs a
// single criterion so ctest can schedule and time them separately.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include "rwmlab/analytic.hpp"
#include "rwmlab/config.hpp"
#include "rwmlab/fit_report.hpp"
#include "rwmlab/kernel.hpp"
#include "rwmlab/quadrature.hpp"
#include "rwmlab/stats.hpp"
#include "rwmlab/sweep.hpp"

using namespace rwmlab;
namespace an = rwmlab::analytic;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

const fs::path kWork = RWMLAB_ACCEPT_WORK_DIR;
const fs::path kConfigs = RWMLAB_CONFIG_DIR;

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepOutcome sweep(const json& doc, const std::string& tag, std::size_t workers = 1) {
  const fs::path dir = kWork / tag;
  fs::remove_all(dir);
  return run_sweep(parse_config(doc), dir, workers);
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

// Median of one diagnostic per d, in increasing d.
std::vector<std::pair<std::size_t, double>> medians(const std::vector<CsvRow>& rows,
                                                    const std::string& diagnostic) {
  std::map<std::size_t, std::vector<double>> by_d;
  for (const auto& r : rows) {
    if (r.diagnostic == diagnostic) by_d[r.d].push_back(r.value);
  }
  std::vector<std::pair<std::size_t, double>> out;
  for (auto& [d, v] : by_d) out.emplace_back(d, stats::median(v));
  return out;
}

bool strictly_decreasing(const std::vector<std::pair<std::size_t, double>>& m) {
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (!(m[i].second < m[i - 1].second)) return false;
  }
  return m.size() >= 2;
}

std::string show(const std::vector<std::pair<std::size_t, double>>& m) {
  std::string s;
  for (const auto& [d, v] : m) s += (s.empty() ? "" : ", ") + ("d=" + std::to_string(d) + ":" + num(v));
  return s;
}

// ---------------------------------------------------------------------------

Outcome analytic_suite() {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  for (double sigma : {0.1, 1.0, 2.0, 10.0}) {
    for (const auto& g : an::girsanov_battery()) {
      const double r = an::girsanov_residual(sigma, g.f);
      check(std::abs(r) < 1e-8, "girsanov " + g.name + " sigma=" + num(sigma) + " " + num(r));
    }
  }
  for (double sigma : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    for (int k : {0, 1}) {
      const double e = std::abs(an::mu_k(sigma, k) - an::mu_k_quadrature(sigma, k));
      check(e < 1e-9, "mu" + std::to_string(k) + " sigma=" + num(sigma) + " " + num(e));
    }
  }
  for (double sigma : {0.01, 1.0, 10.0}) {
    const double h = an::nsigma_h_expectation(sigma);
    check(std::abs(h) < 1e-8, "E h sigma=" + num(sigma) + " " + num(h));
  }
  Rng rng(20240917);
  for (int t = 0; t < 20; ++t) {
    const auto joint = an::random_symmetric_joint(3 + t % 6, rng, false);
    const auto r = an::exchangeable_pair_check(joint, [](double x) { return std::sin(2.0 * x) + 0.3 * x; });
    check(r.exchangeable && std::abs(r.residual1) < 1e-12 && std::abs(r.residual2) < 1e-12,
          "exchangeable table " + std::to_string(t) + " " + num(r.residual1) + "/" + num(r.residual2));
  }
  for (std::size_t d : {10, 50, 200, 1000}) {
    for (auto m : {an::Metric::TV, an::Metric::W1}) {
      const double v = an::sphere_marginal_distance(d, m);
      check(v <= an::diaconis_bound(d, m),
            std::string(m == an::Metric::TV ? "TV" : "W1") + " d=" + std::to_string(d) + " " + num(v));
    }
  }
  for (std::size_t d : {2, 10, 100}) {
    const auto ks = an::beta_law_check(d, 20000, rng);
    check(ks.pass, "beta KS d=" + std::to_string(d) + " D=" + num(ks.statistic));
  }
  for (std::size_t d : {10, 100}) {
    std::vector<double> u4(100000);
    for (double& v : u4) v = std::pow(an::sample_sphere_marginal(d, rng), 4);
    const double dd = static_cast<double>(d);
    const double se = std::sqrt(stats::variance(u4) / static_cast<double>(u4.size()));
    const double dev = std::abs(stats::mean(u4) - 3.0 * dd / (dd + 2.0));
    check(dev <= 4.0 * se, "4th moment d=" + std::to_string(d) + " " + num(dev / se) + " SE");
  }
  if (bad.empty()) return {true, "all identities within tolerance"};
  std::string msg = std::to_string(bad.size()) + " failed:";
  for (const auto& b : bad) msg += " [" + b + "]";
  return {false, msg};
}

Outcome alpha_equivalence() {
  Rng rng(11);
  double worst = 0.0;
  for (double nu : {3.0, 5.0}) {
    for (std::size_t d : {10, 100}) {
      worst = std::max(worst, an::alpha_reconstruction_check(TargetSpec::student_t(d, nu), 1000, rng).max_rel_error);
    }
  }
  return {worst < 1e-6, "max relative error " + num(worst) + " (< 1e-06)"};
}

Outcome hd_proxy() {
  const auto s = an::default_s_grid();
  const auto z = an::default_z_grid(2.0);
  bool ok = true;
  std::string detail;
  for (double nu : {3.0, 5.0}) {
    const double lo = an::hd_uniform_deviation(an::HeavyAcceptanceCtx::student_t(100, nu), s, z).scaled;
    const double hi = an::hd_uniform_deviation(an::HeavyAcceptanceCtx::student_t(1000, nu), s, z).scaled;
    ok = ok && hi < lo;
    detail += "nu=" + num(nu) + ": d=100 " + num(lo) + ", d=1000 " + num(hi) + "; ";
  }
  return {ok, detail + "need d=1000 < d=100"};
}

Outcome acceptance_rate_law() {
  const std::size_t d = 100;
  const double l = 2.38;
  // Given |W|^2 = sigma^2, S ~ N(sigma^2/2, sigma^2), so the stationary rate is
  // E mu_0(|W|) with |W|^2 ~ (l^2/d) chi^2_d.
  const boost::math::chi_squared chi(static_cast<double>(d));
  const double oracle =
      quad::integrate(
          [&](double q) {
            if (q <= 0.0) return 0.0;
            return boost::math::pdf(chi, q) * an::mu_k(l * std::sqrt(q / static_cast<double>(d)), 0);
          },
          0.0, std::numeric_limits<double>::infinity(), {static_cast<double>(d)})
          .value;
  RunOptions opt;
  opt.n_steps = 100000;
  opt.seed = derive_stream_seed(20240917, d, 0, 0);
  opt.keep_step_records = false;
  const auto traj = run_chain(TargetSpec::standard_gaussian(d), IncrementSpec::gaussian(l, 0.5), opt);
  const double rate = traj.summary.acceptance_rate();
  return {std::abs(rate - oracle) <= 0.01, "empirical " + num(rate) + ", oracle " + num(oracle) + " (+-0.01)"};
}

Outcome slope_from(const SweepOutcome& out, double lo, double hi) {
  const auto rep = fit_report(out.rows, CostProxy::Iact);
  const auto& c = rep.cells.at(0);
  std::string cens;
  for (std::size_t i = 0; i < c.dims.size(); ++i) cens += (i ? "," : "") + num(c.censored_fraction[i]);
  return {c.fit.slope >= lo && c.fit.slope <= hi,
          "slope " + num(c.fit.slope) + " +- " + num(c.fit.half_width) + " in [" + num(lo) + ", " + num(hi) +
              "]; censored " + cens};
}

Outcome light_slope() { return slope_from(sweep(load_json(kConfigs / "light_tail.json"), "light_tail"), 0.8, 1.2); }

Outcome heavy_slope() { return slope_from(sweep(load_json(kConfigs / "heavy_tail.json"), "heavy_tail"), 1.6, 2.4); }

Outcome no_free_lunch() {
  json doc = load_json(kConfigs / "heavy_tail.json");
  doc["experiment_id"] = "no_free_lunch";
  doc["dims"] = json::array({16, 32, 64, 128});
  doc["diagnostics"] = json::array({"acceptance_rate", "iact"});
  doc["diagnostic_params"] = {{"iact_functional", "z_clipped"}};
  json incs = json::array();
  for (double gamma : {0.0, 0.25, 0.5}) {
    incs.push_back({{"family", "student_t_iso"}, {"l", 2.38}, {"gamma", gamma}, {"df", 2}});
    incs.push_back({{"family", "stable_iso"}, {"l", 2.38}, {"gamma", gamma}, {"alpha", 1.5}});
    incs.push_back({{"family", "coordinate_gaussian"}, {"l", 2.38}, {"gamma", gamma}});
    incs.push_back({{"family", "spherical_shell"}, {"l", 2.38}, {"gamma", gamma}});
  }
  doc["increment"] = incs;
  const auto rep = fit_report(sweep(doc, "no_free_lunch").rows, CostProxy::Iact);
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_cell;
  for (const auto& c : rep.cells) {
    ok = ok && c.fit.slope >= 1.6;
    if (c.fit.slope < worst) {
      worst = c.fit.slope;
      worst_cell = c.label();
    }
  }
  return {ok, std::to_string(rep.cells.size()) + " cells, min slope " + num(worst) + " (" + worst_cell + "), need >= 1.6"};
}

Outcome degeneracy_decay() {
  json doc = {{"experiment_id", "degeneracy"},
              {"target", {{"kind", "gaussian"}}},
              {"increment", {{"family", "gaussian_iso"}, {"l", 2.38}, {"gamma", 0.5}}},
              {"dims", {64, 256, 1024, 4096}},
              {"steps_rule", {{"c", 1}, {"beta", 0.5}}},
              {"seeds", {{"count", 20}, {"master_seed", 20240917}}},
              {"diagnostics", {"degeneracy"}},
              {"diagnostic_params", {{"degeneracy_m", {{"c", 1}, {"beta", 0.5}}}}}};
  const auto sqrt_m = medians(sweep(doc, "degeneracy_sqrt").rows, "degeneracy");
  doc["steps_rule"] = {{"c", 4}, {"beta", 1}};
  doc["diagnostic_params"]["degeneracy_m"] = {{"c", 4}, {"beta", 1}};
  const auto lin_m = medians(sweep(doc, "degeneracy_4d").rows, "degeneracy");
  const bool decay = strictly_decreasing(sqrt_m);
  const bool flat = lin_m.back().second >= lin_m.front().second;
  return {decay && flat, "M=ceil(sqrt d): " + show(sqrt_m) + (decay ? " (decreasing)" : " (not strictly decreasing)") +
                             "; M=4d: " + show(lin_m) + (flat ? " (no decrease)" : " (decreases)")};
}

Outcome z_oscillation_decay() {
  json doc = {{"experiment_id", "z_oscillation"},
              {"target", {{"kind", "student_t"}, {"nu", 3}}},
              {"increment", {{"family", "gaussian_iso"}, {"l", 2.38}, {"gamma", 0.5}}},
              {"dims", {64, 256, 1024}},
              {"steps_rule", {{"c", 1}, {"beta", 1.5}}},
              {"seeds", {{"count", 20}, {"master_seed", 20240917}}},
              {"diagnostics", {"z_oscillation"}},
              {"diagnostic_params", {{"z_oscillation", {{"t", 1}, {"c", 1}, {"beta", 1.5}}}}}};
  const auto m = medians(sweep(doc, "z_oscillation").rows, "z_oscillation");
  return {strictly_decreasing(m), "median " + show(m) + ", need strictly decreasing"};
}

Outcome determinism() {
  const json doc = load_json(kConfigs / "smoke.json");
  const auto a = sweep(doc, "determinism_a", 1);
  const auto b = sweep(doc, "determinism_b", 1);
  const auto c = sweep(doc, "determinism_c", 2);
  const std::string ra = slurp(a.dir / "results.csv");
  const bool same = ra == slurp(b.dir / "results.csv") && ra == slurp(c.dir / "results.csv") &&
                    slurp(a.dir / "chains.jsonl") == slurp(c.dir / "chains.jsonl");
  return {same && !ra.empty(), std::to_string(a.rows.size()) + " rows, reruns " +
                                   (same ? "byte-identical" : "differ") + " (workers 1, 1, 2)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"analytic_suite", analytic_suite},     {"alpha_equivalence", alpha_equivalence},
      {"hd_proxy", hd_proxy},                 {"acceptance_rate_law", acceptance_rate_law},
      {"light_slope", light_slope},           {"heavy_slope", heavy_slope},
      {"no_free_lunch", no_free_lunch},       {"degeneracy_decay", degeneracy_decay},
      {"z_oscillation_decay", z_oscillation_decay}, {"determinism", determinism},
  };

  CLI::App app{"rwm-lab acceptance gate"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--only", only, "criteria to run (default: all)");
  app.add_flag("--list", list, "print criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : all) std::cout << c.name << "\n";
    return 0;
  }
  for (const auto& name : only) {
    if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.name == name; })) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
  }

  fs::create_directories(kWork);
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}

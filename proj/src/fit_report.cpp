#include "rwmlab/fit_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "rwmlab/error.hpp"
#include "rwmlab/stats.hpp"

namespace rwmlab {

using nlohmann::json;

CostProxy parse_cost_proxy(const std::string& name) {
  if (name == "iact") return CostProxy::Iact;
  if (name == "threshold") return CostProxy::ThresholdM;
  throw ConfigError("unknown cost proxy '" + name + "' (expected 'iact' or 'threshold')");
}

std::string cost_proxy_name(CostProxy proxy) { return proxy == CostProxy::Iact ? "iact" : "threshold"; }

std::string cost_proxy_column(CostProxy proxy) { return proxy == CostProxy::Iact ? "iact" : "threshold_m"; }

namespace {

std::string censor_column(CostProxy proxy) {
  return proxy == CostProxy::Iact ? "iact_censored" : "threshold_censored";
}

using CellKey = std::tuple<std::string, double, std::string, double, double>;

struct CellRows {
  // d -> seed -> value
  std::map<std::size_t, std::map<std::size_t, double>> cost, censored;
  std::map<std::size_t, std::set<std::size_t>> seeds_seen;
};

}  // namespace

std::string FitCell::label() const {
  std::ostringstream os;
  os << target_kind;
  if (target_kind == "student_t") os << "(nu=" << nu << ")";
  os << " " << family << " l=" << l << " gamma=" << gamma;
  return os.str();
}

FitReport fit_report(const std::vector<CsvRow>& rows, CostProxy proxy) {
  const std::string column = cost_proxy_column(proxy);
  const std::string censor = censor_column(proxy);

  std::map<CellKey, CellRows> cells;
  FitReport report;
  report.proxy = proxy;
  for (const auto& r : rows) {
    if (report.experiment_id.empty()) report.experiment_id = r.experiment_id;
    CellRows& c = cells[{r.target_kind, r.nu, r.family, r.l, r.gamma}];
    c.seeds_seen[r.d].insert(r.seed);
    if (r.diagnostic == column) c.cost[r.d][r.seed] = r.value;
    if (r.diagnostic == censor) c.censored[r.d][r.seed] = r.value;
  }
  if (cells.empty()) throw MissingDiagnosticError("sweep has no result rows");

  for (const auto& [key, c] : cells) {
    FitCell cell;
    std::tie(cell.target_kind, cell.nu, cell.family, cell.l, cell.gamma) = key;
    std::vector<diag::RatePoint> points;
    for (const auto& [d, seeds] : c.seeds_seen) {
      const auto it = c.cost.find(d);
      for (std::size_t s : seeds) {
        if (it == c.cost.end() || !it->second.contains(s)) {
          throw MissingDiagnosticError("cell " + cell.label() + ": no '" + column + "' row for d=" +
                                       std::to_string(d) + " seed=" + std::to_string(s));
        }
      }
      diag::RatePoint p;
      p.d = static_cast<double>(d);
      for (const auto& [s, v] : it->second) p.costs.push_back(v);
      cell.dims.push_back(d);
      cell.median_cost.push_back(stats::median(p.costs));
      const auto cz = c.censored.find(d);
      if (cz == c.censored.end()) {
        cell.censored_fraction.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        double n = 0.0;
        for (const auto& [s, v] : cz->second) n += v;
        cell.censored_fraction.push_back(n / static_cast<double>(cz->second.size()));
      }
      points.push_back(std::move(p));
    }
    try {
      cell.fit = diag::fit_rate(points);
    } catch (const std::exception& e) {
      throw ConfigError("cell " + cell.label() + ": " + e.what());
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

FitReport fit_report(const std::filesystem::path& sweep_dir, CostProxy proxy) {
  return fit_report(read_results_csv(sweep_dir / "results.csv"), proxy);
}

namespace {

std::string fixed(double v, int prec) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

double max_censored(const FitCell& c) {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (double f : c.censored_fraction) {
    if (std::isfinite(f)) m = std::isnan(m) ? f : std::max(m, f);
  }
  return m;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string render_table(const FitReport& report) {
  std::ostringstream os;
  os << "cost proxy: " << cost_proxy_column(report.proxy) << "\n";
  int width = 4;
  for (const auto& c : report.cells) width = std::max(width, static_cast<int>(c.label().size()));
  char line[512];
  std::snprintf(line, sizeof line, "%-*s %6s %6s %8s %8s %10s %9s\n", width, "cell", "n_d", "seeds", "slope",
                "+/-", "res_max", "censored");
  os << line;
  for (const auto& c : report.cells) {
    std::snprintf(line, sizeof line, "%-*s %6zu %6zu %8s %8s %10s %9s\n", width, c.label().c_str(),
                  c.dims.size(), c.fit.n_seeds, fixed(c.fit.slope, 3).c_str(), fixed(c.fit.half_width, 3).c_str(),
                  fixed(c.fit.residual_max, 4).c_str(), fixed(max_censored(c), 2).c_str());
    os << line;
  }
  return os.str();
}

std::string render_csv(const FitReport& report) {
  std::ostringstream os;
  os << "target_kind,nu,family,l,gamma,proxy,n_dims,n_seeds,slope,half_width,intercept,residual_max,"
        "max_censored_fraction\n";
  for (const auto& c : report.cells) {
    os << c.target_kind << ',' << format_double(c.nu) << ',' << c.family << ',' << format_double(c.l) << ','
       << format_double(c.gamma) << ',' << cost_proxy_column(report.proxy) << ',' << c.dims.size() << ','
       << c.fit.n_seeds << ',' << format_double(c.fit.slope) << ',' << format_double(c.fit.half_width) << ','
       << format_double(c.fit.intercept) << ',' << format_double(c.fit.residual_max) << ','
       << format_double(max_censored(c)) << '\n';
  }
  return os.str();
}

json to_json(const FitReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json points = json::array();
    for (std::size_t i = 0; i < c.dims.size(); ++i) {
      points.push_back({{"d", c.dims[i]},
                        {"median_cost", c.median_cost[i]},
                        {"log_d", c.fit.log_d[i]},
                        {"log_cost", c.fit.log_cost[i]},
                        {"censored_fraction", number_or_null(c.censored_fraction[i])}});
    }
    cells.push_back({{"target_kind", c.target_kind},
                     {"nu", c.nu},
                     {"family", c.family},
                     {"l", c.l},
                     {"gamma", c.gamma},
                     {"label", c.label()},
                     {"slope", c.fit.slope},
                     {"intercept", c.fit.intercept},
                     {"residual_max", c.fit.residual_max},
                     {"half_width", number_or_null(c.fit.half_width)},
                     {"n_seeds", c.fit.n_seeds},
                     {"points", points}});
  }
  return json{{"experiment_id", report.experiment_id},
              {"proxy", cost_proxy_column(report.proxy)},
              {"cells", cells}};
}

void write_fit_report(const FitReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
  };
  const std::string stem = "fit_" + cost_proxy_name(report.proxy);
  put(stem + ".json", to_json(report).dump(2) + "\n");
  put(stem + ".csv", render_csv(report));
}

}  // namespace rwmlab

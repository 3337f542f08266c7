#include "rwmlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rwmlab/error.hpp"
#include "rwmlab/rng.hpp"

namespace rwmlab {

using nlohmann::json;

const std::vector<std::string>& known_diagnostics() {
  static const std::vector<std::string> names{
      "acceptance_rate", "esjd",          "iact",          "threshold",
      "degeneracy",      "coordinate_range", "z_oscillation", "ergodic_error",
  };
  return names;
}

std::int64_t PowerRule::at(std::size_t d) const {
  const double v = c * std::pow(static_cast<double>(d), beta);
  // Guard against 1000.0000000001 turning into 1001.
  const double r = std::round(v);
  return static_cast<std::int64_t>(std::abs(v - r) < 1e-9 * std::max(1.0, v) ? r : std::ceil(v));
}

TargetSpec ExperimentConfig::target(std::size_t d) const {
  if (target_kind == "student_t") return TargetSpec::student_t(d, nu);
  return TargetSpec::standard_gaussian(d);
}

bool ExperimentConfig::wants(const std::string& diagnostic) const {
  return std::find(diagnostics.begin(), diagnostics.end(), diagnostic) != diagnostics.end();
}

namespace {

// Collects violations with their JSON path.
class Checker {
 public:
  void fail(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }
  const std::vector<std::string>& errors() const { return errors_; }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) fail(path + "." + key, "unknown key");
    }
  }

  const json* object(const json& parent, const std::string& path, const char* key, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path + "." + key, "is required");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(path + "." + key, "must be an object");
      return nullptr;
    }
    return &v;
  }

  std::optional<double> number(const json& parent, const std::string& path, const char* key,
                               bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path + "." + key, "is required");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_number()) {
      fail(path + "." + key, "must be a number");
      return std::nullopt;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      fail(path + "." + key, "must be finite");
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> integer(const json& parent, const std::string& path, const char* key,
                                       bool required, std::uint64_t min_value) {
    if (!parent.contains(key)) {
      if (required) fail(path + "." + key, "is required");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(path + "." + key, "must be a non-negative integer");
      return std::nullopt;
    }
    const auto x = v.get<std::uint64_t>();
    if (x < min_value) {
      fail(path + "." + key, "must be >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::string> string(const json& parent, const std::string& path, const char* key,
                                    bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path + "." + key, "is required");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_string() || v.get<std::string>().empty()) {
      fail(path + "." + key, "must be a non-empty string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

 private:
  std::vector<std::string> errors_;
};

std::optional<PowerRule> parse_rule(Checker& chk, const json& obj, const std::string& path,
                                    double default_c, double default_beta) {
  const std::size_t before = chk.errors().size();
  chk.only_keys(obj, path, {"c", "beta"});
  PowerRule rule{chk.number(obj, path, "c", false).value_or(default_c),
                 chk.number(obj, path, "beta", false).value_or(default_beta)};
  if (!(rule.c > 0.0)) chk.fail(path + ".c", "must be > 0");
  if (!(rule.beta >= 0.0)) chk.fail(path + ".beta", "must be >= 0");
  if (chk.errors().size() != before) return std::nullopt;
  return rule;
}

std::optional<IncrementSpec> parse_increment(Checker& chk, const json& obj, const std::string& path) {
  if (!obj.is_object()) {
    chk.fail(path, "must be an object");
    return std::nullopt;
  }
  const std::size_t before = chk.errors().size();
  const auto family_name = chk.string(obj, path, "family", true);
  IncrementSpec spec;
  if (family_name) {
    try {
      spec.family = family_from_name(*family_name);
    } catch (const ConfigError& e) {
      chk.fail(path + ".family", e.what());
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  switch (spec.family) {
    case IncrementFamily::StudentTIso:
      chk.only_keys(obj, path, {"family", "l", "gamma", "df"});
      break;
    case IncrementFamily::StableIso:
      chk.only_keys(obj, path, {"family", "l", "gamma", "alpha"});
      break;
    case IncrementFamily::CoordinateGaussian:
      chk.only_keys(obj, path, {"family", "l", "gamma", "p_move"});
      break;
    default:
      chk.only_keys(obj, path, {"family", "l", "gamma"});
      break;
  }
  spec.l = chk.number(obj, path, "l", false).value_or(spec.l);
  spec.gamma = chk.number(obj, path, "gamma", false).value_or(spec.gamma);
  if (spec.family == IncrementFamily::StudentTIso) spec.df = chk.number(obj, path, "df", true).value_or(0.0);
  if (spec.family == IncrementFamily::StableIso) spec.alpha = chk.number(obj, path, "alpha", true).value_or(spec.alpha);
  if (spec.family == IncrementFamily::CoordinateGaussian) {
    spec.p_move = chk.number(obj, path, "p_move", false).value_or(spec.p_move);
  }
  if (chk.errors().size() != before) return std::nullopt;
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    chk.fail(path, e.what());
    return std::nullopt;
  }
  return spec;
}

json increment_to_json(const IncrementSpec& s) {
  json j{{"family", family_name(s.family)}, {"l", s.l}, {"gamma", s.gamma}};
  if (s.family == IncrementFamily::StudentTIso) j["df"] = s.df;
  if (s.family == IncrementFamily::StableIso) j["alpha"] = s.alpha;
  if (s.family == IncrementFamily::CoordinateGaussian) j["p_move"] = s.p_move;
  return j;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  Checker chk;
  ExperimentConfig cfg;
  if (!doc.is_object()) throw ConfigValidationError({"$: config must be a JSON object"});

  chk.only_keys(doc, "$", {"experiment_id", "target", "increment", "dims", "steps_rule", "seeds",
                           "tracked_coords", "record_stride", "diagnostics", "diagnostic_params",
                           "output", "workers"});

  if (auto id = chk.string(doc, "$", "experiment_id", true)) {
    const bool clean = std::all_of(id->begin(), id->end(), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
    if (!clean) chk.fail("$.experiment_id", "may only contain letters, digits, '_', '-', '.'");
    cfg.experiment_id = *id;
  }

  if (const json* t = chk.object(doc, "$", "target", true)) {
    chk.only_keys(*t, "$.target", {"kind", "nu"});
    if (auto kind = chk.string(*t, "$.target", "kind", true)) {
      if (*kind == "gaussian") {
        if (t->contains("nu")) chk.fail("$.target.nu", "only allowed for kind 'student_t'");
      } else if (*kind == "student_t") {
        if (auto nu = chk.number(*t, "$.target", "nu", true)) {
          if (!(*nu > 0.0)) chk.fail("$.target.nu", "must be > 0");
          cfg.nu = *nu;
        }
      } else {
        chk.fail("$.target.kind", "must be 'gaussian' or 'student_t'");
      }
      cfg.target_kind = *kind;
    }
  }

  if (!doc.contains("increment")) {
    chk.fail("$.increment", "is required");
  } else if (const json& inc = doc.at("increment"); inc.is_array()) {
    if (inc.empty()) chk.fail("$.increment", "must not be empty");
    for (std::size_t i = 0; i < inc.size(); ++i) {
      if (auto s = parse_increment(chk, inc[i], "$.increment[" + std::to_string(i) + "]")) {
        cfg.increments.push_back(*s);
      }
    }
  } else if (auto s = parse_increment(chk, inc, "$.increment")) {
    cfg.increments.push_back(*s);
  }

  if (!doc.contains("dims")) {
    chk.fail("$.dims", "is required");
  } else if (const json& dims = doc.at("dims"); !dims.is_array()) {
    chk.fail("$.dims", "must be an array");
  } else if (dims.empty()) {
    chk.fail("$.dims", "must not be empty");
  } else {
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const json& v = dims[i];
      if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        chk.fail("$.dims[" + std::to_string(i) + "]", "must be a positive integer");
        continue;
      }
      cfg.dims.push_back(v.get<std::size_t>());
    }
    for (std::size_t i = 1; i < cfg.dims.size(); ++i) {
      if (cfg.dims[i] <= cfg.dims[i - 1]) {
        chk.fail("$.dims", "must be strictly increasing");
        break;
      }
    }
  }

  if (const json* r = chk.object(doc, "$", "steps_rule", true)) {
    if (!r->contains("c")) chk.fail("$.steps_rule.c", "is required");
    if (!r->contains("beta")) chk.fail("$.steps_rule.beta", "is required");
    if (auto rule = parse_rule(chk, *r, "$.steps_rule", 1.0, 1.0)) cfg.steps = *rule;
  }

  if (const json* s = chk.object(doc, "$", "seeds", true)) {
    chk.only_keys(*s, "$.seeds", {"count", "master_seed"});
    cfg.seed_count = chk.integer(*s, "$.seeds", "count", true, 1).value_or(1);
    cfg.master_seed = chk.integer(*s, "$.seeds", "master_seed", true, 0).value_or(0);
  }

  cfg.tracked_coords = chk.integer(doc, "$", "tracked_coords", false, 1).value_or(1);
  cfg.record_stride = static_cast<std::int64_t>(chk.integer(doc, "$", "record_stride", false, 1).value_or(1));
  cfg.workers = chk.integer(doc, "$", "workers", false, 1).value_or(1);
  cfg.output = chk.string(doc, "$", "output", false).value_or("out");

  if (!doc.contains("diagnostics")) {
    chk.fail("$.diagnostics", "is required");
  } else if (const json& diags = doc.at("diagnostics"); !diags.is_array() || diags.empty()) {
    chk.fail("$.diagnostics", "must be a non-empty array");
  } else {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < diags.size(); ++i) {
      const std::string path = "$.diagnostics[" + std::to_string(i) + "]";
      if (!diags[i].is_string()) {
        chk.fail(path, "must be a string");
        continue;
      }
      const auto name = diags[i].get<std::string>();
      const auto& known = known_diagnostics();
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        chk.fail(path, "unknown diagnostic '" + name + "'");
      } else if (!seen.insert(name).second) {
        chk.fail(path, "duplicate diagnostic '" + name + "'");
      } else {
        cfg.diagnostics.push_back(name);
      }
    }
  }

  if (const json* p = chk.object(doc, "$", "diagnostic_params", false)) {
    const std::string path = "$.diagnostic_params";
    chk.only_keys(*p, path, {"iact_functional", "clip", "degeneracy_m", "z_oscillation", "threshold_eps"});
    if (auto f = chk.string(*p, path, "iact_functional", false)) {
      if (*f == "x1_clipped_square") {
        cfg.params.iact_functional = IactFunctional::X1ClippedSquare;
      } else if (*f == "z_clipped") {
        cfg.params.iact_functional = IactFunctional::ZClipped;
      } else {
        chk.fail(path + ".iact_functional", "must be 'x1_clipped_square' or 'z_clipped'");
      }
    }
    cfg.params.clip = chk.number(*p, path, "clip", false).value_or(cfg.params.clip);
    if (!(cfg.params.clip > 0.0)) chk.fail(path + ".clip", "must be > 0");
    cfg.params.threshold_eps = chk.number(*p, path, "threshold_eps", false).value_or(cfg.params.threshold_eps);
    if (!(cfg.params.threshold_eps > 0.0)) chk.fail(path + ".threshold_eps", "must be > 0");
    if (const json* m = chk.object(*p, path, "degeneracy_m", false)) {
      if (auto rule = parse_rule(chk, *m, path + ".degeneracy_m", 1.0, 0.5)) cfg.params.degeneracy_m = *rule;
    }
    if (const json* z = chk.object(*p, path, "z_oscillation", false)) {
      const std::string zp = path + ".z_oscillation";
      chk.only_keys(*z, zp, {"t", "c", "beta"});
      cfg.params.z_t = chk.number(*z, zp, "t", false).value_or(cfg.params.z_t);
      if (!(cfg.params.z_t >= 0.0)) chk.fail(zp + ".t", "must be >= 0");
      json rule_part = *z;
      rule_part.erase("t");
      if (auto rule = parse_rule(chk, rule_part, zp, 1.0, 1.5)) cfg.params.z_alpha = *rule;
    }
  }

  // Cross-field checks, only meaningful once the pieces parsed.
  if (chk.errors().empty()) {
    for (std::size_t d : cfg.dims) {
      const std::int64_t n = cfg.steps.at(d);
      const std::string at = " at d=" + std::to_string(d);
      if (n < 1) chk.fail("$.steps_rule", "gives fewer than 1 step" + at);
      if (cfg.tracked_coords > d) chk.fail("$.tracked_coords", "exceeds the dimension" + at);
      if (cfg.wants("iact") && n / cfg.record_stride + 1 < 1000) {
        chk.fail("$.steps_rule", "iact needs at least 1000 recorded states" + at);
      }
      if (cfg.wants("degeneracy") || cfg.wants("coordinate_range")) {
        if (cfg.params.degeneracy_m.at(d) > n) {
          chk.fail("$.diagnostic_params.degeneracy_m", "exceeds the number of steps" + at);
        }
      }
      if (cfg.wants("z_oscillation")) {
        const auto h = static_cast<std::int64_t>(
            std::floor(cfg.params.z_t * static_cast<double>(cfg.params.z_alpha.at(d))));
        if (h > n) chk.fail("$.diagnostic_params.z_oscillation", "horizon exceeds the number of steps" + at);
      }
    }
  }

  if (!chk.errors().empty()) throw ConfigValidationError(chk.errors());

  json incs = json::array();
  for (const auto& s : cfg.increments) incs.push_back(increment_to_json(s));
  json target{{"kind", cfg.target_kind}};
  if (cfg.target_kind == "student_t") target["nu"] = cfg.nu;
  cfg.canonical = json{
      {"experiment_id", cfg.experiment_id},
      {"target", target},
      {"increment", incs},
      {"dims", cfg.dims},
      {"steps_rule", {{"c", cfg.steps.c}, {"beta", cfg.steps.beta}}},
      {"seeds", {{"count", cfg.seed_count}, {"master_seed", cfg.master_seed}}},
      {"tracked_coords", cfg.tracked_coords},
      {"record_stride", cfg.record_stride},
      {"diagnostics", cfg.diagnostics},
      {"diagnostic_params",
       {{"iact_functional",
         cfg.params.iact_functional == IactFunctional::ZClipped ? "z_clipped" : "x1_clipped_square"},
        {"clip", cfg.params.clip},
        {"threshold_eps", cfg.params.threshold_eps},
        {"degeneracy_m", {{"c", cfg.params.degeneracy_m.c}, {"beta", cfg.params.degeneracy_m.beta}}},
        {"z_oscillation",
         {{"t", cfg.params.z_t}, {"c", cfg.params.z_alpha.c}, {"beta", cfg.params.z_alpha.beta}}}}},
  };
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigValidationError({"cannot open config file '" + path.string() + "'"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigValidationError({std::string("config is not valid JSON: ") + e.what()});
  }
  return parse_config(doc);
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.canonical.dump())));
  return buf;
}

}  // namespace rwmlab

#pragma once

// The analytic identity battery behind `rwm-lab verify`. Each entry compares
// a measured residual against a bound; failures are report content, never
// exceptions.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace rwmlab {

struct VerifyEntry {
  std::string name;
  std::string group;
  double measured = 0.0;
  double bound = 0.0;
  bool strict = false;  // pass iff measured < bound (else measured <= bound)
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::string profile;
  std::uint64_t seed = 0;
  std::vector<VerifyEntry> entries;
  bool pass = false;
  std::size_t n_failed = 0;
};

/// Profiles: "default" (tolerances as documented) and "zero" (every
/// tolerance 0). Throws ConfigError for an unknown profile name.
VerifyReport verify_analytics(const std::string& profile = "default", std::uint64_t seed = 20240917);

nlohmann::json to_json(const VerifyReport& report);
VerifyReport verify_report_from_json(const nlohmann::json& doc);

}  // namespace rwmlab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stablesup {

struct CheckRecord {
  std::string name;
  std::string ref;                // short name of the result being checked
  bool pass = false;
  double max_slack_or_z = 0.0;    // slack, z-score or error, per check
  std::optional<double> runtime;  // seconds; only filled when timing is requested
  std::string error;              // exception text when the check threw
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  unsigned workers = 1;
  bool timing = false;
};

const std::vector<std::string>& suite_names();
// Throws InvalidArgument for an unknown suite.
std::vector<CheckRecord> run_suite(const std::string& suite, const VerifyOptions& opt = {});
// {"suite":..., "seed":..., "checks":[...], "passed":..., "failed":...}
std::string report_json(const std::string& suite, const VerifyOptions& opt, const std::vector<CheckRecord>& recs);

}  // namespace stablesup

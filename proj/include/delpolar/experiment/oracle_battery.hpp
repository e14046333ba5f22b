#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace delpolar::experiment {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct OracleOptions {
  std::uint64_t seed = 1;
  std::size_t posterior_trials = 20;
  std::size_t implication_traces = 20000;
  unsigned workers = 1;
};

/// Small-N verification battery: decoder posteriors against exhaustive
/// enumeration, transform involution, the exact single-step and degradation
/// relations, the event implication, prefix dominance, K for the uniform
/// source, and noiseless decoding.
std::vector<CheckResult> run_oracle_battery(const OracleOptions& options);

} // namespace delpolar::experiment

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "delpolar/experiment/config.hpp"
#include "delpolar/guard_bands.hpp"
#include "delpolar/sc_decoder.hpp"

namespace delpolar::experiment {

struct TrialRecord {
  std::size_t id = 0;
  bool block_error = false;
  std::size_t bit_errors = 0; // positions where x_hat differs from X
  std::size_t received_length = 0;
  bool gbm = false;
  double decode_ms = 0.0;
};

/// The frozen spec a run uses: the supplied bhatt.csv or a fresh design.
FrozenSpec frozen_spec_for(const ExperimentConfig& config, const GuardLayout& layout);

/// Trial t draws X from the source with the seed derived from
/// (seed, "fer", t); frozen indices carry the true U_i of that draw.
std::vector<TrialRecord> fer_trials(const ExperimentConfig& config, const FrozenSpec& spec);

struct GbmRow {
  GbmPoint point;
  std::size_t trials = 0;
  std::size_t gbm_count = 0;
  std::size_t not_a = 0, not_a_t = 0, not_b = 0, not_c = 0, not_c_t = 0;
  std::size_t implication_violations = 0;
  double bound_total = 0.0;
};

GbmRow gbm_point_stats(const GbmPoint& point, const SourceModel& model, std::size_t trials,
                       std::uint64_t seed, unsigned workers);

int run_encode(const ExperimentConfig& config, const std::filesystem::path& out);
int run_decode(const ExperimentConfig& config, const std::filesystem::path& out);
int run_fer(const ExperimentConfig& config, const std::filesystem::path& out);
int run_design_frozen(const ExperimentConfig& config, const std::filesystem::path& out);
int run_gbm_stats(const ExperimentConfig& config, const std::filesystem::path& out);
int run_polarization_lab(const ExperimentConfig& config, const std::filesystem::path& out);
int run_oracle_check(const ExperimentConfig& config, const std::filesystem::path& out);

struct CommandLine {
  std::string command;
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::filesystem::path out = ".";
};

/// Loads the config, applies overrides and dispatches. Returns the exit
/// code: 0 ok, 1 config error, 2 invariant violation.
int run_command(const CommandLine& cl);

} // namespace delpolar::experiment

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "delpolar/polarization_lab.hpp"
#include "delpolar/source.hpp"

namespace delpolar::experiment {

/// Invalid or unreadable configuration (exit code 1).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A hard invariant tripped during a run (exit code 2).
class InvariantViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DesignSection {
  std::size_t design_trials = 1000;
  double target_rate = 0.5;
  double k_threshold = 0.5;
  double clamp_cap = 1e6;
  std::optional<std::filesystem::path> frozen_file; // a bhatt.csv to reuse
};

struct FerSection {
  bool record_timing = false;
};

struct EncodeSection {
  std::optional<std::string> x_hex;
  std::optional<std::string> message_hex;
};

struct DecodeSection {
  std::string y_hex;
  std::size_t y_length = 0;
};

struct GbmPoint {
  int n = 0;
  int n0 = 0;
  double xi = 0.0;
  double delta = 0.0;
};

struct GbmSection {
  std::vector<GbmPoint> grid; // empty: the top-level parameters
  std::size_t trials = 0;     // 0: the top-level trial count
};

struct LabSection {
  ProcessParams params;
  std::size_t paths = 10000;
};

struct OracleSection {
  std::size_t posterior_trials = 20;
  std::size_t implication_traces = 20000;
};

struct ExperimentConfig {
  int n = 6;
  int n0 = 2;
  double xi = 0.25;
  double delta = 0.05;
  SourceModel source = SourceModel::uniform();
  nlohmann::json source_json = {{"kind", "uniform"}};
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  DesignSection design;
  FerSection fer;
  EncodeSection encode;
  DecodeSection decode;
  GbmSection gbm;
  LabSection lab;
  OracleSection oracle;
  std::filesystem::path base_dir = ".";
};

/// Reads a JSON document; relative paths inside resolve against its folder.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

SourceModel parse_source(const nlohmann::json& spec);

/// xi in (0,1) with at most 20 fractional binary digits.
void check_xi(double xi);

} // namespace delpolar::experiment

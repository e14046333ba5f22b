#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "delpolar/guard_bands.hpp"
#include "delpolar/random.hpp"
#include "delpolar/sc_decoder.hpp"
#include "delpolar/source.hpp"

namespace delpolar {

/// What the decoder is allowed to observe.
enum class Conditioning {
  Output,        // Y
  TrimmedOutput, // Y*
  TrimmedHalves, // (Z*_I, Z*_II)
  None
};

/// Bhattacharyya parameter of a bit given side information o:
/// Z = 2 sum_o sqrt(P(0, o) P(1, o)), so a fair bit with no information has
/// Z = 1.

/// Exhaustive joint law of U and one observation, over every input word
/// and every deletion pattern. Limited to N <= 8 and Lambda <= 16.
class ExactJoint {
public:
  static constexpr std::size_t kMaxData = 8;
  static constexpr std::size_t kMaxCodeword = 16;

  ExactJoint(const GuardLayout& layout, const SourceModel& model, double delta,
             Conditioning conditioning);

  Conditioning conditioning() const { return conditioning_; }
  std::size_t data_length() const { return data_length_; }
  std::size_t observation_count() const { return keys_.size(); }

  /// Sum of every table entry (1 up to rounding).
  double total() const;

  /// Z(U_i | U_1^{i-1}, observation), i = 1..N.
  double bhattacharyya(std::size_t i) const;
  std::vector<double> bhattacharyya_all() const;

  /// P(U = u, Y = y) for every u (index with U_1 as the most significant
  /// bit). Output conditioning only; zeros for unreachable y.
  std::vector<double> joint_with_output(std::span<const std::uint8_t> y) const;

private:
  std::size_t row_for(std::uint64_t key);

  Conditioning conditioning_;
  std::size_t data_length_ = 0;
  std::unordered_map<std::uint64_t, std::size_t> keys_;
  std::vector<double> table_; // rows of 2^N entries
};

/// Index of u with U_1 as the most significant bit.
std::size_t u_index(std::span<const std::uint8_t> u);

double exact_bhattacharyya(int n, int n0, double xi, double delta, const SourceModel& model,
                           std::size_t i, Conditioning conditioning);

struct SingleStepReport {
  std::size_t i = 0;
  std::size_t j = 0;
  bool plus = false;           // b_n = 1
  double z_trimmed = 0.0;      // Z(U_i | past, Y*)
  double z_halves = 0.0;       // Z(U_i | past, Z*_I, Z*_II)
  double z_half = 0.0;         // Z(V_j | V_1^{j-1}, Z*_I)
  double penalty = 0.0;        // 2^{-N^{2/3}}
  double slack_first = 0.0;    // (3/2) N z_halves + penalty - z_trimmed
  double slack_second = 0.0;   // right side of the recursive bound - z_trimmed
  bool first_holds = false;
  bool second_holds = false;
  double split_gap = 0.0;      // |z_halves - z_half^2| (plus) or z_halves - 2 z_half (minus)
  bool split_holds = false;
};

/// Trimmed versus half-split parameters at one index. Requires n > n0.
SingleStepReport verify_single_step(int n, int n0, double xi, double delta,
                                    const SourceModel& model, std::size_t i);

/// Same for every index, sharing the exhaustive tables.
std::vector<SingleStepReport> verify_single_step_all(int n, int n0, double xi, double delta,
                                                     const SourceModel& model);

struct DegradationReport {
  std::size_t i = 0;
  double z_output = 0.0;
  double z_trimmed = 0.0;
  bool holds = false;
};

std::vector<DegradationReport> verify_degradation_all(int n, int n0, double xi, double delta,
                                                      const SourceModel& model);
bool verify_degradation(int n, int n0, double xi, double delta, const SourceModel& model,
                        std::size_t i);

/// K(U_i | U_1^{i-1}) = sum_past |P(past, 0) - P(past, 1)| for blocks of
/// length 2^{n0}, by walking every decision path of the source trellis.
/// Limited to N <= 16.
std::vector<double> exact_total_variation_all(const SourceModel& model, int n, int n0);
double exact_total_variation(const SourceModel& model, int n, int n0, std::size_t i);

struct McEstimate {
  std::vector<double> mean;       // per index
  std::vector<double> std_error;  // per index
  std::vector<std::size_t> clamped;
  std::size_t trials = 0;
};

struct McOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::string label = "bhatt";
  unsigned workers = 1;
  double clamp_cap = 1e6;
};

/// Genie-aided estimator: the average of sqrt(P(other | past, y) /
/// P(true | past, y)) over samples (u, y) of the true joint, with the true
/// past fed back. Its expectation is Z.
McEstimate mc_bhattacharyya_all(const GuardLayout& layout, const SourceModel& model,
                                double delta, const McOptions& options);
double mc_bhattacharyya(const GuardLayout& layout, const SourceModel& model, double delta,
                        std::size_t i, const McOptions& options);

/// Monte-Carlo K for the source alone: E |P(0 | past) - P(1 | past)|.
std::vector<double> mc_total_variation_all(const SourceModel& model, int n, int n0,
                                           const McOptions& options);

struct DesignOptions {
  std::size_t design_trials = 1000;
  double rate = 0.5;
  double k_threshold = 0.5;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double clamp_cap = 1e6;
};

struct DesignResult {
  FrozenSpec spec;
  std::vector<double> z_std_error;
  std::size_t clamped = 0;
  bool k_exact = true;
};

DesignResult design_frozen_set(const GuardLayout& layout, const SourceModel& model,
                               double delta, const DesignOptions& options);

} // namespace delpolar

#pragma once

#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "delpolar/guard_bands.hpp"
#include "delpolar/random.hpp"
#include "delpolar/source.hpp"

namespace delpolar {

struct DeletionPattern {
  std::vector<std::size_t> deleted; // sorted 0-based positions in G
  double delta = 0.0;
};

struct TrimResult {
  Bits y_star;
  std::size_t left_cut = 0;
  std::size_t right_cut = 0;
};

/// Removes the outer zero runs. An all-zero word is cut entirely from the
/// left (left_cut = |y|, right_cut = 0).
TrimResult trim(std::span<const std::uint8_t> y);

/// Everything observable about one pass of a guarded word through the
/// deletion channel and the trimming channel. Segment ranges index into y.
struct ChannelTrace {
  DeletionPattern pattern;
  Bits y;
  std::vector<Provenance> y_provenance;
  std::vector<std::size_t> y_origin; // position in G of each received symbol
  std::size_t codeword_length = 0;
  int n = 0;
  bool has_outer_guard = false;

  Bits y_star;
  std::size_t left_cut = 0;
  std::size_t right_cut = 0;

  Segment g_first, g_guard, g_second; // in G
  Segment y_first, y_guard, y_second; // Y_I, Y_Delta, Y_II
  Segment z_first, z_guard, z_second; // Z_I, Z_Delta, Z_II

  std::size_t alpha = 0, beta = 0, gamma = 0;       // deletions per segment
  std::size_t alpha_t = 0, beta_t = 0, gamma_t = 0; // trimmed per segment

  Bits z_star_first, z_star_second;
  std::size_t l0 = 0;
  std::size_t i_mid = 0; // 1-based in Z; 0 when Z is empty
  Bits z_left, z_right;

  Bits y_slice(Segment s) const;
};

/// Builds the trace for a fixed deletion pattern.
ChannelTrace apply_deletions(const GuardedWord& g, DeletionPattern pattern);

/// Deletes each symbol independently with probability delta.
ChannelTrace transmit(const GuardedWord& g, double delta, Rng& rng);

/// Z nonempty and its middle symbol came from the outermost guard band.
bool gbm_event(const ChannelTrace& trace);

struct EventRecord {
  bool a = false, a_t = false, b = false, b_t = false, c = false, c_t = false;
  std::size_t alpha = 0, beta = 0, gamma = 0;
  std::size_t alpha_t = 0, beta_t = 0, gamma_t = 0;
};

/// Events A, A', B, B', C, C' with l_hat = (1 - delta) l_n / 4, evaluated in
/// exact rational arithmetic. Throws std::logic_error without an outer guard.
EventRecord classify_events(const ChannelTrace& trace);

/// (A and A' and B and C and C') implies GBM.
bool check_gbm_implication(const ChannelTrace& trace);

struct GbmBound {
  double p_not_a = 0.0;
  double p_not_b = 0.0;
  double p_not_a_t = 0.0;
  double d = 0.0;
  double total = 0.0;
  double m_threshold = 0.0; // +inf when xi >= 1/6
};

GbmBound gbm_bound(int n, int n0, double xi, double delta, const SourceModel& model);

/// The constant D of the zero-run bound.
double gbm_constant_d(double delta, int tau, double p0);

/// Max of the three level thresholds; +inf when xi >= 1/6.
double gbm_m_threshold(double xi, double delta, double d);

} // namespace delpolar

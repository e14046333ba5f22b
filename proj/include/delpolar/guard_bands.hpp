#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "delpolar/source.hpp"

namespace delpolar {

struct GuardParams {
  double xi = 0.125;
  int n0 = 0;
};

/// Origin of one codeword symbol: a block of X (numbered from 1) or a guard
/// band of a given recursion level.
struct Provenance {
  enum class Kind : std::uint8_t { Block, Guard };
  Kind kind = Kind::Block;
  int id = 0;

  bool is_guard() const { return kind == Kind::Guard; }
  bool operator==(const Provenance&) const = default;
};

struct GuardRun {
  std::size_t start = 0; // 0-based position in G
  std::size_t length = 0;
  int level = 0;
};

/// Half-open range [begin, end) of codeword positions.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

/// Structure of g(X, n0, xi) independent of the data bits.
struct GuardLayout {
  int n = 0;
  int n0 = 0;
  double xi = 0.0;
  std::vector<Provenance> provenance;
  std::vector<std::size_t> data_positions; // position in G of X_k, k = 0..N-1
  std::vector<GuardRun> guards;            // left to right

  std::size_t data_length() const { return data_positions.size(); }
  std::size_t total_length() const { return provenance.size(); }
  bool has_outer_guard() const { return n > n0; }
  /// Length of the outermost guard band (0 when n <= n0).
  std::size_t outer_guard_length() const;
  /// G_I, G_Delta, G_II. Without an outer guard, G_I is the whole word.
  Segment segment_first() const;
  Segment segment_guard() const;
  Segment segment_second() const;
};

struct GuardedWord {
  GuardLayout layout;
  Bits symbols;

  std::size_t length() const { return symbols.size(); }
};

/// l_m = floor(2^{(1-xi)(m-1)}), exact for every double xi.
std::size_t guard_band_length(int m, double xi);

GuardLayout make_guard_layout(int n, int n0, double xi);

GuardedWord insert_guard_bands(const BlockedInput& x, const GuardParams& params);

/// Places N data bits into an existing layout.
GuardedWord place_in_layout(const GuardLayout& layout, std::span<const std::uint8_t> x);

/// The Block-tagged symbols in order.
Bits strip_guards(const GuardedWord& g);

/// (#X, #GB) among the first j symbols, 1 <= j <= Lambda.
std::pair<std::size_t, std::size_t> prefix_counts(const GuardLayout& layout, std::size_t j);
std::pair<std::size_t, std::size_t> prefix_counts(const GuardedWord& g, std::size_t j);

bool check_prefix_dominance(const GuardLayout& layout);
bool check_prefix_dominance(const GuardedWord& g);

/// N (1 + 2^{-(xi n0 + 1)} / (1 - 2^{-xi})).
double total_length_bound(int n, int n0, double xi);

/// log base 2^{-xi} of (1 - 2^{-xi}) / 2.
double m0_threshold(double xi);

} // namespace delpolar

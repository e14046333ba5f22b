#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "delpolar/guard_bands.hpp"
#include "delpolar/source.hpp"

namespace delpolar {

/// A cut between sections. Vertices are pairs (e, s): e deletions among the
/// first `pos` codeword symbols, and a chain state s. Only e in [lo, hi] can
/// lie on a path that explains y, and states are only tracked strictly
/// inside a block.
struct Boundary {
  std::size_t pos = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t states = 1;

  std::size_t vertices() const { return (hi - lo + 1) * states; }
};

/// Dense weight matrix from `in` vertices (rows) to `out` vertices (columns).
struct DataSection {
  Boundary in, out;
  std::array<std::vector<double>, 2> w; // one matrix per label
  double log_scale = 0.0;
};

/// A collapsed guard band. Absent slots only keep the section order.
struct GuardSection {
  bool present = false;
  Boundary in, out;
  std::vector<double> m;
  double log_scale = 0.0;
};

/// Chain description the trellis works with: per-label transition weights.
/// Memoryless sources collapse to a single state.
struct ChainWeights {
  std::size_t states = 1;
  std::array<std::vector<double>, 2> start; // P(S_1 = s', X_1 = b)
  std::array<std::vector<double>, 2> step;  // P(s -> s') 1[emit(s') = b]

  static ChainWeights from(const SourceModel& model);
};

struct Trellis {
  int n = 0;
  int n0 = 0;
  int depth = 0;
  std::vector<DataSection> sections;
  std::vector<GuardSection> guards; // guards[k] sits between sections k and k+1

  std::size_t section_count() const { return sections.size(); }
  std::size_t guard_count() const;
};

/// Depth-0 trellis of P(X = x, Y = y) over the whole received word.
/// Throws std::invalid_argument when |y| exceeds the codeword length.
Trellis build_base_trellis(std::span<const std::uint8_t> y, const GuardLayout& layout,
                           const SourceModel& model, double delta,
                           std::uint64_t* ops = nullptr);

/// Depth-0 trellis of the source alone (no channel, no guard bands).
Trellis build_source_trellis(int n, int n0, const SourceModel& model);

Trellis minus_transform(const Trellis& t, std::uint64_t* ops = nullptr);

/// decided[k] is the already decided minus label of pair k.
Trellis plus_transform(const Trellis& t, std::span<const std::uint8_t> decided,
                       std::uint64_t* ops = nullptr);

/// log of the total weight summed over all labels (P(Y = y) at depth 0).
double log_total_weight(const Trellis& t);

/// log of the weight of label b for a fully merged (1-section) trellis.
double leaf_log_weight(const Trellis& t, std::uint8_t b);

} // namespace delpolar

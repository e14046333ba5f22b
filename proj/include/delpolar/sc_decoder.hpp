#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "delpolar/guard_bands.hpp"
#include "delpolar/source.hpp"
#include "delpolar/trellis.hpp"

namespace delpolar {

enum class BitClass : std::uint8_t { Info, Frozen, Shaped };

const char* bit_class_name(BitClass c);

struct FrozenSpec {
  std::vector<BitClass> classes;           // index i-1 for U_i
  std::vector<std::uint8_t> frozen_values; // used for Frozen indices
  std::vector<double> z_estimates;
  std::vector<double> k_values;
  double k_threshold = 0.5;
  double rate = 1.0;

  static FrozenSpec all_info(std::size_t length);
  std::size_t length() const { return classes.size(); }
  std::size_t info_count() const;
  bool has_shaped() const;
};

/// Leaf weights of one lane: log P(U_i = b, decided past, observation).
struct LeafValues {
  double log_w0 = 0.0;
  double log_w1 = 0.0;

  /// P(U_i = 1 | past, observation); 1/2 when both weights vanish.
  double posterior_one() const;
  /// Most likely value, exact ties to 0.
  std::uint8_t argmax() const { return log_w1 > log_w0 ? 1 : 0; }
};

/// Chooses U_i (1-based) from the leaf values of every lane.
using LeafPolicy = std::function<std::uint8_t(std::size_t i, std::span<const LeafValues> lanes)>;

/// Successive cancellation over depth-0 trellises that share one decision
/// sequence. Returns the depth-0 labels, i.e. A(u) for the decided u.
Bits run_successive_cancellation(std::vector<Trellis> lanes, const LeafPolicy& policy,
                                 std::uint64_t* ops = nullptr);

struct DecodeResult {
  Bits u_hat;
  Bits x_hat;
  Bits labels; // depth-0 decided labels
  std::vector<double> posterior_one;
  std::vector<double> log_w0, log_w1;
  std::uint64_t ops = 0;
};

DecodeResult sc_decode(std::span<const std::uint8_t> y, const GuardLayout& layout,
                       const SourceModel& model, double delta, const FrozenSpec& spec);

struct Encoded {
  Bits u;
  Bits x;
};

/// Info indices take the message bits in order, frozen indices their fixed
/// value, shaped indices the source-conditional argmax given the past.
Encoded polar_encode(std::span<const std::uint8_t> message, const FrozenSpec& spec,
                     const SourceModel& model, int n, int n0);

/// sum_{j=0}^{n-1} 2^{j+1} 8 N |S|^3 (2^j + 1)^2 2^{n-j}; throws
/// std::overflow_error when the value does not fit in 64 bits.
std::uint64_t op_count_bound(int n, std::uint64_t big_n, std::uint64_t states);

} // namespace delpolar

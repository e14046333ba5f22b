#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "delpolar/random.hpp"

namespace delpolar {

using Bits = std::vector<std::uint8_t>;

enum class SourceKind { UniformIID, Markov };

/// Input process: a finite Markov chain whose emitted bit is a deterministic
/// function of the state it arrives in. X_k = emit(S_k), with S_0 drawn from
/// the stationary law, and every block restarts the chain independently.
class SourceModel {
public:
  /// Fair i.i.d. bits, stored as the 2-state chain with all transitions 1/2.
  static SourceModel uniform();

  /// Throws std::invalid_argument when rows are not stochastic, the chain is
  /// not regular, or the (tau, p0) zero-run witness fails for some state.
  static SourceModel markov(std::vector<std::vector<double>> transition,
                            std::vector<std::uint8_t> emit, int tau, double p0);

  SourceKind kind() const { return kind_; }
  std::size_t state_count() const { return emit_.size(); }
  double transition(std::size_t from, std::size_t to) const {
    return transition_[from * state_count() + to];
  }
  std::uint8_t emit(std::size_t state) const { return emit_[state]; }
  const std::vector<double>& initial() const { return initial_; }
  int tau() const { return tau_; }
  double p0() const { return p0_; }

  /// All rows equal: the emitted bits are i.i.d.
  bool is_memoryless() const { return memoryless_; }

  /// Probability of a single emitted 1 when the source is memoryless.
  double one_probability() const;

  /// P(X_1 = ... = X_len = 0 | S_0 = state).
  double zero_run_probability(std::size_t state, int len) const;

  /// Probability of a given block under the chain started from `initial`.
  double block_probability(std::span<const std::uint8_t> block) const;

  /// Emits `len` bits from a fresh chain started from the stationary law.
  Bits sample_block(std::size_t len, Rng& rng) const;

private:
  SourceModel() = default;
  void finish();

  SourceKind kind_ = SourceKind::Markov;
  std::vector<double> transition_;
  std::vector<std::uint8_t> emit_;
  std::vector<double> initial_;
  int tau_ = 1;
  double p0_ = 0.5;
  bool memoryless_ = false;
};

/// Stationary distribution by power iteration (L1 change below 1e-12).
std::vector<double> stationary_distribution(const std::vector<double>& transition,
                                            std::size_t states);

/// Some power of the transition matrix is entrywise positive.
bool is_regular(const std::vector<double>& transition, std::size_t states);

struct BlockedInput {
  Bits bits;
  int n = 0;
  int n0 = 0;

  std::size_t length() const { return bits.size(); }
  std::size_t block_length() const { return std::size_t{1} << n0; }
  std::size_t block_count() const { return std::size_t{1} << (n - n0); }
  /// Blocks are numbered from 1.
  std::span<const std::uint8_t> block(std::size_t b) const;
};

BlockedInput sample_blocked_input(const SourceModel& model, int n, int n0, Rng& rng);

/// U = A(X): U_{2j-1} = V_j + V'_j, U_{2j} = V'_j with V, V' the transforms
/// of the two halves. Throws std::invalid_argument unless the length is a
/// power of two.
Bits arikan_transform(std::span<const std::uint8_t> v);

/// i = 1 + sum_k b_k 2^{n-k}.
std::size_t bit_index(std::span<const std::uint8_t> b);

/// Inverse of bit_index for a given width.
Bits index_bits(std::size_t i, int n);

bool is_power_of_two(std::size_t v);
int log2_exact(std::size_t v);

} // namespace delpolar

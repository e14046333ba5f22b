#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace delpolar {

/// Seeded random stream.
///
/// Real-valued draws are converted from the raw 64-bit engine output here
/// instead of going through <random> distributions, whose algorithms are
/// implementation-defined. The same seed therefore yields the same draws on
/// every standard library.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  /// Index drawn from an (already normalised) probability vector.
  std::size_t categorical(std::span<const double> probabilities);

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a of a label.
std::uint64_t label_hash(std::string_view label);

/// Per-trial seed from (master seed, stream label, trial index).
///
/// The mixing schedule below is frozen: changing it changes every output of
/// every experiment.
std::uint64_t derive_trial_seed(std::uint64_t master, std::string_view label,
                                std::uint64_t trial);

} // namespace delpolar

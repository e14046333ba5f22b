#include "delpolar/random.hpp"

namespace delpolar {

std::size_t Rng::categorical(std::span<const double> probabilities) {
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    acc += probabilities[k];
    if (u < acc)
      return k;
  }
  // Rounding left a sliver above the cumulative sum; take the last
  // outcome with nonzero mass.
  for (std::size_t k = probabilities.size(); k-- > 0;)
    if (probabilities[k] > 0.0)
      return k;
  return 0;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_trial_seed(std::uint64_t master, std::string_view label,
                                std::uint64_t trial) {
  std::uint64_t z = splitmix64(master);
  z = splitmix64(z ^ label_hash(label));
  z = splitmix64(z ^ splitmix64(trial ^ 0xD1B54A32D192ED03ULL));
  return z;
}

} // namespace delpolar

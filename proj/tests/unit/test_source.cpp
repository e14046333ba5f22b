#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <map>
#include <set>

#include "../support/brute_force.hpp"
#include "delpolar/random.hpp"
#include "delpolar/source.hpp"

using namespace delpolar;

namespace {

SourceModel flip_chain() {
  return SourceModel::markov({{0.7, 0.3}, {0.3, 0.7}}, {0, 1}, 1, 0.8);
}

} // namespace

TEST_CASE("derived seeds are pinned, pure and collision free") {
  CHECK(derive_trial_seed(0, "fer", 0) == 9624696672842892896ULL);
  CHECK(derive_trial_seed(12345, "bhatt", 7) == 7809437740365597498ULL);
  CHECK(derive_trial_seed(3, "design", 11) == derive_trial_seed(3, "design", 11));

  std::vector<std::uint64_t> seeds;
  seeds.reserve(2000000);
  for (std::uint64_t t = 0; t < 1000000; ++t) {
    seeds.push_back(derive_trial_seed(99, "fer", t));
    seeds.push_back(derive_trial_seed(99, "gbm", t));
  }
  std::sort(seeds.begin(), seeds.end());
  CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
}

TEST_CASE("rng primitives") {
  Rng a(42), b(42);
  CHECK(a.next() == b.next());
  for (int k = 0; k < 1000; ++k) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  const double probs[] = {0.0, 1.0, 0.0};
  CHECK(a.categorical(probs) == 1);
}

TEST_CASE("uniform source gives fair bits") {
  const SourceModel m = SourceModel::uniform();
  CHECK(m.is_memoryless());
  Rng rng(5);
  const BlockedInput x = sample_blocked_input(m, 3, 1, rng);
  CHECK(x.length() == 8);
  CHECK(x.block_count() == 4);
  CHECK(x.block(2).size() == 2);

  std::size_t ones = 0;
  const std::size_t draws = 20000;
  for (std::size_t t = 0; t < draws; ++t)
    for (std::uint8_t b : sample_blocked_input(m, 3, 1, rng).bits)
      ones += b;
  const double total = 8.0 * draws;
  const double sigma = std::sqrt(total * 0.25);
  CHECK(std::abs(static_cast<double>(ones) - total / 2) < 3 * sigma);
}

TEST_CASE("degenerate chains are rejected") {
  // State 0 emits 0 and never leaves.
  CHECK_THROWS_AS(SourceModel::markov({{1.0, 0.0}, {0.5, 0.5}}, {0, 1}, 1, 0.9),
                  std::invalid_argument);
  CHECK_THROWS_AS(SourceModel::markov({{1.0, 0.0}, {0.5, 0.5}}, {0, 1}, 5, 0.999),
                  std::invalid_argument);
  // Rows must be stochastic.
  CHECK_THROWS_AS(SourceModel::markov({{0.5, 0.4}, {0.5, 0.5}}, {0, 1}, 1, 0.9),
                  std::invalid_argument);
  // A zero run that is too likely for the stated witness.
  CHECK_THROWS_AS(SourceModel::markov({{0.9, 0.1}, {0.5, 0.5}}, {0, 1}, 1, 0.5),
                  std::invalid_argument);
}

TEST_CASE("block probabilities match path enumeration") {
  const SourceModel m = flip_chain();
  double total = 0.0;
  for (std::size_t v = 0; v < 16; ++v) {
    const brute::Word block = brute::bits_of(v, 4);
    const double p = m.block_probability(block);
    CHECK(p == doctest::Approx(brute::block_probability(m, block)).epsilon(1e-14));
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sampled blocks of the flip chain follow the exact law") {
  const SourceModel m = flip_chain();
  Rng rng(2718);
  std::map<std::size_t, std::size_t> counts;
  const std::size_t samples = 100000;
  for (std::size_t t = 0; t < samples; ++t)
    ++counts[brute::index_of(sample_blocked_input(m, 2, 2, rng).bits)];
  for (std::size_t v = 0; v < 16; ++v) {
    const double p = brute::block_probability(m, brute::bits_of(v, 4));
    const double mean = samples * p;
    const double sigma = std::sqrt(samples * p * (1 - p));
    CHECK(std::abs(static_cast<double>(counts[v]) - mean) < 3 * sigma);
  }
}

TEST_CASE("transform examples") {
  CHECK(arikan_transform(Bits{1, 0}) == Bits{1, 0});
  CHECK(arikan_transform(Bits{1, 1}) == Bits{0, 1});
  CHECK(arikan_transform(Bits{0, 1}) == Bits{1, 1});
  CHECK(arikan_transform(Bits{1, 0, 1, 1}) == Bits{1, 0, 1, 1});
  CHECK(arikan_transform(Bits(64, 0)) == Bits(64, 0));
  CHECK_THROWS_AS(arikan_transform(Bits{1, 0, 1}), std::invalid_argument);
}

TEST_CASE("transform agrees with the reference recursion, is linear and an involution") {
  Rng rng(17);
  for (int n = 0; n <= 10; ++n) {
    const std::size_t len = std::size_t{1} << n;
    for (int rep = 0; rep < 20; ++rep) {
      Bits x(len), y(len), s(len);
      for (std::size_t k = 0; k < len; ++k) {
        x[k] = rng.bit();
        y[k] = rng.bit();
        s[k] = x[k] ^ y[k];
      }
      const Bits ax = arikan_transform(x), ay = arikan_transform(y);
      CHECK(ax == brute::transform(x));
      CHECK(arikan_transform(ax) == x);
      Bits sum(len);
      for (std::size_t k = 0; k < len; ++k)
        sum[k] = ax[k] ^ ay[k];
      CHECK(arikan_transform(s) == sum);
    }
  }
}

TEST_CASE("bit index") {
  CHECK(bit_index(Bits{0, 0, 0}) == 1);
  CHECK(bit_index(Bits{0, 1, 1}) == 4);
  CHECK(bit_index(Bits{1, 1, 1}) == 8);
  for (std::size_t i = 1; i <= 32; ++i)
    CHECK(bit_index(index_bits(i, 5)) == i);
}

TEST_CASE("power of two helpers") {
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(12));
  CHECK(log2_exact(256) == 8);
  CHECK_THROWS(log2_exact(6));
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "../support/brute_force.hpp"
#include "delpolar/channels.hpp"
#include "delpolar/random.hpp"
#include "delpolar/sc_decoder.hpp"
#include "delpolar/trellis.hpp"

using namespace delpolar;

namespace {

SourceModel chain() { return SourceModel::markov({{0.7, 0.3}, {0.4, 0.6}}, {0, 1}, 2, 0.7); }

Trellis fully_minus(Trellis t) {
  while (t.section_count() > 1)
    t = minus_transform(t);
  return t;
}

double rel_gap(double a, double b) {
  if (a == b)
    return 0.0;
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace

TEST_CASE("noiseless trellis carries the source probability") {
  Rng rng(3);
  for (const SourceModel& m : {SourceModel::uniform(), chain()}) {
    const GuardLayout layout = make_guard_layout(3, 1, 0.5);
    for (int rep = 0; rep < 10; ++rep) {
      const BlockedInput x = sample_blocked_input(m, 3, 1, rng);
      const GuardedWord g = place_in_layout(layout, x.bits);
      const Trellis t = build_base_trellis(g.symbols, layout, m, 0.0);
      CHECK(std::exp(log_total_weight(t)) ==
            doctest::Approx(brute::source_probability(m, x.bits, 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("two symbols through a half-erasing channel") {
  const GuardLayout layout = make_guard_layout(1, 1, 0.5);
  const SourceModel m = SourceModel::uniform();
  double brute_one = 0.0;
  for (double p : brute::joint_u_y(m, 1, 1, 0.5, 0.5, {1}))
    brute_one += p;
  CHECK(std::exp(log_total_weight(build_base_trellis(Bits{1}, layout, m, 0.5))) ==
        doctest::Approx(brute_one).epsilon(1e-14));
  // 1/4 * 1/4 * (0 + 1 + 1 + 2) embeddings of y = 1 in 00, 01, 10, 11.
  CHECK(brute_one == doctest::Approx(0.25));
  for (const SourceModel& src : {SourceModel::uniform(), chain()})
    CHECK(std::exp(log_total_weight(build_base_trellis(Bits{}, layout, src, 0.5))) ==
          doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(build_base_trellis(Bits{1, 0, 1}, layout, m, 0.5), std::invalid_argument);
}

TEST_CASE("minus transform on a noiseless pair") {
  const GuardLayout layout = make_guard_layout(1, 1, 0.5);
  const SourceModel m = chain();
  for (std::size_t v = 0; v < 4; ++v) {
    const Bits x = brute::bits_of(v, 2);
    const Trellis t = minus_transform(build_base_trellis(x, layout, m, 0.0));
    REQUIRE(t.section_count() == 1);
    const std::uint8_t u1 = x[0] ^ x[1];
    CHECK(std::exp(leaf_log_weight(t, u1)) ==
          doctest::Approx(brute::source_probability(m, x, 1)).epsilon(1e-12));
    CHECK(std::isinf(leaf_log_weight(t, u1 ^ 1)));

    const std::uint8_t decided[] = {u1};
    const Trellis p = plus_transform(build_base_trellis(x, layout, m, 0.0), decided);
    CHECK(std::isfinite(leaf_log_weight(p, x[1])));
    CHECK(std::isinf(leaf_log_weight(p, x[1] ^ 1)));
  }
}

TEST_CASE("fully minus trellis gives the first bit joint") {
  Rng rng(9);
  for (const SourceModel& m : {SourceModel::uniform(), chain()})
    for (int n0 : {1, 2}) {
      const GuardLayout layout = make_guard_layout(2, n0, 0.5);
      for (int rep = 0; rep < 5; ++rep) {
        const BlockedInput x = sample_blocked_input(m, 2, n0, rng);
        const ChannelTrace tr = transmit(place_in_layout(layout, x.bits), 0.2, rng);
        const Trellis t = fully_minus(build_base_trellis(tr.y, layout, m, 0.2));
        const std::vector<double> joint = brute::joint_u_y(m, 2, n0, 0.5, 0.2, tr.y);
        const brute::Split s = brute::split_at(joint, 4, {});
        CHECK(rel_gap(std::exp(leaf_log_weight(t, 0)), s.w0) < 1e-12);
        CHECK(rel_gap(std::exp(leaf_log_weight(t, 1)), s.w1) < 1e-12);
      }
    }
}

TEST_CASE("transforms conserve probability") {
  Rng rng(10);
  const SourceModel m = chain();
  const GuardLayout layout = make_guard_layout(3, 1, 0.5);
  for (int rep = 0; rep < 10; ++rep) {
    const BlockedInput x = sample_blocked_input(m, 3, 1, rng);
    const ChannelTrace tr = transmit(place_in_layout(layout, x.bits), 0.3, rng);
    const Trellis t = build_base_trellis(tr.y, layout, m, 0.3);
    const double total = std::exp(log_total_weight(t));
    CHECK(rel_gap(std::exp(log_total_weight(minus_transform(t))), total) < 1e-12);
    const std::vector<std::uint8_t> zeros(t.section_count() / 2, 0), ones(zeros.size(), 1);
    std::vector<std::uint8_t> mixed(zeros.size());
    for (std::size_t k = 0; k < mixed.size(); ++k)
      mixed[k] = rng.bit();
    // Summing the plus trellis over every decided minus vector restores the total.
    double sum = 0.0;
    const std::size_t pairs = zeros.size();
    for (std::size_t v = 0; v < (std::size_t{1} << pairs); ++v) {
      std::vector<std::uint8_t> d(pairs);
      for (std::size_t k = 0; k < pairs; ++k)
        d[k] = (v >> k) & 1;
      sum += std::exp(log_total_weight(plus_transform(t, d)));
    }
    CHECK(rel_gap(sum, total) < 1e-12);
  }
}

TEST_CASE("decoder posteriors match exhaustive enumeration") {
  Rng rng(11);
  double worst = 0.0;
  for (const SourceModel& m : {SourceModel::uniform(), chain()})
    for (auto [n, n0] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 1}})
      for (double delta : {0.1, 0.2, 0.3}) {
        const GuardLayout layout = make_guard_layout(n, n0, 0.5);
        const std::size_t big_n = layout.data_length();
        const FrozenSpec spec = FrozenSpec::all_info(big_n);
        for (int rep = 0; rep < 4; ++rep) {
          const BlockedInput x = sample_blocked_input(m, n, n0, rng);
          const ChannelTrace tr = transmit(place_in_layout(layout, x.bits), delta, rng);
          const DecodeResult dec = sc_decode(tr.y, layout, m, delta, spec);
          const std::vector<double> joint = brute::joint_u_y(m, n, n0, 0.5, delta, tr.y);
          for (std::size_t i = 0; i < big_n; ++i) {
            const brute::Split s =
                brute::split_at(joint, big_n, Bits(dec.u_hat.begin(), dec.u_hat.begin() + i));
            const double p1 = s.w1 / (s.w0 + s.w1), p0 = s.w0 / (s.w0 + s.w1);
            worst = std::max(worst, rel_gap(dec.posterior_one[i], p1));
            worst = std::max(worst, rel_gap(1.0 - dec.posterior_one[i], p0));
            if (std::abs(s.w1 - s.w0) > 1e-9 * (s.w0 + s.w1))
              CHECK(dec.u_hat[i] == (s.w1 > s.w0 ? 1 : 0));
          }
          CHECK(dec.labels == dec.x_hat);
          CHECK(dec.x_hat == arikan_transform(dec.u_hat));
        }
      }
  CHECK(worst < 1e-9);
}

TEST_CASE("noiseless decoding recovers the input") {
  Rng rng(12);
  for (int n = 0; n <= 6; ++n) {
    const int n0 = std::min(n, 2);
    const GuardLayout layout = make_guard_layout(n, n0, 0.5);
    for (const SourceModel& m : {SourceModel::uniform(), chain()}) {
      const BlockedInput x = sample_blocked_input(m, n, n0, rng);
      const GuardedWord g = place_in_layout(layout, x.bits);
      const DecodeResult dec =
          sc_decode(g.symbols, layout, m, 0.0, FrozenSpec::all_info(layout.data_length()));
      CHECK(dec.x_hat == x.bits);
      CHECK(dec.labels == x.bits);
    }
  }
}

TEST_CASE("frozen bits are returned verbatim") {
  Rng rng(13);
  const GuardLayout layout = make_guard_layout(3, 1, 0.5);
  const SourceModel m = SourceModel::uniform();
  for (int rep = 0; rep < 10; ++rep) {
    const BlockedInput x = sample_blocked_input(m, 3, 1, rng);
    const Bits u = arikan_transform(x.bits);
    FrozenSpec spec = FrozenSpec::all_info(8);
    for (std::size_t k = 0; k < 8; ++k) {
      spec.classes[k] = BitClass::Frozen;
      spec.frozen_values[k] = u[k];
    }
    const ChannelTrace tr = transmit(place_in_layout(layout, x.bits), 0.4, rng);
    const DecodeResult dec = sc_decode(tr.y, layout, m, 0.4, spec);
    CHECK(dec.u_hat == u);
    CHECK(dec.x_hat == x.bits);
  }
}

TEST_CASE("encoder fills info, frozen and shaped indices") {
  const SourceModel m = chain();
  FrozenSpec spec = FrozenSpec::all_info(8);
  spec.classes = {BitClass::Frozen, BitClass::Info,   BitClass::Shaped, BitClass::Info,
                  BitClass::Frozen, BitClass::Shaped, BitClass::Info,   BitClass::Info};
  spec.frozen_values = {1, 0, 0, 0, 0, 0, 0, 0};
  CHECK(spec.info_count() == 4);
  CHECK(spec.has_shaped());
  const Bits message{1, 0, 1, 1};
  const Encoded e = polar_encode(message, spec, m, 3, 1);
  CHECK(e.u[0] == 1);
  CHECK(e.u[4] == 0);
  CHECK(e.u[1] == 1);
  CHECK(e.u[3] == 0);
  CHECK(e.u[6] == 1);
  CHECK(e.u[7] == 1);
  CHECK(e.x == arikan_transform(e.u));

  const GuardLayout layout = make_guard_layout(3, 1, 0.5);
  const DecodeResult dec = sc_decode(place_in_layout(layout, e.x).symbols, layout, m, 0.0, spec);
  CHECK(dec.u_hat == e.u);
  CHECK_THROWS(polar_encode(Bits{1, 0}, spec, m, 3, 1));
}

TEST_CASE("operation counts and the bound") {
  CHECK(op_count_bound(2, 4, 1) == 3328);
  CHECK(op_count_bound(1, 2, 1) == 256);
  CHECK_THROWS_AS(op_count_bound(40, std::uint64_t{1} << 40, 1000), std::overflow_error);

  Rng rng(14);
  for (const SourceModel& m : {SourceModel::uniform(), chain()})
    for (int n = 3; n <= 6; ++n) {
      const GuardLayout layout = make_guard_layout(n, 2, 0.5);
      const BlockedInput x = sample_blocked_input(m, n, 2, rng);
      const ChannelTrace tr = transmit(place_in_layout(layout, x.bits), 0.1, rng);
      const DecodeResult dec =
          sc_decode(tr.y, layout, m, 0.1, FrozenSpec::all_info(layout.data_length()));
      const std::uint64_t states = m.is_memoryless() ? 1 : m.state_count();
      CHECK(dec.ops > 0);
      CHECK(dec.ops <= op_count_bound(n, layout.data_length(), states));
    }
}

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "../support/brute_force.hpp"
#include "delpolar/channels.hpp"
#include "delpolar/guard_bands.hpp"
#include "delpolar/random.hpp"

using namespace delpolar;

namespace {

GuardedWord plain_word(Bits symbols) {
  GuardedWord g;
  g.layout.provenance.assign(symbols.size(), {Provenance::Kind::Block, 1});
  for (std::size_t p = 0; p < symbols.size(); ++p)
    g.layout.data_positions.push_back(p);
  g.symbols = std::move(symbols);
  return g;
}

double binomial_pmf(std::size_t n, std::size_t k, double p) {
  const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_c + k * std::log(p) + (n - k) * std::log1p(-p));
}

} // namespace

TEST_CASE("trim") {
  const TrimResult a = trim(Bits{0, 0, 1, 1, 0, 1, 0, 1, 0, 0});
  CHECK(a.y_star == Bits{1, 1, 0, 1, 0, 1});
  CHECK(a.left_cut == 2);
  CHECK(a.right_cut == 2);
  const TrimResult b = trim(Bits{0, 0, 0, 0});
  CHECK(b.y_star.empty());
  CHECK(b.left_cut == 4);
  CHECK(b.right_cut == 0);
  const TrimResult c = trim(Bits{1});
  CHECK(c.y_star == Bits{1});
  CHECK(c.left_cut == 0);
  CHECK(c.right_cut == 0);
  CHECK(trim(Bits{}).y_star.empty());
}

TEST_CASE("deletions keep order") {
  const GuardedWord g = plain_word({1, 0, 1, 1, 0});
  // Second and fifth symbols.
  CHECK(apply_deletions(g, {{1, 4}, 0.0}).y == Bits{1, 1, 1});
  CHECK(apply_deletions(g, {{0, 1}, 0.0}).y == Bits{1, 1, 0});
  CHECK(apply_deletions(g, {{}, 0.0}).y == g.symbols);
  CHECK_THROWS_AS(apply_deletions(g, {{5}, 0.0}), std::out_of_range);
}

TEST_CASE("noiseless channel") {
  Rng rng(4);
  const GuardLayout layout = make_guard_layout(4, 2, 0.125);
  for (int rep = 0; rep < 20; ++rep) {
    const BlockedInput x = sample_blocked_input(SourceModel::uniform(), 4, 2, rng);
    const GuardedWord g = place_in_layout(layout, x.bits);
    const ChannelTrace t = transmit(g, 0.0, rng);
    CHECK(t.y == g.symbols);
    CHECK(t.y_star == trim(g.symbols).y_star);
    CHECK(t.alpha + t.beta + t.gamma == 0);
  }
}

TEST_CASE("received length has the binomial mean") {
  Rng rng(31);
  const GuardLayout layout = make_guard_layout(4, 2, 0.125);
  const GuardedWord g = place_in_layout(layout, Bits(16, 1));
  const std::size_t trials = 100000;
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t)
    sum += static_cast<double>(transmit(g, 0.3, rng).y.size());
  const double sigma = std::sqrt(28 * 0.3 * 0.7 / trials);
  CHECK(std::abs(sum / trials - 19.6) < 3 * sigma);
  CHECK_THROWS_AS(transmit(g, 1.0, rng), std::invalid_argument);
}

TEST_CASE("segment bookkeeping") {
  Rng rng(77);
  const GuardLayout layout = make_guard_layout(5, 2, 0.25);
  for (int rep = 0; rep < 2000; ++rep) {
    const BlockedInput x = sample_blocked_input(SourceModel::uniform(), 5, 2, rng);
    const ChannelTrace t = transmit(place_in_layout(layout, x.bits), 0.3, rng);
    CHECK(t.alpha + t.beta + t.gamma == t.pattern.deleted.size());
    CHECK(t.y.size() == layout.total_length() - t.pattern.deleted.size());
    CHECK(t.alpha_t + t.beta_t + t.gamma_t == t.left_cut + t.right_cut);
    CHECK(t.z_first.size() + t.z_guard.size() + t.z_second.size() == t.y_star.size());
    for (std::size_t p = t.y_guard.begin; p < t.y_guard.end; ++p)
      CHECK(t.y_provenance[p].is_guard());
    CHECK(t.z_left.size() + t.z_right.size() == t.y_star.size());
  }
}

TEST_CASE("gbm event from hand-built index ranges") {
  ChannelTrace t;
  t.has_outer_guard = true;
  t.y_star = Bits(8, 1);
  t.left_cut = 0;
  t.i_mid = 4;
  t.z_guard = {3, 5}; // positions 4 and 5, 1-based
  CHECK(gbm_event(t));
  t.y_star = Bits(7, 1);
  t.i_mid = 4;
  t.z_guard = {5, 6}; // |Z_I| = 5
  CHECK_FALSE(gbm_event(t));
  t.has_outer_guard = false;
  CHECK_FALSE(gbm_event(t));
}

TEST_CASE("noiseless gbm when the first and last blocks hold a one") {
  const int n = 3, n0 = 1;
  const double xi = 0.125;
  const GuardLayout layout = make_guard_layout(n, n0, xi);
  std::size_t checked = 0;
  for (std::size_t v = 0; v < 256; ++v) {
    const Bits x = brute::bits_of(v, 8);
    if (!(x[0] || x[1]) || !(x[6] || x[7]))
      continue;
    const ChannelTrace t = apply_deletions(place_in_layout(layout, x), {{}, 0.0});
    CHECK(gbm_event(t));
    if (x[0] && x[7]) {
      const EventRecord e = classify_events(t);
      CHECK((e.a && e.a_t && e.b && e.b_t && e.c && e.c_t));
    }
    ++checked;
  }
  CHECK(checked == 3 * 16 * 3);
}

TEST_CASE("events on extreme traces") {
  const GuardLayout layout = make_guard_layout(6, 2, 0.5);
  const GuardedWord g = place_in_layout(layout, Bits(64, 1));
  DeletionPattern all_first;
  all_first.delta = 0.3;
  for (std::size_t p = layout.segment_first().begin; p < layout.segment_first().end; ++p)
    all_first.deleted.push_back(p);
  const ChannelTrace t = apply_deletions(g, all_first);
  const EventRecord e = classify_events(t);
  CHECK_FALSE(e.a);
  CHECK(check_gbm_implication(t));

  const GuardedWord single = place_in_layout(make_guard_layout(2, 2, 0.5), Bits(4, 1));
  const ChannelTrace s = apply_deletions(single, {{}, 0.1});
  CHECK_THROWS_AS(classify_events(s), std::logic_error);
  CHECK(check_gbm_implication(s));
}

TEST_CASE("frequency of event A matches the binomial law") {
  const int n = 10, n0 = 4;
  const double xi = 0.125, delta = 0.2;
  const GuardLayout layout = make_guard_layout(n, n0, xi);
  const std::size_t len = layout.segment_first().size();
  const double l_hat = (1 - delta) * layout.outer_guard_length() / 4.0;
  double p_a = 0.0;
  for (std::size_t k = 0; k <= len; ++k) {
    const double dk = static_cast<double>(k);
    if (delta * len - l_hat < dk && dk < delta * len + l_hat)
      p_a += binomial_pmf(len, k, delta);
  }
  Rng rng(606);
  const std::size_t traces = 10000;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < traces; ++t) {
    const BlockedInput x = sample_blocked_input(SourceModel::uniform(), n, n0, rng);
    hits += classify_events(transmit(place_in_layout(layout, x.bits), delta, rng)).a;
  }
  const double sigma = std::sqrt(p_a * (1 - p_a) / traces);
  CHECK(std::abs(static_cast<double>(hits) / traces - p_a) <= 3 * sigma + 1e-12);
}

TEST_CASE("event implication holds on random traces") {
  Rng rng(1234);
  std::size_t antecedent = 0;
  for (double delta : {0.1, 0.3, 0.5})
    for (auto [n, n0, xi] : {std::tuple{6, 2, 0.5}, std::tuple{8, 3, 0.25}}) {
      const GuardLayout layout = make_guard_layout(n, n0, xi);
      for (int t = 0; t < 5000; ++t) {
        const BlockedInput x = sample_blocked_input(SourceModel::uniform(), n, n0, rng);
        const ChannelTrace tr = transmit(place_in_layout(layout, x.bits), delta, rng);
        CHECK(check_gbm_implication(tr));
        const EventRecord e = classify_events(tr);
        antecedent += e.a && e.a_t && e.b && e.c && e.c_t;
      }
    }
  CHECK(antecedent > 0);
}

TEST_CASE("gbm probability bound") {
  CHECK(gbm_constant_d(0.5, 1, 0.6) == doctest::Approx(0.5 * std::log(1.25) * 0.5 / 32));
  CHECK(gbm_constant_d(0.5, 1, 0.6) == doctest::Approx(1.743e-3).epsilon(1e-3));

  const SourceModel m = SourceModel::uniform();
  double prev = 1e300;
  for (int n = 1; n <= 24; ++n) {
    const double total = gbm_bound(n, 0, 0.125, 0.0, m).total;
    CHECK(total <= prev);
    prev = total;
  }
  CHECK(gbm_bound(20, 0, 0.125, 0.1, m).total < 1.0);
  // First level where the bound stops being vacuous for this point.
  CHECK(gbm_bound(10, 0, 0.125, 0.1, m).total >= 1.0);
  CHECK(gbm_bound(11, 0, 0.125, 0.1, m).total < 1.0);

  CHECK(std::isinf(gbm_m_threshold(0.25, 0.1, 1e-3)));
  CHECK(std::isfinite(gbm_m_threshold(0.125, 0.1, 1e-3)));
}

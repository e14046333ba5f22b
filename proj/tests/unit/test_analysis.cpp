#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "../support/brute_force.hpp"
#include "delpolar/analysis.hpp"

using namespace delpolar;

namespace {

SourceModel chain() { return SourceModel::markov({{0.7, 0.3}, {0.4, 0.6}}, {0, 1}, 2, 0.7); }
SourceModel flip_chain() { return SourceModel::markov({{0.7, 0.3}, {0.3, 0.7}}, {0, 1}, 1, 0.8); }

// Z(U_i | U_1^{i-1}, Y) = 2 sum_{past, y} sqrt(P(past, 0, y) P(past, 1, y)),
// with y running over every binary word up to the codeword length.
double brute_z(const SourceModel& m, int n, int n0, double xi, double delta, std::size_t i) {
  const std::size_t big_n = std::size_t{1} << n;
  const std::size_t lambda = brute::guard(brute::Word(big_n, 1), n, n0, xi).size();
  double acc = 0.0;
  for (std::size_t len = 0; len <= lambda; ++len)
    for (std::size_t v = 0; v < (std::size_t{1} << len); ++v) {
      const std::vector<double> joint = brute::joint_u_y(m, n, n0, xi, delta, brute::bits_of(v, len));
      for (std::size_t past = 0; past < (std::size_t{1} << (i - 1)); ++past) {
        const brute::Split s = brute::split_at(joint, big_n, brute::bits_of(past, i - 1));
        acc += std::sqrt(s.w0 * s.w1);
      }
    }
  return 2.0 * acc;
}

// K(U_i | U_1^{i-1}) = sum_past |P(past, 0) - P(past, 1)| from the source law.
double brute_k(const SourceModel& m, int n, int n0, std::size_t i) {
  const std::size_t big_n = std::size_t{1} << n;
  std::vector<double> p(std::size_t{1} << big_n, 0.0);
  for (std::size_t v = 0; v < p.size(); ++v) {
    const brute::Word x = brute::bits_of(v, big_n);
    p[brute::index_of(brute::transform(x))] += brute::source_probability(m, x, n0);
  }
  double acc = 0.0;
  for (std::size_t past = 0; past < (std::size_t{1} << (i - 1)); ++past) {
    const brute::Split s = brute::split_at(p, big_n, brute::bits_of(past, i - 1));
    acc += std::abs(s.w0 - s.w1);
  }
  return acc;
}

} // namespace

TEST_CASE("exhaustive joint is a probability law") {
  for (Conditioning c : {Conditioning::Output, Conditioning::TrimmedOutput,
                         Conditioning::TrimmedHalves, Conditioning::None}) {
    const ExactJoint j(make_guard_layout(2, 1, 0.5), chain(), 0.3, c);
    CHECK(j.total() == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(ExactJoint(make_guard_layout(4, 1, 0.5), chain(), 0.3, Conditioning::Output),
                  std::invalid_argument);
}

TEST_CASE("bhattacharyya of a single bit through a half-erasing channel") {
  // y = empty: P(0, y) = P(1, y) = 1/4; y = 0 or 1 reveals the bit.
  const double hand = 2.0 * (std::sqrt(0.25 * 0.25) + std::sqrt(0.25 * 0.0) + std::sqrt(0.0 * 0.25));
  CHECK(hand == doctest::Approx(0.5));
  CHECK(exact_bhattacharyya(0, 0, 0.5, 0.5, SourceModel::uniform(), 1, Conditioning::Output) ==
        doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("bhattacharyya boundary cases") {
  for (std::size_t i = 1; i <= 4; ++i) {
    CHECK(exact_bhattacharyya(2, 1, 0.5, 0.0, chain(), i, Conditioning::Output) == 0.0);
    CHECK(exact_bhattacharyya(2, 1, 0.5, 0.2, SourceModel::uniform(), i, Conditioning::None) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("exhaustive bhattacharyya matches enumeration over received words") {
  for (const SourceModel& m : {SourceModel::uniform(), chain()})
    for (auto [n, n0] : {std::pair{1, 1}, std::pair{1, 0}, std::pair{2, 1}}) {
      const ExactJoint j(make_guard_layout(n, n0, 0.5), m, 0.2, Conditioning::Output);
      for (std::size_t i = 1; i <= j.data_length(); ++i)
        CHECK(j.bhattacharyya(i) == doctest::Approx(brute_z(m, n, n0, 0.5, 0.2, i)).epsilon(1e-12));
    }
}

TEST_CASE("half-split relations") {
  const std::vector<SingleStepReport> r = verify_single_step_all(2, 1, 0.5, 0.1, SourceModel::uniform());
  REQUIRE(r.size() == 4);
  CHECK(r[3].plus);
  CHECK(r[3].split_holds);
  CHECK(r[3].z_halves == doctest::Approx(r[3].z_half * r[3].z_half).epsilon(1e-12));
  CHECK_FALSE(r[2].plus);
  CHECK(r[2].z_halves <= 2.0 * r[2].z_half + 1e-12);
  for (const SingleStepReport& s : verify_single_step_all(2, 1, 0.5, 0.3, chain()))
    CHECK(s.split_holds);
  // Noiseless channel: trimmed parameters need not vanish.
  double largest = 0.0;
  for (const SingleStepReport& s : verify_single_step_all(2, 1, 0.5, 0.0, chain())) {
    CHECK(s.split_holds);
    largest = std::max(largest, s.z_trimmed);
  }
  CHECK(largest > 0.0);
  CHECK_THROWS(verify_single_step_all(1, 1, 0.5, 0.1, chain()));
}

TEST_CASE("trimming degrades") {
  for (double delta : {0.0, 0.1, 0.3})
    for (const SourceModel& m : {SourceModel::uniform(), chain()})
      for (const DegradationReport& d : verify_degradation_all(2, 1, 0.5, delta, m)) {
        CHECK(d.holds);
        CHECK(d.z_output <= d.z_trimmed + 1e-12);
        if (delta == 0.0)
          CHECK(d.z_output == 0.0);
      }
}

TEST_CASE("total variation") {
  for (int n = 0; n <= 4; ++n)
    for (int n0 = 0; n0 <= n; ++n0)
      for (double k : exact_total_variation_all(SourceModel::uniform(), n, n0))
        CHECK(std::abs(k) <= 1e-12);

  // U_1 = X_1 + X_2 is 0 exactly when the chain stays: 0.7 - 0.3.
  CHECK(exact_total_variation(flip_chain(), 1, 1, 1) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(exact_total_variation(flip_chain(), 1, 1, 1) ==
        doctest::Approx(brute_k(flip_chain(), 1, 1, 1)).epsilon(1e-12));
  CHECK(exact_total_variation(flip_chain(), 1, 0, 1) == doctest::Approx(0.0));
  for (int n0 : {1, 2})
    for (std::size_t i = 1; i <= 4; ++i)
      CHECK(exact_total_variation(chain(), 2, n0, i) ==
            doctest::Approx(brute_k(chain(), 2, n0, i)).epsilon(1e-12));
  CHECK_THROWS(exact_total_variation_all(chain(), 5, 2));
}

TEST_CASE("monte-carlo bhattacharyya") {
  const GuardLayout layout = make_guard_layout(2, 1, 0.5);
  McOptions opt;
  opt.trials = 2000;
  opt.seed = 4;
  for (double z : mc_bhattacharyya_all(layout, chain(), 0.0, opt).mean)
    CHECK(z == 0.0);

  opt.trials = 1;
  for (double z : mc_bhattacharyya_all(layout, chain(), 0.3, opt).mean)
    CHECK(z >= 0.0);

  opt.trials = 100000;
  const McEstimate est = mc_bhattacharyya_all(make_guard_layout(2, 1, 0.5), SourceModel::uniform(), 0.2, opt);
  const double exact = exact_bhattacharyya(2, 1, 0.5, 0.2, SourceModel::uniform(), 2, Conditioning::Output);
  CHECK(std::abs(est.mean[1] - exact) <= 3.0 * est.std_error[1]);
  CHECK(est.trials == 100000);

  McOptions a, b;
  a.trials = b.trials = 700;
  a.seed = b.seed = 21;
  a.workers = 1;
  b.workers = 3;
  const McEstimate ea = mc_bhattacharyya_all(layout, chain(), 0.2, a);
  const McEstimate eb = mc_bhattacharyya_all(layout, chain(), 0.2, b);
  CHECK(ea.mean == eb.mean);
  CHECK(ea.std_error == eb.std_error);
}

TEST_CASE("monte-carlo total variation tracks the exact value") {
  McOptions opt;
  opt.trials = 50000;
  opt.seed = 8;
  const std::vector<double> mc = mc_total_variation_all(chain(), 2, 1, opt);
  const std::vector<double> exact = exact_total_variation_all(chain(), 2, 1);
  REQUIRE(mc.size() == exact.size());
  for (std::size_t k = 0; k < mc.size(); ++k)
    CHECK(std::abs(mc[k] - exact[k]) < 0.02);
}

TEST_CASE("frozen set design") {
  DesignOptions opt;
  opt.design_trials = 200;
  opt.rate = 0.5;
  opt.seed = 3;
  const DesignResult noiseless = design_frozen_set(make_guard_layout(3, 1, 0.5), SourceModel::uniform(), 0.0, opt);
  CHECK(noiseless.k_exact);
  CHECK_FALSE(noiseless.spec.has_shaped());
  for (double z : noiseless.spec.z_estimates)
    CHECK(z == 0.0);
  for (double k : noiseless.spec.k_values)
    CHECK(k == 0.0);
  CHECK(noiseless.spec.info_count() == 4);

  const DesignResult noisy = design_frozen_set(make_guard_layout(4, 2, 0.5), SourceModel::uniform(), 0.1, opt);
  CHECK_FALSE(noisy.spec.has_shaped());
  CHECK(noisy.spec.info_count() == 8);
  // Info indices carry the smallest estimates.
  double worst_info = 0.0, best_frozen = 1e300;
  for (std::size_t k = 0; k < 16; ++k) {
    if (noisy.spec.classes[k] == BitClass::Info)
      worst_info = std::max(worst_info, noisy.spec.z_estimates[k]);
    else
      best_frozen = std::min(best_frozen, noisy.spec.z_estimates[k]);
  }
  CHECK(worst_info <= best_frozen);

  const DesignResult shaped = design_frozen_set(make_guard_layout(2, 2, 0.5),
      SourceModel::markov({{0.95, 0.05}, {0.5, 0.5}}, {0, 1}, 3, 0.9), 0.1, opt);
  CHECK(shaped.spec.has_shaped());
  for (std::size_t k = 0; k < 4; ++k)
    CHECK((shaped.spec.classes[k] == BitClass::Shaped) == (shaped.spec.k_values[k] >= 0.5));

  DesignOptions parallel = opt;
  parallel.workers = 4;
  const DesignResult again = design_frozen_set(make_guard_layout(4, 2, 0.5), SourceModel::uniform(), 0.1, parallel);
  CHECK(again.spec.classes == noisy.spec.classes);
  CHECK(again.spec.z_estimates == noisy.spec.z_estimates);
}

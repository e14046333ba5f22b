#include "delpolar/experiment/oracle_battery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delpolar/analysis.hpp"
#include "delpolar/channels.hpp"
#include "delpolar/experiment/csv.hpp"
#include "delpolar/guard_bands.hpp"
#include "delpolar/parallel.hpp"
#include "delpolar/random.hpp"
#include "delpolar/sc_decoder.hpp"
#include "delpolar/source.hpp"

namespace delpolar::experiment {

namespace {

SourceModel test_chain() {
  return SourceModel::markov({{0.7, 0.3}, {0.4, 0.6}}, {0, 1}, 2, 0.7);
}

// Worst relative gap between the decoder posterior and the one obtained by
// summing the exhaustive joint over every u that agrees with the decided past.
double posterior_gap(const ExactJoint& joint, const DecodeResult& dec,
                     std::span<const std::uint8_t> y) {
  const std::vector<double> p = joint.joint_with_output(y);
  const std::size_t big_n = dec.u_hat.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < big_n; ++i) {
    double w[2] = {0.0, 0.0};
    for (std::size_t idx = 0; idx < p.size(); ++idx) {
      bool agrees = true;
      for (std::size_t k = 0; k < i && agrees; ++k)
        agrees = ((idx >> (big_n - 1 - k)) & 1) == dec.u_hat[k];
      if (agrees)
        w[(idx >> (big_n - 1 - i)) & 1] += p[idx];
    }
    const double total = w[0] + w[1];
    if (total <= 0.0)
      continue;
    const double p1 = w[1] / total, p0 = w[0] / total;
    const double gap = std::abs(dec.posterior_one[i] - p1);
    const double scale = std::max(std::min(p0, p1), 1e-6);
    worst = std::max(worst, gap / scale);
  }
  return worst;
}

CheckResult check_posteriors(const OracleOptions& opt) {
  struct Instance {
    int n, n0;
    double delta;
    bool chain;
  };
  std::vector<Instance> cases;
  for (int n : {1, 2, 3})
    for (int n0 : {1, 2})
      for (double delta : {0.1, 0.3})
        for (bool chain : {false, true})
          if (n0 <= n)
            cases.push_back({n, n0, delta, chain});
  double worst = 0.0;
  std::size_t decodes = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Instance& in = cases[c];
    const SourceModel model = in.chain ? test_chain() : SourceModel::uniform();
    const GuardLayout layout = make_guard_layout(in.n, in.n0, 0.5);
    const ExactJoint joint(layout, model, in.delta, Conditioning::Output);
    const FrozenSpec spec = FrozenSpec::all_info(layout.data_length());
    std::vector<double> gaps(opt.posterior_trials);
    parallel_for(opt.posterior_trials, opt.workers, [&](std::size_t t) {
      Rng rng(derive_trial_seed(derive_trial_seed(opt.seed, "oracle-case", c), "oracle", t));
      const BlockedInput x = sample_blocked_input(model, in.n, in.n0, rng);
      const ChannelTrace trace = transmit(place_in_layout(layout, x.bits), in.delta, rng);
      const DecodeResult dec = sc_decode(trace.y, layout, model, in.delta, spec);
      gaps[t] = posterior_gap(joint, dec, trace.y);
    });
    worst = std::max(worst, *std::max_element(gaps.begin(), gaps.end()));
    decodes += gaps.size();
  }
  return {"posterior-vs-exhaustive", worst <= 1e-9,
          "decodes=" + std::to_string(decodes) + " worst_rel_gap=" + format_double(worst)};
}

CheckResult check_involution() {
  std::size_t checked = 0;
  bool ok = true;
  for (int n = 0; n <= 3; ++n) {
    const std::size_t big_n = std::size_t{1} << n;
    for (std::size_t v = 0; v < (std::size_t{1} << big_n); ++v) {
      Bits x(big_n);
      for (std::size_t k = 0; k < big_n; ++k)
        x[k] = (v >> k) & 1;
      ok = ok && arikan_transform(arikan_transform(x)) == x;
      ++checked;
    }
  }
  return {"transform-involution", ok, "vectors=" + std::to_string(checked)};
}

CheckResult check_single_step() {
  std::size_t checked = 0, failed = 0;
  double worst = 0.0;
  for (auto [n, n0] : {std::pair{1, 0}, std::pair{2, 0}, std::pair{2, 1}})
    for (double delta : {0.1, 0.3})
      for (const SourceModel& model : {SourceModel::uniform(), test_chain()})
        for (const SingleStepReport& r : verify_single_step_all(n, n0, 0.5, delta, model)) {
          ++checked;
          failed += !r.split_holds;
          worst = std::max(worst, r.plus ? r.split_gap : std::max(0.0, r.split_gap));
        }
  return {"half-split-relations", failed == 0,
          "indices=" + std::to_string(checked) + " worst_gap=" + format_double(worst)};
}

CheckResult check_degradation() {
  std::size_t checked = 0, failed = 0;
  for (double delta : {0.1, 0.3})
    for (const SourceModel& model : {SourceModel::uniform(), test_chain()})
      for (const DegradationReport& r : verify_degradation_all(2, 1, 0.5, delta, model)) {
        ++checked;
        failed += !r.holds;
      }
  return {"trimming-degradation", failed == 0,
          "indices=" + std::to_string(checked) + " failed=" + std::to_string(failed)};
}

CheckResult check_implication(const OracleOptions& opt) {
  const GuardLayout layout = make_guard_layout(6, 2, 0.5);
  const SourceModel model = SourceModel::uniform();
  std::vector<std::uint8_t> ok(opt.implication_traces);
  parallel_for(ok.size(), opt.workers, [&](std::size_t t) {
    Rng rng(derive_trial_seed(opt.seed, "oracle-gbm", t));
    const BlockedInput x = sample_blocked_input(model, 6, 2, rng);
    ok[t] = check_gbm_implication(transmit(place_in_layout(layout, x.bits), 0.1, rng));
  });
  const auto bad = std::count(ok.begin(), ok.end(), 0);
  return {"event-implication", bad == 0,
          "traces=" + std::to_string(ok.size()) + " violations=" + std::to_string(bad)};
}

CheckResult check_prefix() {
  bool ok = true;
  for (int n : {7, 8, 9})
    ok = ok && check_prefix_dominance(make_guard_layout(n, 6, 0.5));
  return {"prefix-dominance", ok, "xi=0.5 n0=6 n=7..9"};
}

CheckResult check_uniform_k() {
  double worst = 0.0;
  for (int n = 0; n <= 4; ++n)
    for (int n0 = 0; n0 <= n; ++n0)
      for (double k : exact_total_variation_all(SourceModel::uniform(), n, n0))
        worst = std::max(worst, std::abs(k));
  return {"uniform-source-k", worst == 0.0, "max_k=" + format_double(worst)};
}

CheckResult check_noiseless(const OracleOptions& opt) {
  std::size_t failures = 0, decodes = 0;
  for (int n = 1; n <= 6; ++n) {
    const SourceModel model = SourceModel::uniform();
    const GuardLayout layout = make_guard_layout(n, std::min(n, 2), 0.5);
    const FrozenSpec spec = FrozenSpec::all_info(layout.data_length());
    for (std::size_t t = 0; t < 10; ++t) {
      Rng rng(derive_trial_seed(opt.seed, "oracle-noiseless", 10 * n + t));
      const BlockedInput x = sample_blocked_input(model, n, layout.n0, rng);
      const GuardedWord g = place_in_layout(layout, x.bits);
      failures += sc_decode(g.symbols, layout, model, 0.0, spec).x_hat != x.bits;
      ++decodes;
    }
  }
  return {"noiseless-decode", failures == 0,
          "decodes=" + std::to_string(decodes) + " failures=" + std::to_string(failures)};
}

CheckResult check_joint_mass() {
  double worst = 0.0;
  for (auto [n, n0] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 2}})
    for (Conditioning c : {Conditioning::Output, Conditioning::TrimmedOutput})
      worst = std::max(worst,
                       std::abs(ExactJoint(make_guard_layout(n, n0, 0.5), test_chain(), 0.2, c)
                                    .total() - 1.0));
  return {"exhaustive-mass", worst <= 1e-12, "max_gap=" + format_double(worst)};
}

} // namespace

std::vector<CheckResult> run_oracle_battery(const OracleOptions& options) {
  return {check_posteriors(options), check_involution(),      check_single_step(),
          check_degradation(),       check_implication(options), check_prefix(),
          check_uniform_k(),         check_noiseless(options), check_joint_mass()};
}

} // namespace delpolar::experiment

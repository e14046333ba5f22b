#include "delpolar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "delpolar/channels.hpp"
#include "delpolar/parallel.hpp"
#include "delpolar/trellis.hpp"

namespace delpolar {

namespace {

// (length, bits) packed into 21 bits; bits are MSB-first.
std::uint64_t word_key(std::uint32_t bits, std::size_t len) {
  return (static_cast<std::uint64_t>(len) << 16) | bits;
}

std::uint64_t word_key(std::span<const std::uint8_t> w) {
  std::uint32_t bits = 0;
  for (std::uint8_t b : w)
    bits = (bits << 1) | b;
  return word_key(bits, w.size());
}

// Trimmed (bits, len) of a packed word.
std::pair<std::uint32_t, std::size_t> trim_packed(std::uint32_t bits, std::size_t len) {
  if (bits == 0)
    return {0, 0};
  const unsigned trailing = static_cast<unsigned>(__builtin_ctz(bits));
  bits >>= trailing;
  len -= trailing;
  // Leading zeros of a len-bit word hold no set bits above the top one.
  const std::size_t width = 32 - static_cast<std::size_t>(__builtin_clz(bits));
  return {bits, width};
}

double sum_bhattacharyya_row(const double* row, std::size_t big_n, std::size_t i) {
  // Marginalise U_{i+1..N}, then pair prefixes differing in U_i.
  const std::size_t shift = big_n - i;
  const std::size_t prefixes = std::size_t{1} << (i - 1);
  const std::size_t block = std::size_t{1} << shift;
  double acc = 0.0;
  for (std::size_t p = 0; p < prefixes; ++p) {
    double a = 0.0, b = 0.0;
    const double* base0 = row + ((2 * p) << shift);
    const double* base1 = row + ((2 * p + 1) << shift);
    for (std::size_t s = 0; s < block; ++s) {
      a += base0[s];
      b += base1[s];
    }
    acc += std::sqrt(a * b);
  }
  return acc;
}

} // namespace

std::size_t u_index(std::span<const std::uint8_t> u) {
  std::size_t v = 0;
  for (std::uint8_t b : u)
    v = (v << 1) | b;
  return v;
}

std::size_t ExactJoint::row_for(std::uint64_t key) {
  const auto [it, inserted] = keys_.try_emplace(key, keys_.size());
  if (inserted)
    table_.resize(table_.size() + (std::size_t{1} << data_length_), 0.0);
  return it->second;
}

ExactJoint::ExactJoint(const GuardLayout& layout, const SourceModel& model, double delta,
                       Conditioning conditioning)
    : conditioning_(conditioning), data_length_(layout.data_length()) {
  const std::size_t big_n = layout.data_length();
  const std::size_t total = layout.total_length();
  if (big_n > kMaxData || total > kMaxCodeword)
    throw std::invalid_argument("ExactJoint: instance exceeds N <= 8, Lambda <= 16");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("ExactJoint: delta must lie in [0,1)");

  const std::size_t block = layout.data_length() >> (layout.n - layout.n0);
  const Segment first = layout.segment_first(), second = layout.segment_second();

  std::vector<double> mask_weight(std::size_t{1} << total);
  for (std::size_t m = 0; m < mask_weight.size(); ++m) {
    const int k = __builtin_popcountll(m);
    mask_weight[m] = std::pow(delta, k) * std::pow(1.0 - delta, static_cast<double>(total) - k);
  }

  for (std::size_t xv = 0; xv < (std::size_t{1} << big_n); ++xv) {
    Bits x(big_n);
    for (std::size_t k = 0; k < big_n; ++k)
      x[k] = (xv >> (big_n - 1 - k)) & 1u;
    double px = 1.0;
    for (std::size_t b = 0; b < big_n / block; ++b)
      px *= model.block_probability(std::span<const std::uint8_t>(x).subspan(b * block, block));
    if (px == 0.0)
      continue;
    const std::size_t ui = u_index(arikan_transform(x));
    if (conditioning == Conditioning::None) {
      table_.resize(std::size_t{1} << big_n, 0.0);
      keys_.try_emplace(0, 0);
      table_[ui] += px;
      continue;
    }
    const Bits g = place_in_layout(layout, x).symbols;
    for (std::size_t m = 0; m < mask_weight.size(); ++m) {
      if (mask_weight[m] == 0.0)
        continue;
      std::uint32_t y = 0, y1 = 0, y2 = 0;
      std::size_t len = 0, len1 = 0, len2 = 0;
      for (std::size_t p = 0; p < total; ++p) {
        if ((m >> p) & 1u)
          continue;
        y = (y << 1) | g[p];
        ++len;
        if (p < first.end) {
          y1 = (y1 << 1) | g[p];
          ++len1;
        } else if (p >= second.begin && second.begin < second.end) {
          y2 = (y2 << 1) | g[p];
          ++len2;
        }
      }
      std::uint64_t key = 0;
      switch (conditioning) {
      case Conditioning::Output:
        key = word_key(y, len);
        break;
      case Conditioning::TrimmedOutput: {
        const auto [b, l] = trim_packed(y, len);
        key = word_key(b, l);
        break;
      }
      case Conditioning::TrimmedHalves: {
        const auto [b1, l1] = trim_packed(y1, len1);
        const auto [b2, l2] = trim_packed(y2, len2);
        key = (word_key(b1, l1) << 24) | word_key(b2, l2);
        break;
      }
      case Conditioning::None:
        break;
      }
      const std::size_t row = row_for(key);
      table_[(row << big_n) + ui] += px * mask_weight[m];
    }
  }
}

double ExactJoint::total() const {
  return std::accumulate(table_.begin(), table_.end(), 0.0);
}

double ExactJoint::bhattacharyya(std::size_t i) const {
  if (i < 1 || i > data_length_)
    throw std::out_of_range("bhattacharyya: index out of range");
  double acc = 0.0;
  const std::size_t width = std::size_t{1} << data_length_;
  for (std::size_t r = 0; r < keys_.size(); ++r)
    acc += sum_bhattacharyya_row(table_.data() + r * width, data_length_, i);
  return 2.0 * acc;
}

std::vector<double> ExactJoint::bhattacharyya_all() const {
  std::vector<double> z(data_length_);
  for (std::size_t i = 1; i <= data_length_; ++i)
    z[i - 1] = bhattacharyya(i);
  return z;
}

std::vector<double> ExactJoint::joint_with_output(std::span<const std::uint8_t> y) const {
  if (conditioning_ != Conditioning::Output)
    throw std::logic_error("joint_with_output: table is not conditioned on Y");
  const std::size_t width = std::size_t{1} << data_length_;
  std::vector<double> out(width, 0.0);
  if (y.size() > kMaxCodeword)
    return out;
  const auto it = keys_.find(word_key(y));
  if (it == keys_.end())
    return out;
  std::copy_n(table_.begin() + static_cast<std::ptrdiff_t>(it->second * width), width,
              out.begin());
  return out;
}

double exact_bhattacharyya(int n, int n0, double xi, double delta, const SourceModel& model,
                           std::size_t i, Conditioning conditioning) {
  const ExactJoint joint(make_guard_layout(n, n0, xi), model, delta, conditioning);
  return joint.bhattacharyya(i);
}

std::vector<SingleStepReport> verify_single_step_all(int n, int n0, double xi, double delta,
                                                     const SourceModel& model) {
  if (n <= n0)
    throw std::invalid_argument("verify_single_step: need n > n0");
  const GuardLayout layout = make_guard_layout(n, n0, xi);
  const GuardLayout half = make_guard_layout(n - 1, n0, xi);
  const ExactJoint trimmed(layout, model, delta, Conditioning::TrimmedOutput);
  const ExactJoint halves(layout, model, delta, Conditioning::TrimmedHalves);
  const ExactJoint small(half, model, delta, Conditioning::TrimmedOutput);

  const double big_n = static_cast<double>(layout.data_length());
  const double penalty = std::exp2(-std::pow(big_n, 2.0 / 3.0));
  std::vector<SingleStepReport> out;
  for (std::size_t i = 1; i <= layout.data_length(); ++i) {
    SingleStepReport r;
    r.i = i;
    r.j = (i + 1) / 2;
    r.plus = ((i - 1) & 1u) == 1;
    r.z_trimmed = trimmed.bhattacharyya(i);
    r.z_halves = halves.bhattacharyya(i);
    r.z_half = small.bhattacharyya(r.j);
    r.penalty = penalty;
    r.slack_first = 1.5 * big_n * r.z_halves + penalty - r.z_trimmed;
    const double step = r.plus ? r.z_half * r.z_half : 2.0 * r.z_half;
    r.slack_second = 1.5 * big_n * step + penalty - r.z_trimmed;
    r.first_holds = r.slack_first >= 0.0;
    r.second_holds = r.slack_second >= 0.0;
    if (r.plus) {
      r.split_gap = std::abs(r.z_halves - r.z_half * r.z_half);
      r.split_holds = r.split_gap <= 1e-12;
    } else {
      r.split_gap = r.z_halves - 2.0 * r.z_half;
      r.split_holds = r.split_gap <= 1e-12;
    }
    out.push_back(r);
  }
  return out;
}

SingleStepReport verify_single_step(int n, int n0, double xi, double delta,
                                    const SourceModel& model, std::size_t i) {
  const std::vector<SingleStepReport> all = verify_single_step_all(n, n0, xi, delta, model);
  if (i < 1 || i > all.size())
    throw std::out_of_range("verify_single_step: index out of range");
  return all[i - 1];
}

std::vector<DegradationReport> verify_degradation_all(int n, int n0, double xi, double delta,
                                                      const SourceModel& model) {
  const GuardLayout layout = make_guard_layout(n, n0, xi);
  const ExactJoint output(layout, model, delta, Conditioning::Output);
  const ExactJoint trimmed(layout, model, delta, Conditioning::TrimmedOutput);
  std::vector<DegradationReport> out;
  for (std::size_t i = 1; i <= layout.data_length(); ++i) {
    DegradationReport r;
    r.i = i;
    r.z_output = output.bhattacharyya(i);
    r.z_trimmed = trimmed.bhattacharyya(i);
    r.holds = r.z_output <= r.z_trimmed + 1e-12;
    out.push_back(r);
  }
  return out;
}

bool verify_degradation(int n, int n0, double xi, double delta, const SourceModel& model,
                        std::size_t i) {
  const std::vector<DegradationReport> all = verify_degradation_all(n, n0, xi, delta, model);
  if (i < 1 || i > all.size())
    throw std::out_of_range("verify_degradation: index out of range");
  return all[i - 1].holds;
}

namespace {

using Continuation = std::function<void(const Bits&)>;

// Visits every decision path of the source trellis once. At the leaf of
// index i each distinct past is met exactly once.
void enumerate_paths(const Trellis& t, std::size_t first_index, std::vector<double>& k_sum,
                     const Continuation& cont) {
  if (t.section_count() == 1) {
    const double w0 = std::exp(leaf_log_weight(t, 0));
    const double w1 = std::exp(leaf_log_weight(t, 1));
    k_sum[first_index - 1] += std::abs(w0 - w1);
    if (w0 > 0.0)
      cont(Bits{0});
    if (w1 > 0.0)
      cont(Bits{1});
    return;
  }
  const std::size_t half = t.section_count() / 2;
  const Trellis minus = minus_transform(t);
  enumerate_paths(minus, first_index, k_sum, [&](const Bits& a) {
    const Trellis plus = plus_transform(t, a);
    enumerate_paths(plus, first_index + half, k_sum, [&](const Bits& b) {
      Bits labels(2 * a.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        labels[2 * k] = a[k] ^ b[k];
        labels[2 * k + 1] = b[k];
      }
      cont(labels);
    });
  });
}

} // namespace

std::vector<double> exact_total_variation_all(const SourceModel& model, int n, int n0) {
  if (n > 4)
    throw std::invalid_argument("exact_total_variation: limited to N <= 16");
  std::vector<double> k(std::size_t{1} << n, 0.0);
  enumerate_paths(build_source_trellis(n, n0, model), 1, k, [](const Bits&) {});
  return k;
}

double exact_total_variation(const SourceModel& model, int n, int n0, std::size_t i) {
  const std::vector<double> k = exact_total_variation_all(model, n, n0);
  if (i < 1 || i > k.size())
    throw std::out_of_range("exact_total_variation: index out of range");
  return k[i - 1];
}

namespace {

// Trials are grouped in fixed chunks summed in chunk order; the result
// does not depend on the number of workers.
constexpr std::size_t kChunk = 64;

struct Moments {
  std::vector<double> sum, sum_sq;
  std::vector<std::size_t> clamped;
  explicit Moments(std::size_t len) : sum(len, 0.0), sum_sq(len, 0.0), clamped(len, 0) {}
  void add(const Moments& o) {
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += o.sum[k];
      sum_sq[k] += o.sum_sq[k];
      clamped[k] += o.clamped[k];
    }
  }
};

template <typename Trial>
McEstimate run_chunks(std::size_t len, const McOptions& options, Trial&& trial) {
  if (options.trials < 1)
    throw std::invalid_argument("Monte-Carlo estimate needs at least one trial");
  const std::size_t chunks = (options.trials + kChunk - 1) / kChunk;
  std::vector<Moments> parts(chunks, Moments(len));
  parallel_for(chunks, options.workers, [&](std::size_t c) {
    const std::size_t end = std::min(options.trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t) {
      Rng rng(derive_trial_seed(options.seed, options.label, t));
      trial(rng, parts[c]);
    }
  });
  Moments total(len);
  for (const Moments& p : parts)
    total.add(p);
  McEstimate est;
  est.trials = options.trials;
  est.mean.resize(len);
  est.std_error.resize(len);
  est.clamped = total.clamped;
  const double t = static_cast<double>(options.trials);
  for (std::size_t k = 0; k < len; ++k) {
    est.mean[k] = total.sum[k] / t;
    const double var =
        options.trials > 1 ? std::max(0.0, (total.sum_sq[k] - t * est.mean[k] * est.mean[k]) / (t - 1.0))
                           : 0.0;
    est.std_error[k] = std::sqrt(var / t);
  }
  return est;
}

} // namespace

McEstimate mc_bhattacharyya_all(const GuardLayout& layout, const SourceModel& model,
                                double delta, const McOptions& options) {
  const std::size_t big_n = layout.data_length();
  return run_chunks(big_n, options, [&](Rng& rng, Moments& acc) {
    const BlockedInput x = sample_blocked_input(model, layout.n, layout.n0, rng);
    const ChannelTrace trace = transmit(place_in_layout(layout, x.bits), delta, rng);
    const Bits u = arikan_transform(x.bits);
    std::vector<Trellis> lanes;
    lanes.push_back(build_base_trellis(trace.y, layout, model, delta));
    run_successive_cancellation(
        std::move(lanes), [&](std::size_t i, std::span<const LeafValues> v) -> std::uint8_t {
          const std::uint8_t truth = u[i - 1];
          const double l_true = truth ? v[0].log_w1 : v[0].log_w0;
          const double l_other = truth ? v[0].log_w0 : v[0].log_w1;
          double s = 0.0;
          if (l_true == -std::numeric_limits<double>::infinity()) {
            s = options.clamp_cap;
            ++acc.clamped[i - 1];
          } else {
            s = std::min(options.clamp_cap, std::exp(0.5 * (l_other - l_true)));
          }
          acc.sum[i - 1] += s;
          acc.sum_sq[i - 1] += s * s;
          return truth;
        });
  });
}

double mc_bhattacharyya(const GuardLayout& layout, const SourceModel& model, double delta,
                        std::size_t i, const McOptions& options) {
  if (i < 1 || i > layout.data_length())
    throw std::out_of_range("mc_bhattacharyya: index out of range");
  return mc_bhattacharyya_all(layout, model, delta, options).mean[i - 1];
}

std::vector<double> mc_total_variation_all(const SourceModel& model, int n, int n0,
                                           const McOptions& options) {
  const std::size_t big_n = std::size_t{1} << n;
  const Trellis base = build_source_trellis(n, n0, model);
  return run_chunks(big_n, options, [&](Rng& rng, Moments& acc) {
    const BlockedInput x = sample_blocked_input(model, n, n0, rng);
    const Bits u = arikan_transform(x.bits);
    run_successive_cancellation({base},
                                [&](std::size_t i, std::span<const LeafValues> v) -> std::uint8_t {
                                  const double p1 = v[0].posterior_one();
                                  const double d = std::abs(1.0 - 2.0 * p1);
                                  acc.sum[i - 1] += d;
                                  acc.sum_sq[i - 1] += d * d;
                                  return u[i - 1];
                                });
  })
      .mean;
}

DesignResult design_frozen_set(const GuardLayout& layout, const SourceModel& model,
                               double delta, const DesignOptions& options) {
  if (!(options.rate > 0.0 && options.rate <= 1.0))
    throw std::invalid_argument("design_frozen_set: rate must lie in (0,1]");
  const std::size_t big_n = layout.data_length();

  McOptions mc;
  mc.trials = options.design_trials;
  mc.seed = options.seed;
  mc.label = "design";
  mc.workers = options.workers;
  mc.clamp_cap = options.clamp_cap;
  const McEstimate z = mc_bhattacharyya_all(layout, model, delta, mc);

  DesignResult result;
  std::vector<double> k(big_n, 0.0);
  if (model.kind() != SourceKind::UniformIID) {
    if (big_n <= 16) {
      k = exact_total_variation_all(model, layout.n, layout.n0);
    } else {
      McOptions kmc = mc;
      kmc.label = "design-k";
      k = mc_total_variation_all(model, layout.n, layout.n0, kmc);
      result.k_exact = false;
    }
  }

  FrozenSpec& spec = result.spec;
  spec.classes.assign(big_n, BitClass::Frozen);
  spec.frozen_values.assign(big_n, 0);
  spec.z_estimates = z.mean;
  spec.k_values = k;
  spec.k_threshold = options.k_threshold;
  spec.rate = options.rate;
  result.z_std_error = z.std_error;
  result.clamped = std::accumulate(z.clamped.begin(), z.clamped.end(), std::size_t{0});

  std::vector<std::size_t> candidates;
  for (std::size_t idx = 0; idx < big_n; ++idx) {
    if (k[idx] >= options.k_threshold)
      spec.classes[idx] = BitClass::Shaped;
    else
      candidates.push_back(idx);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return z.mean[a] < z.mean[b]; });
  const auto wanted =
      static_cast<std::size_t>(std::llround(options.rate * static_cast<double>(big_n)));
  const std::size_t take = std::min(wanted, candidates.size());
  for (std::size_t r = 0; r < take; ++r)
    spec.classes[candidates[r]] = BitClass::Info;
  return result;
}

} // namespace delpolar

#include "delpolar/channels.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace delpolar {

namespace mp = boost::multiprecision;

TrimResult trim(std::span<const std::uint8_t> y) {
  std::size_t first = 0;
  while (first < y.size() && y[first] == 0)
    ++first;
  if (first == y.size())
    return {Bits{}, y.size(), 0};
  std::size_t last = y.size();
  while (y[last - 1] == 0)
    --last;
  return {Bits(y.begin() + static_cast<std::ptrdiff_t>(first),
               y.begin() + static_cast<std::ptrdiff_t>(last)),
          first, y.size() - last};
}

Bits ChannelTrace::y_slice(Segment s) const {
  return Bits(y.begin() + static_cast<std::ptrdiff_t>(s.begin),
              y.begin() + static_cast<std::ptrdiff_t>(s.end));
}

namespace {

Segment intersect(Segment a, Segment b) {
  const std::size_t lo = std::max(a.begin, b.begin);
  const std::size_t hi = std::min(a.end, b.end);
  return lo < hi ? Segment{lo, hi} : Segment{lo, lo};
}

// Range of received positions whose origin lies in seg.
Segment received_range(const std::vector<std::size_t>& origin, Segment seg) {
  const auto lo = std::lower_bound(origin.begin(), origin.end(), seg.begin);
  const auto hi = std::lower_bound(origin.begin(), origin.end(), seg.end);
  return {static_cast<std::size_t>(lo - origin.begin()),
          static_cast<std::size_t>(hi - origin.begin())};
}

} // namespace

ChannelTrace apply_deletions(const GuardedWord& g, DeletionPattern pattern) {
  std::sort(pattern.deleted.begin(), pattern.deleted.end());
  pattern.deleted.erase(std::unique(pattern.deleted.begin(), pattern.deleted.end()),
                        pattern.deleted.end());
  if (!pattern.deleted.empty() && pattern.deleted.back() >= g.length())
    throw std::out_of_range("deletion pattern index outside the codeword");

  ChannelTrace t;
  t.codeword_length = g.length();
  t.n = g.layout.n;
  t.has_outer_guard = g.layout.has_outer_guard();
  std::size_t next = 0;
  for (std::size_t p = 0; p < g.length(); ++p) {
    if (next < pattern.deleted.size() && pattern.deleted[next] == p) {
      ++next;
      continue;
    }
    t.y.push_back(g.symbols[p]);
    t.y_provenance.push_back(g.layout.provenance[p]);
    t.y_origin.push_back(p);
  }
  t.pattern = std::move(pattern);

  TrimResult tr = trim(t.y);
  t.y_star = std::move(tr.y_star);
  t.left_cut = tr.left_cut;
  t.right_cut = tr.right_cut;

  t.g_first = g.layout.segment_first();
  t.g_guard = g.layout.segment_guard();
  t.g_second = g.layout.segment_second();
  t.y_first = received_range(t.y_origin, t.g_first);
  t.y_guard = received_range(t.y_origin, t.g_guard);
  t.y_second = received_range(t.y_origin, t.g_second);

  const Segment z_all{t.left_cut, t.y.size() - t.right_cut};
  t.z_first = intersect(t.y_first, z_all);
  t.z_guard = intersect(t.y_guard, z_all);
  t.z_second = intersect(t.y_second, z_all);

  t.alpha = t.g_first.size() - t.y_first.size();
  t.beta = t.g_guard.size() - t.y_guard.size();
  t.gamma = t.g_second.size() - t.y_second.size();
  t.alpha_t = t.y_first.size() - t.z_first.size();
  t.beta_t = t.y_guard.size() - t.z_guard.size();
  t.gamma_t = t.y_second.size() - t.z_second.size();

  t.z_star_first = trim(t.y_slice(t.z_first)).y_star;
  t.z_star_second = trim(t.y_slice(t.z_second)).y_star;
  t.l0 = t.y_star.size() - t.z_star_first.size() - t.z_star_second.size();

  const std::size_t z_len = t.y_star.size();
  t.i_mid = z_len == 0 ? 0 : (z_len + 1) / 2;
  t.z_left.assign(t.y_star.begin(), t.y_star.begin() + static_cast<std::ptrdiff_t>(t.i_mid));
  t.z_right.assign(t.y_star.begin() + static_cast<std::ptrdiff_t>(t.i_mid), t.y_star.end());
  return t;
}

ChannelTrace transmit(const GuardedWord& g, double delta, Rng& rng) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("transmit: delta must lie in [0,1)");
  DeletionPattern pattern;
  pattern.delta = delta;
  for (std::size_t p = 0; p < g.length(); ++p)
    if (rng.bernoulli(delta))
      pattern.deleted.push_back(p);
  return apply_deletions(g, std::move(pattern));
}

bool gbm_event(const ChannelTrace& trace) {
  if (!trace.has_outer_guard || trace.y_star.empty())
    return false;
  const std::size_t pos = trace.left_cut + trace.i_mid - 1;
  return pos >= trace.z_guard.begin && pos < trace.z_guard.end;
}

EventRecord classify_events(const ChannelTrace& trace) {
  if (!trace.has_outer_guard)
    throw std::logic_error("classify_events: the word has no outermost guard band");
  using Q = mp::cpp_rational;
  const Q delta(trace.pattern.delta);
  const Q l_hat = (Q(1) - delta) * Q(trace.g_guard.size()) / 4;
  const auto near_mean = [&](std::size_t count, std::size_t len) {
    const Q mean = delta * Q(len);
    const Q v(count);
    return mean - l_hat < v && v < mean + l_hat;
  };

  EventRecord r;
  r.alpha = trace.alpha;
  r.beta = trace.beta;
  r.gamma = trace.gamma;
  r.alpha_t = trace.alpha_t;
  r.beta_t = trace.beta_t;
  r.gamma_t = trace.gamma_t;
  r.a = near_mean(trace.alpha, trace.g_first.size());
  r.a_t = Q(trace.alpha_t) < l_hat;
  r.b = Q(trace.beta) < delta * Q(trace.g_guard.size()) + l_hat;
  r.b_t = trace.beta_t == 0;
  r.c = near_mean(trace.gamma, trace.g_second.size());
  r.c_t = Q(trace.gamma_t) < l_hat;
  return r;
}

bool check_gbm_implication(const ChannelTrace& trace) {
  if (!trace.has_outer_guard)
    return true;
  const EventRecord e = classify_events(trace);
  const bool antecedent = e.a && e.a_t && e.b && e.c && e.c_t;
  return !antecedent || gbm_event(trace);
}

double gbm_constant_d(double delta, int tau, double p0) {
  return (1.0 / (2.0 * tau)) * std::log(1.0 / (p0 * (1.0 - delta) + delta)) * (1.0 - delta) /
         32.0;
}

double gbm_m_threshold(double xi, double delta, double d) {
  if (xi >= 1.0 / 6.0)
    return std::numeric_limits<double>::infinity();
  const double s = (1.0 - delta) * (1.0 - delta);
  const double m1 = std::log2(s / (128.0 * d)) / xi;
  const double m2 =
      std::log2(128.0 * std::log2(5.0) / (s * (std::log2(std::exp(1.0)) - 1.0))) / (1.0 - 2.0 * xi);
  const double m3 = std::log2(256.0 / s) / (1.0 - 2.0 * xi - 2.0 / 3.0);
  return std::max({m1, m2, m3});
}

GbmBound gbm_bound(int n, int n0, double xi, double delta, const SourceModel& model) {
  if (n < n0 || n0 < 0)
    throw std::invalid_argument("gbm_bound: need n >= n0 >= 0");
  const double s = (1.0 - delta) * (1.0 - delta);
  GbmBound b;
  b.p_not_a = 2.0 * std::exp(-(s / 128.0) * std::exp2((1.0 - 2.0 * xi) * n));
  b.p_not_b = 2.0 * std::exp(-(s / 32.0) * std::exp2((1.0 - xi) * n));
  b.d = gbm_constant_d(delta, model.tau(), model.p0());
  b.p_not_a_t = std::exp(-b.d * std::exp2((1.0 - xi) * n));
  b.total = 2.0 * b.p_not_a + 2.0 * b.p_not_a_t + b.p_not_b;
  b.m_threshold = gbm_m_threshold(xi, delta, b.d);
  return b;
}

} // namespace delpolar

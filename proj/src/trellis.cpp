#include "delpolar/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace delpolar {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Boundary make_boundary(std::size_t pos, std::size_t received, std::size_t deletions,
                       std::size_t states) {
  Boundary b;
  b.pos = pos;
  b.lo = pos > received ? pos - received : 0;
  b.hi = std::min(pos, deletions);
  b.states = states;
  return b;
}

// c += a * b for banded boundary matrices.
void accumulate_product(const std::vector<double>& a, const Boundary& b0, const Boundary& b1,
                        const std::vector<double>& b, const Boundary& b2, std::vector<double>& c,
                        std::uint64_t* ops) {
  const std::size_t v1 = b1.vertices(), v2 = b2.vertices();
  const std::size_t span1 = b1.pos - b0.pos, span2 = b2.pos - b1.pos;
  std::uint64_t count = 0;
  for (std::size_t e0 = b0.lo; e0 <= b0.hi; ++e0) {
    const std::size_t e1_lo = std::max(e0, b1.lo);
    const std::size_t e1_hi = std::min(e0 + span1, b1.hi);
    for (std::size_t s0 = 0; s0 < b0.states; ++s0) {
      const std::size_t row = (e0 - b0.lo) * b0.states + s0;
      const double* arow = a.data() + row * v1;
      double* crow = c.data() + row * v2;
      for (std::size_t e1 = e1_lo; e1 <= e1_hi && e1_lo <= e1_hi; ++e1) {
        const std::size_t e2_lo = std::max(e1, b2.lo);
        const std::size_t e2_hi = std::min(e1 + span2, b2.hi);
        if (e2_lo > e2_hi)
          continue;
        const std::size_t k_lo = (e2_lo - b2.lo) * b2.states;
        const std::size_t k_hi = (e2_hi - b2.lo + 1) * b2.states;
        for (std::size_t s1 = 0; s1 < b1.states; ++s1) {
          const std::size_t mid = (e1 - b1.lo) * b1.states + s1;
          const double av = arow[mid];
          if (av == 0.0)
            continue;
          const double* brow = b.data() + mid * v2;
          for (std::size_t k = k_lo; k < k_hi; ++k)
            crow[k] += av * brow[k];
          count += k_hi - k_lo;
        }
      }
    }
  }
  if (ops)
    *ops += count;
}

std::vector<double> product(const std::vector<double>& a, const Boundary& b0, const Boundary& b1,
                            const std::vector<double>& b, const Boundary& b2,
                            std::uint64_t* ops) {
  std::vector<double> c(b0.vertices() * b2.vertices(), 0.0);
  accumulate_product(a, b0, b1, b, b2, c, ops);
  return c;
}

// Divides by the largest entry and returns its log (or -inf when all zero).
double normalize(std::span<std::vector<double>* const> mats) {
  double peak = 0.0;
  for (const std::vector<double>* m : mats)
    for (double v : *m)
      peak = std::max(peak, v);
  if (peak == 0.0)
    return kNegInf;
  const double inv = 1.0 / peak;
  for (std::vector<double>* m : mats)
    for (double& v : *m)
      v *= inv;
  return std::log(peak);
}

double normalize_section(DataSection& s) {
  std::array<std::vector<double>*, 2> mats{&s.w[0], &s.w[1]};
  return normalize(mats);
}

bool block_start(std::size_t k, std::size_t block) { return k % block == 0; }

} // namespace

ChainWeights ChainWeights::from(const SourceModel& model) {
  ChainWeights c;
  if (model.is_memoryless()) {
    const double q1 = model.one_probability();
    c.states = 1;
    c.start = {std::vector<double>{1.0 - q1}, std::vector<double>{q1}};
    c.step = c.start;
    return c;
  }
  const std::size_t k = model.state_count();
  c.states = k;
  for (int b = 0; b < 2; ++b) {
    c.start[b].assign(k, 0.0);
    c.step[b].assign(k * k, 0.0);
  }
  for (std::size_t t = 0; t < k; ++t) {
    const std::uint8_t b = model.emit(t);
    c.start[b][t] = model.initial()[t];
    for (std::size_t s = 0; s < k; ++s)
      c.step[b][s * k + t] = model.transition(s, t);
  }
  return c;
}

std::size_t Trellis::guard_count() const {
  return static_cast<std::size_t>(
      std::count_if(guards.begin(), guards.end(), [](const GuardSection& g) { return g.present; }));
}

namespace {

// Source weight of one data symbol from entry state s to exit state t.
// Exit state count 1 means the block ends here and the state is summed out.
double chain_weight(const ChainWeights& chain, std::uint8_t b, bool starts, bool ends,
                    std::size_t s, std::size_t t) {
  const std::size_t k = chain.states;
  if (!ends) {
    return starts ? chain.start[b][t] : chain.step[b][s * k + t];
  }
  double sum = 0.0;
  for (std::size_t u = 0; u < k; ++u)
    sum += starts ? chain.start[b][u] : chain.step[b][s * k + u];
  return sum;
}

GuardSection make_guard(std::size_t pos, std::size_t len, std::span<const std::uint8_t> y,
                        const std::vector<std::size_t>& zero_run, std::size_t deletions,
                        double delta) {
  GuardSection g;
  g.present = true;
  g.in = make_boundary(pos, y.size(), deletions, 1);
  g.out = make_boundary(pos + len, y.size(), deletions, 1);
  const std::size_t cols = g.out.vertices();
  g.m.assign(g.in.vertices() * cols, 0.0);

  const double log_delta = delta > 0.0 ? std::log(delta) : kNegInf;
  const double log_keep = std::log1p(-delta);
  const double log_fact_len = std::lgamma(static_cast<double>(len) + 1.0);
  std::vector<double> logs(g.m.size(), kNegInf);
  double peak = kNegInf;
  for (std::size_t e = g.in.lo; e <= g.in.hi; ++e) {
    const std::size_t d = pos - e; // received symbols consumed so far
    const std::size_t hi = std::min(e + len, g.out.hi);
    for (std::size_t e2 = std::max(e, g.out.lo); e2 <= hi; ++e2) {
      const std::size_t j = e2 - e;   // deleted guard symbols
      const std::size_t kept = len - j;
      if (zero_run[d] < kept)
        continue;
      if (j > 0 && delta == 0.0)
        continue;
      double lw = log_fact_len - std::lgamma(static_cast<double>(j) + 1.0) -
                  std::lgamma(static_cast<double>(kept) + 1.0) +
                  static_cast<double>(kept) * log_keep;
      if (j > 0)
        lw += static_cast<double>(j) * log_delta;
      logs[(e - g.in.lo) * cols + (e2 - g.out.lo)] = lw;
      peak = std::max(peak, lw);
    }
  }
  if (peak == kNegInf) {
    g.log_scale = kNegInf;
    return g;
  }
  for (std::size_t i = 0; i < logs.size(); ++i)
    if (logs[i] != kNegInf)
      g.m[i] = std::exp(logs[i] - peak);
  g.log_scale = peak;
  return g;
}

} // namespace

Trellis build_base_trellis(std::span<const std::uint8_t> y, const GuardLayout& layout,
                           const SourceModel& model, double delta, std::uint64_t* ops) {
  const std::size_t total = layout.total_length();
  if (y.size() > total)
    throw std::invalid_argument("build_base_trellis: received word longer than codeword");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("build_base_trellis: delta must lie in [0,1)");

  const ChainWeights chain = ChainWeights::from(model);
  const std::size_t deletions = total - y.size();
  const std::size_t n_data = layout.data_length();
  const std::size_t block = std::size_t{1} << layout.n0;

  std::vector<std::size_t> zero_run(y.size() + 1, 0);
  for (std::size_t d = y.size(); d-- > 0;)
    zero_run[d] = y[d] == 0 ? zero_run[d + 1] + 1 : 0;

  Trellis t;
  t.n = layout.n;
  t.n0 = layout.n0;
  t.sections.reserve(n_data);
  t.guards.resize(n_data > 0 ? n_data - 1 : 0);

  std::size_t guard_cursor = 0;
  std::uint64_t count = 0;
  for (std::size_t k = 0; k < n_data; ++k) {
    const std::size_t pos = layout.data_positions[k];
    const bool starts = block_start(k, block);
    const bool ends = block_start(k + 1, block);
    DataSection s;
    s.in = make_boundary(pos, y.size(), deletions, starts ? 1 : chain.states);
    s.out = make_boundary(pos + 1, y.size(), deletions, ends ? 1 : chain.states);
    const std::size_t cols = s.out.vertices();
    for (int b = 0; b < 2; ++b)
      s.w[b].assign(s.in.vertices() * cols, 0.0);
    for (std::size_t e = s.in.lo; e <= s.in.hi; ++e) {
      const std::size_t d = pos - e;
      for (std::size_t si = 0; si < s.in.states; ++si) {
        const std::size_t row = (e - s.in.lo) * s.in.states + si;
        for (std::size_t so = 0; so < s.out.states; ++so) {
          for (std::uint8_t b = 0; b < 2; ++b) {
            const double tw = chain_weight(chain, b, starts, ends, si, so);
            if (tw == 0.0)
              continue;
            if (e + 1 >= s.out.lo && e + 1 <= s.out.hi && delta > 0.0) {
              s.w[b][row * cols + (e + 1 - s.out.lo) * s.out.states + so] += tw * delta;
              ++count;
            }
            if (e >= s.out.lo && e <= s.out.hi && d < y.size() && y[d] == b) {
              s.w[b][row * cols + (e - s.out.lo) * s.out.states + so] += tw * (1.0 - delta);
              ++count;
            }
          }
        }
      }
    }
    s.log_scale = normalize_section(s);
    t.sections.push_back(std::move(s));

    if (k + 1 < n_data && ends) {
      const GuardRun& run = layout.guards[guard_cursor++];
      t.guards[k] = make_guard(run.start, run.length, y, zero_run, deletions, delta);
    }
  }
  if (ops)
    *ops += count;
  return t;
}

Trellis build_source_trellis(int n, int n0, const SourceModel& model) {
  if (n0 < 0 || n < n0)
    throw std::invalid_argument("build_source_trellis: need n >= n0 >= 0");
  const ChainWeights chain = ChainWeights::from(model);
  const std::size_t n_data = std::size_t{1} << n;
  const std::size_t block = std::size_t{1} << n0;
  Trellis t;
  t.n = n;
  t.n0 = n0;
  t.sections.reserve(n_data);
  t.guards.resize(n_data - 1);
  for (std::size_t k = 0; k < n_data; ++k) {
    const bool starts = block_start(k, block);
    const bool ends = block_start(k + 1, block);
    DataSection s;
    s.in = {k, 0, 0, starts ? 1 : chain.states};
    s.out = {k + 1, 0, 0, ends ? 1 : chain.states};
    const std::size_t cols = s.out.vertices();
    for (std::uint8_t b = 0; b < 2; ++b) {
      s.w[b].assign(s.in.vertices() * cols, 0.0);
      for (std::size_t si = 0; si < s.in.states; ++si)
        for (std::size_t so = 0; so < s.out.states; ++so)
          s.w[b][si * cols + so] = chain_weight(chain, b, starts, ends, si, so);
    }
    s.log_scale = normalize_section(s);
    t.sections.push_back(std::move(s));
  }
  return t;
}

namespace {

// Left section of a pair with the guard between the pair folded in.
std::array<std::vector<double>, 2> fold_guard(const DataSection& left, const GuardSection& guard,
                                              Boundary& exit, std::uint64_t* ops) {
  if (!guard.present) {
    exit = left.out;
    return left.w;
  }
  exit = guard.out;
  return {product(left.w[0], left.in, left.out, guard.m, guard.out, ops),
          product(left.w[1], left.in, left.out, guard.m, guard.out, ops)};
}

template <typename Merge>
Trellis merge_pairs(const Trellis& t, Merge&& merge, std::uint64_t* ops) {
  if (t.sections.size() < 2)
    throw std::logic_error("trellis transform: already at full depth");
  const std::size_t pairs = t.sections.size() / 2;
  Trellis out;
  out.n = t.n;
  out.n0 = t.n0;
  out.depth = t.depth + 1;
  out.sections.resize(pairs);
  out.guards.resize(pairs - 1);
  for (std::size_t k = 0; k < pairs; ++k) {
    const DataSection& left = t.sections[2 * k];
    const DataSection& right = t.sections[2 * k + 1];
    const GuardSection& guard = t.guards[2 * k];
    Boundary mid;
    const std::array<std::vector<double>, 2> lw = fold_guard(left, guard, mid, ops);
    DataSection& s = out.sections[k];
    s.in = left.in;
    s.out = right.out;
    for (int b = 0; b < 2; ++b)
      s.w[b].assign(s.in.vertices() * s.out.vertices(), 0.0);
    merge(k, lw, left.in, mid, right, s, ops);
    const double g_scale = guard.present ? guard.log_scale : 0.0;
    s.log_scale = normalize_section(s) + left.log_scale + g_scale + right.log_scale;
    if (k + 1 < pairs)
      out.guards[k] = t.guards[2 * k + 1];
  }
  return out;
}

} // namespace

Trellis minus_transform(const Trellis& t, std::uint64_t* ops) {
  return merge_pairs(
      t,
      [](std::size_t, const std::array<std::vector<double>, 2>& lw, const Boundary& in,
         const Boundary& mid, const DataSection& right, DataSection& s, std::uint64_t* c) {
        for (std::uint8_t u = 0; u < 2; ++u)
          for (std::uint8_t w = 0; w < 2; ++w)
            accumulate_product(lw[u ^ w], in, mid, right.w[w], right.out, s.w[u], c);
      },
      ops);
}

Trellis plus_transform(const Trellis& t, std::span<const std::uint8_t> decided,
                       std::uint64_t* ops) {
  if (decided.size() != t.sections.size() / 2)
    throw std::logic_error("plus_transform: one decided label per merged pair is required");
  return merge_pairs(
      t,
      [decided](std::size_t k, const std::array<std::vector<double>, 2>& lw, const Boundary& in,
                const Boundary& mid, const DataSection& right, DataSection& s, std::uint64_t* c) {
        const std::uint8_t u = decided[k] & 1u;
        for (std::uint8_t w = 0; w < 2; ++w)
          accumulate_product(lw[u ^ w], in, mid, right.w[w], right.out, s.w[w], c);
      },
      ops);
}

double log_total_weight(const Trellis& t) {
  std::vector<double> v(t.sections.front().in.vertices(), 1.0);
  double log_acc = 0.0;
  const auto step = [&](const std::vector<double>& m, const Boundary& out) {
    std::vector<double> next(out.vertices(), 0.0);
    const std::vector<double> row_vec = v;
    const std::size_t cols = out.vertices();
    for (std::size_t i = 0; i < row_vec.size(); ++i) {
      if (row_vec[i] == 0.0)
        continue;
      for (std::size_t j = 0; j < cols; ++j)
        next[j] += row_vec[i] * m[i * cols + j];
    }
    double peak = 0.0;
    for (double x : next)
      peak = std::max(peak, x);
    if (peak == 0.0) {
      log_acc = kNegInf;
      v.assign(next.size(), 0.0);
    } else {
      for (double& x : next)
        x /= peak;
      log_acc += std::log(peak);
      v = std::move(next);
    }
  };
  for (std::size_t k = 0; k < t.sections.size(); ++k) {
    const DataSection& s = t.sections[k];
    std::vector<double> sum(s.w[0].size());
    for (std::size_t i = 0; i < sum.size(); ++i)
      sum[i] = s.w[0][i] + s.w[1][i];
    step(sum, s.out);
    log_acc += s.log_scale;
    if (k < t.guards.size() && t.guards[k].present) {
      step(t.guards[k].m, t.guards[k].out);
      log_acc += t.guards[k].log_scale;
    }
  }
  double total = 0.0;
  for (double x : v)
    total += x;
  return total == 0.0 ? kNegInf : log_acc + std::log(total);
}

double leaf_log_weight(const Trellis& t, std::uint8_t b) {
  if (t.sections.size() != 1)
    throw std::logic_error("leaf_log_weight: trellis is not fully merged");
  const DataSection& s = t.sections.front();
  double sum = 0.0;
  for (double x : s.w[b & 1u])
    sum += x;
  return sum == 0.0 ? kNegInf : std::log(sum) + s.log_scale;
}

} // namespace delpolar

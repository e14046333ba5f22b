#include "delpolar/source.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace delpolar {

namespace {

constexpr double kRowTolerance = 1e-12;

} // namespace

SourceModel SourceModel::uniform() {
  SourceModel m;
  m.kind_ = SourceKind::UniformIID;
  m.transition_ = {0.5, 0.5, 0.5, 0.5};
  m.emit_ = {0, 1};
  m.tau_ = 1;
  m.p0_ = 0.6;
  m.finish();
  return m;
}

SourceModel SourceModel::markov(std::vector<std::vector<double>> transition,
                                std::vector<std::uint8_t> emit, int tau, double p0) {
  const std::size_t k = emit.size();
  if (k == 0)
    throw std::invalid_argument("source: at least one state is required");
  if (transition.size() != k)
    throw std::invalid_argument("source: transition matrix must be |S| x |S|");
  if (tau <= 0)
    throw std::invalid_argument("source: tau must be a positive integer");
  if (!(p0 > 0.0 && p0 < 1.0))
    throw std::invalid_argument("source: p0 must lie in (0,1)");

  SourceModel m;
  m.kind_ = SourceKind::Markov;
  m.transition_.reserve(k * k);
  for (std::size_t s = 0; s < k; ++s) {
    if (transition[s].size() != k)
      throw std::invalid_argument("source: transition matrix must be |S| x |S|");
    double sum = 0.0;
    for (double p : transition[s]) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("source: transition entries must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance)
      throw std::invalid_argument("source: transition row " + std::to_string(s) +
                                  " does not sum to 1");
    m.transition_.insert(m.transition_.end(), transition[s].begin(), transition[s].end());
  }
  for (std::uint8_t b : emit)
    if (b > 1)
      throw std::invalid_argument("source: emitted symbols must be 0 or 1");
  m.emit_ = std::move(emit);
  m.tau_ = tau;
  m.p0_ = p0;

  if (!is_regular(m.transition_, k))
    throw std::invalid_argument("source: transition matrix is not regular");
  m.finish();
  for (std::size_t s = 0; s < k; ++s)
    if (!(m.zero_run_probability(s, tau) < p0))
      throw std::invalid_argument("source: zero-run witness fails from state " +
                                  std::to_string(s));
  return m;
}

void SourceModel::finish() {
  const std::size_t k = state_count();
  initial_ = stationary_distribution(transition_, k);
  memoryless_ = true;
  for (std::size_t s = 1; s < k && memoryless_; ++s)
    for (std::size_t t = 0; t < k; ++t)
      if (transition_[s * k + t] != transition_[t]) {
        memoryless_ = false;
        break;
      }
}

double SourceModel::one_probability() const {
  double q = 0.0;
  for (std::size_t t = 0; t < state_count(); ++t)
    if (emit_[t] == 1)
      q += transition_[t];
  return q;
}

double SourceModel::zero_run_probability(std::size_t state, int len) const {
  const std::size_t k = state_count();
  std::vector<double> v(k, 0.0), next(k);
  v[state] = 1.0;
  for (int step = 0; step < len; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < k; ++s) {
      if (v[s] == 0.0)
        continue;
      for (std::size_t t = 0; t < k; ++t)
        if (emit_[t] == 0)
          next[t] += v[s] * transition_[s * k + t];
    }
    v.swap(next);
  }
  double total = 0.0;
  for (double p : v)
    total += p;
  return total;
}

double SourceModel::block_probability(std::span<const std::uint8_t> block) const {
  const std::size_t k = state_count();
  std::vector<double> v = initial_, next(k);
  for (std::uint8_t b : block) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < k; ++s) {
      if (v[s] == 0.0)
        continue;
      for (std::size_t t = 0; t < k; ++t)
        if (emit_[t] == b)
          next[t] += v[s] * transition_[s * k + t];
    }
    v.swap(next);
  }
  double total = 0.0;
  for (double p : v)
    total += p;
  return total;
}

Bits SourceModel::sample_block(std::size_t len, Rng& rng) const {
  const std::size_t k = state_count();
  Bits out(len);
  std::size_t s = rng.categorical(initial_);
  for (std::size_t j = 0; j < len; ++j) {
    s = rng.categorical(std::span<const double>(transition_.data() + s * k, k));
    out[j] = emit_[s];
  }
  return out;
}

std::vector<double> stationary_distribution(const std::vector<double>& transition,
                                            std::size_t states) {
  std::vector<double> pi(states, 1.0 / static_cast<double>(states)), next(states);
  for (int iter = 0; iter < 1000000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < states; ++s)
      for (std::size_t t = 0; t < states; ++t)
        next[t] += pi[s] * transition[s * states + t];
    double sum = 0.0;
    for (double p : next)
      sum += p;
    double change = 0.0;
    for (std::size_t t = 0; t < states; ++t) {
      next[t] /= sum;
      change += std::abs(next[t] - pi[t]);
    }
    pi.swap(next);
    if (change < 1e-12)
      break;
  }
  return pi;
}

bool is_regular(const std::vector<double>& transition, std::size_t states) {
  // Wielandt: a primitive k x k matrix has a positive power of order at most
  // (k-1)^2 + 1.
  const std::size_t limit = (states - 1) * (states - 1) + 1;
  std::vector<char> base(states * states), power(states * states), next(states * states);
  for (std::size_t i = 0; i < states * states; ++i)
    base[i] = power[i] = transition[i] > 0.0;
  for (std::size_t step = 1;; ++step) {
    bool positive = true;
    for (char c : power)
      positive = positive && c;
    if (positive)
      return true;
    if (step >= limit)
      return false;
    for (std::size_t i = 0; i < states; ++i)
      for (std::size_t j = 0; j < states; ++j) {
        char c = 0;
        for (std::size_t m = 0; m < states && !c; ++m)
          c = power[i * states + m] && base[m * states + j];
        next[i * states + j] = c;
      }
    power.swap(next);
  }
}

std::span<const std::uint8_t> BlockedInput::block(std::size_t b) const {
  if (b < 1 || b > block_count())
    throw std::out_of_range("block index out of range");
  return std::span<const std::uint8_t>(bits).subspan((b - 1) * block_length(),
                                                     block_length());
}

BlockedInput sample_blocked_input(const SourceModel& model, int n, int n0, Rng& rng) {
  if (n0 < 0 || n < n0)
    throw std::invalid_argument("sample_blocked_input: need n >= n0 >= 0");
  BlockedInput x;
  x.n = n;
  x.n0 = n0;
  x.bits.reserve(std::size_t{1} << n);
  for (std::size_t b = 0; b < x.block_count(); ++b) {
    Bits block = model.sample_block(x.block_length(), rng);
    x.bits.insert(x.bits.end(), block.begin(), block.end());
  }
  return x;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::size_t v) {
  if (!is_power_of_two(v))
    throw std::invalid_argument("length is not a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < v)
    ++n;
  return n;
}

namespace {

void transform_into(std::span<const std::uint8_t> v, std::span<std::uint8_t> out) {
  const std::size_t len = v.size();
  if (len == 1) {
    out[0] = v[0];
    return;
  }
  const std::size_t h = len / 2;
  Bits a(h), b(h);
  transform_into(v.first(h), a);
  transform_into(v.subspan(h), b);
  for (std::size_t j = 0; j < h; ++j) {
    out[2 * j] = a[j] ^ b[j];
    out[2 * j + 1] = b[j];
  }
}

} // namespace

Bits arikan_transform(std::span<const std::uint8_t> v) {
  if (!is_power_of_two(v.size()))
    throw std::invalid_argument("arikan_transform: length must be a power of two");
  Bits out(v.size());
  transform_into(v, out);
  return out;
}

std::size_t bit_index(std::span<const std::uint8_t> b) {
  std::size_t i = 0;
  for (std::uint8_t bit : b)
    i = (i << 1) | (bit & 1u);
  return i + 1;
}

Bits index_bits(std::size_t i, int n) {
  Bits b(static_cast<std::size_t>(n));
  std::size_t v = i - 1;
  for (int k = n - 1; k >= 0; --k) {
    b[static_cast<std::size_t>(k)] = v & 1u;
    v >>= 1;
  }
  return b;
}

} // namespace delpolar

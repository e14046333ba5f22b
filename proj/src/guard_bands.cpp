#include "delpolar/guard_bands.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

namespace delpolar {

namespace mp = boost::multiprecision;

std::size_t guard_band_length(int m, double xi) {
  if (m < 1)
    throw std::invalid_argument("guard_band_length: m must be at least 1");
  if (!(xi > 0.0 && xi < 1.0))
    throw std::invalid_argument("guard_band_length: xi must lie in (0,1)");

  // (1 - xi)(m - 1) held exactly.
  const mp::cpp_rational r = (mp::cpp_rational(1) - mp::cpp_rational(xi)) * (m - 1);
  if (mp::denominator(r) == 1) {
    const auto e = static_cast<unsigned>(mp::numerator(r));
    if (e >= 63)
      throw std::overflow_error("guard_band_length: length overflows");
    return std::size_t{1} << e;
  }
  // Non-integer exponent: 2^r is irrational, floor() at 200 bits.
  using Float = mp::number<mp::cpp_bin_float<200, mp::digit_base_2>>;
  const Float exponent = Float(mp::numerator(r)) / Float(mp::denominator(r));
  const Float value = mp::floor(mp::pow(Float(2), exponent));
  if (value >= Float(9.0e18))
    throw std::overflow_error("guard_band_length: length overflows");
  return static_cast<std::size_t>(value.convert_to<unsigned long long>());
}

std::size_t GuardLayout::outer_guard_length() const {
  return has_outer_guard() ? segment_guard().size() : 0;
}

Segment GuardLayout::segment_first() const {
  if (!has_outer_guard())
    return {0, total_length()};
  const GuardRun& g = guards[guards.size() / 2];
  return {0, g.start};
}

Segment GuardLayout::segment_guard() const {
  if (!has_outer_guard())
    return {total_length(), total_length()};
  const GuardRun& g = guards[guards.size() / 2];
  return {g.start, g.start + g.length};
}

Segment GuardLayout::segment_second() const {
  if (!has_outer_guard())
    return {total_length(), total_length()};
  const GuardRun& g = guards[guards.size() / 2];
  return {g.start + g.length, total_length()};
}

namespace {

void build(int level, int n0, const std::vector<std::size_t>& lengths, int& next_block,
           GuardLayout& out) {
  if (level <= n0) {
    const std::size_t len = std::size_t{1} << level;
    const int id = next_block++;
    for (std::size_t k = 0; k < len; ++k) {
      out.data_positions.push_back(out.provenance.size());
      out.provenance.push_back({Provenance::Kind::Block, id});
    }
    return;
  }
  build(level - 1, n0, lengths, next_block, out);
  const std::size_t len = lengths[static_cast<std::size_t>(level)];
  out.guards.push_back({out.provenance.size(), len, level});
  out.provenance.insert(out.provenance.end(), len, {Provenance::Kind::Guard, level});
  build(level - 1, n0, lengths, next_block, out);
}

} // namespace

GuardLayout make_guard_layout(int n, int n0, double xi) {
  if (n0 < 0 || n < n0)
    throw std::invalid_argument("guard layout: need n >= n0 >= 0");
  if (!(xi > 0.0 && xi < 1.0))
    throw std::invalid_argument("guard layout: xi must lie in (0,1)");
  GuardLayout out;
  out.n = n;
  out.n0 = n0;
  out.xi = xi;
  std::vector<std::size_t> lengths(static_cast<std::size_t>(n) + 1, 0);
  for (int m = n0 + 1; m <= n; ++m)
    lengths[static_cast<std::size_t>(m)] = guard_band_length(m, xi);
  int next_block = 1;
  build(n, n0, lengths, next_block, out);
  return out;
}

GuardedWord place_in_layout(const GuardLayout& layout, std::span<const std::uint8_t> x) {
  if (x.size() != layout.data_length())
    throw std::invalid_argument("place_in_layout: data length does not match layout");
  GuardedWord g{layout, Bits(layout.total_length(), 0)};
  for (std::size_t k = 0; k < x.size(); ++k)
    g.symbols[layout.data_positions[k]] = x[k];
  return g;
}

GuardedWord insert_guard_bands(const BlockedInput& x, const GuardParams& params) {
  if (x.n0 != params.n0)
    throw std::invalid_argument("insert_guard_bands: block level mismatch");
  return place_in_layout(make_guard_layout(x.n, params.n0, params.xi), x.bits);
}

Bits strip_guards(const GuardedWord& g) {
  Bits out;
  out.reserve(g.layout.data_length());
  for (std::size_t p = 0; p < g.symbols.size(); ++p)
    if (!g.layout.provenance[p].is_guard())
      out.push_back(g.symbols[p]);
  return out;
}

std::pair<std::size_t, std::size_t> prefix_counts(const GuardLayout& layout, std::size_t j) {
  if (j < 1 || j > layout.total_length())
    throw std::out_of_range("prefix_counts: index out of range");
  std::size_t data = 0;
  for (std::size_t p = 0; p < j; ++p)
    data += !layout.provenance[p].is_guard();
  return {data, j - data};
}

std::pair<std::size_t, std::size_t> prefix_counts(const GuardedWord& g, std::size_t j) {
  return prefix_counts(g.layout, j);
}

bool check_prefix_dominance(const GuardLayout& layout) {
  std::size_t data = 0, guard = 0;
  for (const Provenance& p : layout.provenance) {
    (p.is_guard() ? guard : data) += 1;
    if (data < guard)
      return false;
  }
  return true;
}

bool check_prefix_dominance(const GuardedWord& g) { return check_prefix_dominance(g.layout); }

double total_length_bound(int n, int n0, double xi) {
  const double big_n = std::ldexp(1.0, n);
  return big_n * (1.0 + std::exp2(-(xi * n0 + 1.0)) / (1.0 - std::exp2(-xi)));
}

double m0_threshold(double xi) {
  if (!(xi > 0.0 && xi <= 1.0))
    throw std::invalid_argument("m0_threshold: xi must lie in (0,1]");
  const double base = std::exp2(-xi);
  return std::log((1.0 - base) / 2.0) / std::log(base);
}

} // namespace delpolar

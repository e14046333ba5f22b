#include "delpolar/ext_float.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace delpolar {

namespace {

constexpr std::int64_t kMaxExponent = std::int64_t{1} << 62;

std::int64_t saturate(std::int64_t e) {
  if (e > kMaxExponent)
    return kMaxExponent;
  if (e < -kMaxExponent)
    return -kMaxExponent;
  return e;
}

std::int64_t add_exponents(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_add_overflow(a, b, &r))
    return a > 0 ? kMaxExponent : -kMaxExponent;
  return saturate(r);
}

} // namespace

ExtFloat::ExtFloat(double m, std::int64_t e) : mantissa_(m), exponent_(e) {}

ExtFloat ExtFloat::normalized(double m, std::int64_t e) {
  if (m == 0.0)
    return {};
  int shift = 0;
  const double f = std::frexp(m, &shift);
  const std::int64_t exponent = add_exponents(e, shift);
  if (exponent <= -kMaxExponent)
    return {};
  return {f, exponent};
}

ExtFloat ExtFloat::from_double(double v) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw std::invalid_argument("ExtFloat: value must be finite and nonnegative");
  return normalized(v, 0);
}

ExtFloat ExtFloat::from_log2(double l) {
  if (std::isnan(l))
    throw std::invalid_argument("ExtFloat: log2 is NaN");
  if (l == -std::numeric_limits<double>::infinity())
    return {};
  if (l >= static_cast<double>(kMaxExponent))
    return {0.5, kMaxExponent};
  if (l <= -static_cast<double>(kMaxExponent))
    return {};
  const double whole = std::floor(l);
  const double frac = l - whole; // in [0, 1)
  return normalized(std::exp2(frac), static_cast<std::int64_t>(whole));
}

double ExtFloat::log2() const {
  if (is_zero())
    return -std::numeric_limits<double>::infinity();
  return std::log2(mantissa_) + static_cast<double>(exponent_);
}

double ExtFloat::to_double() const {
  if (is_zero())
    return 0.0;
  if (exponent_ > 2000)
    return std::numeric_limits<double>::infinity();
  if (exponent_ < -2000)
    return 0.0;
  return std::ldexp(mantissa_, static_cast<int>(exponent_));
}

ExtFloat operator*(const ExtFloat& a, const ExtFloat& b) {
  if (a.is_zero() || b.is_zero())
    return {};
  return ExtFloat::normalized(a.mantissa_ * b.mantissa_, add_exponents(a.exponent_, b.exponent_));
}

ExtFloat operator+(const ExtFloat& a, const ExtFloat& b) {
  if (a.is_zero())
    return b;
  if (b.is_zero())
    return a;
  const ExtFloat& big = a.exponent_ >= b.exponent_ ? a : b;
  const ExtFloat& small = a.exponent_ >= b.exponent_ ? b : a;
  const std::int64_t gap = big.exponent_ - small.exponent_;
  // Beyond the double range the smaller term rounds away entirely.
  if (gap > 1100)
    return big;
  return ExtFloat::normalized(big.mantissa_ + std::ldexp(small.mantissa_, -static_cast<int>(gap)),
                              big.exponent_);
}

std::strong_ordering operator<=>(const ExtFloat& a, const ExtFloat& b) {
  if (a.is_zero() || b.is_zero()) {
    if (a.is_zero() && b.is_zero())
      return std::strong_ordering::equal;
    return a.is_zero() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.exponent_ != b.exponent_)
    return a.exponent_ <=> b.exponent_;
  if (a.mantissa_ < b.mantissa_)
    return std::strong_ordering::less;
  if (a.mantissa_ > b.mantissa_)
    return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

} // namespace delpolar

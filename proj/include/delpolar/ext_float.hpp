#pragma once

#include <compare>
#include <cstdint>

namespace delpolar {

/// Nonnegative real m * 2^e with m in [1/2, 1) (or exactly 0) and a 64-bit
/// exponent, for magnitudes like 2^{-2^{20}}. Every operation is monotone
/// in each argument, which the coupling comparisons rely on. Exponents
/// saturate instead of wrapping.
class ExtFloat {
public:
  ExtFloat() = default;

  static ExtFloat zero() { return {}; }
  static ExtFloat from_double(double v);
  /// 2^l for a real l.
  static ExtFloat from_log2(double l);

  bool is_zero() const { return mantissa_ == 0.0; }
  double mantissa() const { return mantissa_; }
  std::int64_t exponent() const { return exponent_; }

  /// log2 of the value (-inf for zero).
  double log2() const;
  /// Value as a double, underflowing to 0 or overflowing to inf.
  double to_double() const;

  friend ExtFloat operator*(const ExtFloat& a, const ExtFloat& b);
  friend ExtFloat operator+(const ExtFloat& a, const ExtFloat& b);
  friend std::strong_ordering operator<=>(const ExtFloat& a, const ExtFloat& b);
  friend bool operator==(const ExtFloat& a, const ExtFloat& b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }

private:
  ExtFloat(double m, std::int64_t e);
  static ExtFloat normalized(double m, std::int64_t e);

  double mantissa_ = 0.0;
  std::int64_t exponent_ = 0;
};

} // namespace delpolar

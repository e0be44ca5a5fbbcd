#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>

namespace qlnc {

/// Base-b fixed point with `int_digits` digits before and `frac_digits`
/// digits after the point. Mantissas are checked 64-bit integers, so a format
/// may use at most 62 bits of mantissa magnitude.
struct FixedPointFormat {
  int base = 2;
  int int_digits = 0;
  int frac_digits = 0;

  void check() const;
  std::int64_t scale() const;         // base^frac_digits
  std::int64_t max_mantissa() const;  // base^(int_digits + frac_digits) - 1
  double granularity() const;         // base^-frac_digits
  double max_value() const;
  std::string to_string() const;

  bool operator==(const FixedPointFormat&) const = default;
};

struct FixedPointValue {
  FixedPointFormat format;
  std::int64_t mantissa = 0;

  double value() const;

  bool operator==(const FixedPointValue& o) const { return mantissa == o.mantissa && format == o.format; }
  std::strong_ordering operator<=>(const FixedPointValue& o) const { return mantissa <=> o.mantissa; }
};

/// Rounds half away from zero.
std::int64_t round_half_away(long double x);

/// Mantissa of the grid point nearest to `scaled` (a value already expressed
/// in units of base^-frac_digits); throws OverflowError when out of range.
std::int64_t quantize_mantissa(long double scaled, const FixedPointFormat& fmt);

FixedPointValue quantize(double x, const FixedPointFormat& fmt);

/// Sum of coeffs[i] * vals[i] evaluated in binary64, then quantized to fmt.
FixedPointValue linear_combine(std::span<const double> coeffs, std::span<const FixedPointValue> vals,
                               const FixedPointFormat& fmt);

std::int64_t round_to_int(double x);
std::int64_t round_to_int(const FixedPointValue& v);

}  // namespace qlnc

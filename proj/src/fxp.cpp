#include "qlnc/fxp.hpp"

#include <cmath>
#include <limits>

#include "qlnc/errors.hpp"

namespace qlnc {

namespace {

constexpr std::int64_t kMantissaLimit = std::int64_t{1} << 62;

// base^n, or -1 when it exceeds kMantissaLimit.
std::int64_t checked_pow(int base, int n) {
  std::int64_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > kMantissaLimit / base) return -1;
    r *= base;
  }
  return r;
}

}  // namespace

void FixedPointFormat::check() const {
  if (base < 2) throw Error("fixed-point base must be >= 2");
  if (int_digits < 0 || frac_digits < 0) throw Error("fixed-point digit counts must be >= 0");
  if (checked_pow(base, int_digits + frac_digits) < 0)
    throw Error("fixed-point format " + to_string() + " exceeds the 62-bit mantissa limit");
}

std::int64_t FixedPointFormat::scale() const { return checked_pow(base, frac_digits); }

std::int64_t FixedPointFormat::max_mantissa() const {
  const auto full = checked_pow(base, int_digits + frac_digits);
  if (full < 0) throw Error("fixed-point format " + to_string() + " exceeds the 62-bit mantissa limit");
  return full - 1;
}

double FixedPointFormat::granularity() const { return std::pow(static_cast<double>(base), -frac_digits); }

double FixedPointFormat::max_value() const {
  return static_cast<double>(static_cast<long double>(max_mantissa()) / scale());
}

std::string FixedPointFormat::to_string() const {
  return "(b=" + std::to_string(base) + ", P=" + std::to_string(int_digits) +
         ", p=" + std::to_string(frac_digits) + ")";
}

double FixedPointValue::value() const {
  return static_cast<double>(static_cast<long double>(mantissa) / format.scale());
}

std::int64_t round_half_away(long double x) {
  const long double r = x < 0 ? -std::floor(-x + 0.5L) : std::floor(x + 0.5L);
  if (!(std::fabs(r) < 9.2e18L)) throw OverflowError("value too large for a 64-bit integer");
  return static_cast<std::int64_t>(r);
}

std::int64_t quantize_mantissa(long double scaled, const FixedPointFormat& fmt) {
  if (!std::isfinite(scaled)) throw OverflowError("non-finite value cannot be quantized");
  const long double limit = static_cast<long double>(fmt.max_mantissa());
  const long double r = scaled < 0 ? -std::floor(-scaled + 0.5L) : std::floor(scaled + 0.5L);
  if (std::fabs(r) > limit)
    throw OverflowError("value " + std::to_string(static_cast<double>(scaled / fmt.scale())) +
                        " outside the range of " + fmt.to_string());
  return static_cast<std::int64_t>(r);
}

FixedPointValue quantize(double x, const FixedPointFormat& fmt) {
  fmt.check();
  return {fmt, quantize_mantissa(static_cast<long double>(x) * fmt.scale(), fmt)};
}

FixedPointValue linear_combine(std::span<const double> coeffs, std::span<const FixedPointValue> vals,
                               const FixedPointFormat& fmt) {
  if (coeffs.size() != vals.size()) throw Error("linear_combine: size mismatch");
  fmt.check();
  double sum = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!(vals[i].format == fmt)) throw Error("linear_combine: mixed fixed-point formats");
    sum += coeffs[i] * static_cast<double>(vals[i].mantissa);
  }
  return {fmt, quantize_mantissa(sum, fmt)};
}

std::int64_t round_to_int(double x) { return round_half_away(x); }

std::int64_t round_to_int(const FixedPointValue& v) {
  const __int128 s = v.format.scale();
  const __int128 m = v.mantissa;
  // floor((2|m| + s) / 2s) with the sign restored: ties go away from zero.
  const __int128 a = m < 0 ? -m : m;
  const __int128 q = (2 * a + s) / (2 * s);
  return static_cast<std::int64_t>(m < 0 ? -q : q);
}

}  // namespace qlnc

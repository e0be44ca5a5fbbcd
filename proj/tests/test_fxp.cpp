#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "qlnc/errors.hpp"
#include "qlnc/fxp.hpp"

using namespace qlnc;

TEST_SUITE("fxp") {
  TEST_CASE("quantize examples") {
    const FixedPointFormat f{2, 4, 3};
    CHECK(quantize(0.3, f).mantissa == 2);
    CHECK(quantize(0.3, f).value() == 0.25);
    CHECK(quantize(0.3125, f).mantissa == 3);
    CHECK(quantize(-0.3125, f).mantissa == -3);
    CHECK(quantize(5, f).value() == 5.0);
    CHECK(quantize(5, FixedPointFormat{10, 1, 2}).value() == 5.0);
  }

  TEST_CASE("range and overflow") {
    const FixedPointFormat f{2, 3, 2};
    CHECK(f.max_mantissa() == 31);
    CHECK(f.max_value() == 7.75);
    CHECK(f.granularity() == 0.25);
    CHECK(quantize(7.75, f).mantissa == 31);
    CHECK(quantize(-7.8, f).mantissa == -31);
    CHECK_THROWS_AS(quantize(7.9, f), OverflowError);
    CHECK_THROWS_AS(quantize(-8, f), OverflowError);
    CHECK_THROWS_AS(quantize(NAN, f), OverflowError);
  }

  TEST_CASE("formats beyond 62 mantissa bits are rejected") {
    CHECK_NOTHROW((FixedPointFormat{2, 40, 22}.check()));
    CHECK_THROWS_AS((FixedPointFormat{2, 40, 23}.check()), Error);
    CHECK_THROWS_AS((FixedPointFormat{10, 10, 9}.check()), Error);
    CHECK_THROWS_AS((FixedPointFormat{1, 4, 4}.check()), Error);
  }

  TEST_CASE("linear combination examples") {
    const FixedPointFormat f{2, 8, 4};
    const auto x = quantize(3.6875, f);
    const std::vector<FixedPointValue> twice{x, x};
    CHECK(linear_combine(std::vector<double>{1, -1}, twice, f).mantissa == 0);
    const std::vector<FixedPointValue> one{x};
    CHECK(linear_combine(std::vector<double>{1}, one, f) == x);
    const std::vector<FixedPointValue> v{quantize(6, f), quantize(4, f), quantize(2, f)};
    CHECK(linear_combine(std::vector<double>{0.5, 0.5, -0.5}, v, f).value() == 4.0);
    CHECK(linear_combine(std::vector<double>{-0.5, 0.5, 0.5}, v, f).value() == 0.0);
    CHECK_THROWS_AS(linear_combine(std::vector<double>{1}, twice, f), Error);
  }

  TEST_CASE("round to integer") {
    CHECK(round_to_int(3.4) == 3);
    CHECK(round_to_int(-0.5) == -1);
    CHECK(round_to_int(0.5) == 1);
    CHECK(round_to_int(6.999999) == 7);
    CHECK(round_to_int(-2.5) == -3);
    const FixedPointFormat f{2, 6, 3};
    CHECK(round_to_int(quantize(2.5, f)) == 3);
    CHECK(round_to_int(quantize(-2.5, f)) == -3);
    CHECK(round_to_int(quantize(-2.375, f)) == -2);
    CHECK(round_to_int(FixedPointValue{FixedPointFormat{3, 4, 2}, 13}) == 1);  // 13/9
  }

  TEST_CASE("quantization properties over random reals") {
    std::mt19937_64 rng(1234);
    for (int base : {2, 3, 10}) {
      for (int p = 0; p <= 8; ++p) {
        const FixedPointFormat f{base, 6, p};
        const double top = f.max_value();
        std::uniform_real_distribution<double> draw(-top, top);
        const double half = f.granularity() / 2;
        for (int i = 0; i < 2000; ++i) {
          const double x = draw(rng);
          const double y = draw(rng);
          const auto qx = quantize(x, f);
          // Exact error via long double rationals: |m - x*b^p| <= 1/2.
          const long double err = std::fabs(static_cast<long double>(qx.mantissa) -
                                            static_cast<long double>(x) * f.scale());
          CHECK(err <= 0.5L + 1e-9L);
          CHECK(std::fabs(qx.value() - x) <= half + 4 * std::numeric_limits<double>::epsilon() * std::fabs(x));
          CHECK(quantize(qx.value(), f) == qx);
          if (x <= y) CHECK(qx <= quantize(y, f));
        }
        for (int n = -static_cast<int>(top); n <= static_cast<int>(top); n += std::max(1, static_cast<int>(top) / 50))
          CHECK(quantize(n, f).value() == n);
      }
    }
  }

  TEST_CASE("ties round away from zero at every base") {
    for (int base : {2, 4, 10}) {
      const FixedPointFormat f{base, 3, 1};
      const double x = 2.5 / base;
      CHECK(quantize(x, f).mantissa == 3);
      CHECK(quantize(-x, f).mantissa == -3);
    }
  }
}

#include <gtest/gtest.h>

#include "nuspec/digit_code.hpp"

using namespace nuspec;

TEST(DigitCode, FromDoubleIsExactForDyadics) {
  const DigitCode c = DigitCode::from_double(0.8125, 2, 8);  // 0.1101
  EXPECT_EQ(c.digit(0), 1);
  EXPECT_EQ(c.digit(1), 1);
  EXPECT_EQ(c.digit(2), 0);
  EXPECT_EQ(c.digit(3), 1);
  EXPECT_EQ(c.digit(4), 0);
  EXPECT_DOUBLE_EQ(c.value(0), 0.8125);
  EXPECT_DOUBLE_EQ(c.value(1), 0.625);
  EXPECT_DOUBLE_EQ(c.value(4), 0.0);
}

TEST(DigitCode, PeriodicWordEncodesRational) {
  const DigitCode c = DigitCode::periodic(2, {0, 1, 0, 0, 1});  // 9/31
  EXPECT_NEAR(c.value(0), 9.0 / 31.0, 1e-16);
  EXPECT_NEAR(c.value(1), 18.0 / 31.0, 1e-16);
  EXPECT_NEAR(c.value(5), 9.0 / 31.0, 1e-16);
  const DigitCode t = DigitCode::periodic(3, {1});  // 1/2 in base 3
  EXPECT_NEAR(t.value(7), 0.5, 1e-16);
}

TEST(DigitCode, WindowCursorMatchesWindow) {
  Rng rng(7);
  const DigitCode c = DigitCode::random(3, 300, rng);
  WindowCursor cur(c);
  for (std::size_t s = 0; s < 200; ++s) {
    ASSERT_EQ(cur.value(), c.window(s)) << "shift " << s;
    cur.advance();
  }
}

TEST(DigitCode, WindowDistanceWrapsAround) {
  const std::uint64_t M = DigitCode::window_modulus(2);
  EXPECT_DOUBLE_EQ(window_distance(2, 0, M / 2), 0.5);
  EXPECT_NEAR(window_distance(2, 1, M - 1), 2.0 / static_cast<double>(M), 1e-30);
}

TEST(DigitCode, WindowDigitsFitIn63Bits) {
  EXPECT_EQ(DigitCode::window_digits(2), 63);
  EXPECT_EQ(DigitCode::window_digits(3), 39);
}

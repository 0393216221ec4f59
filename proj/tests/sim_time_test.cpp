#include "sdnft/sim_time.hpp"

#include <gtest/gtest.h>

namespace sdnft {
namespace {

TEST(SimTimeTest, UnitConversionsAreExact) {
  EXPECT_EQ(SimTime::from_ms(5).us(), 5000);
  EXPECT_EQ(SimTime::from_s(12).us(), 12'000'000);
  EXPECT_EQ(SimTime::from_seconds(0.0012346).us(), 1235);  // rounds to nearest
  EXPECT_DOUBLE_EQ(SimTime::from_us(1500).ms(), 1.5);
  EXPECT_DOUBLE_EQ(SimTime::from_ms(2500).seconds(), 2.5);
}

TEST(SimTimeTest, ArithmeticAndOrdering) {
  SimTime t = SimTime::from_ms(10);
  t += SimTime::from_us(5);
  EXPECT_EQ(t.us(), 10'005);
  EXPECT_EQ((t - SimTime::from_us(5)).us(), 10'000);
  EXPECT_EQ((SimTime::from_ms(5) * 3).us(), 15'000);
  EXPECT_LT(SimTime::from_ms(1), SimTime::from_ms(2));
  EXPECT_LT(SimTime::from_s(1'000'000), SimTime::infinity());
  EXPECT_EQ(SimTime::zero().us(), 0);
}

TEST(SimTimeTest, FormatsSecondsWithMicrosecondPrecision) {
  EXPECT_EQ(SimTime::from_us(1'234'567).to_string(), "1.234567s");
  EXPECT_EQ(SimTime::from_us(-5).to_string(), "-0.000005s");
  EXPECT_EQ(SimTime::zero().to_string(), "0.000000s");
}

}  // namespace
}  // namespace sdnft

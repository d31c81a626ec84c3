#include <gtest/gtest.h>

#include <cmath>

#include <smcaero/lti.hpp>
#include <smcaero/sliding.hpp>

using namespace smcaero;

TEST(SigmaDesign, ItaeCoefficientPairs) {
  auto s = design_coefficients(2, 2.0, true);
  EXPECT_DOUBLE_EQ(s.coeffs.at(0), 7.0);
  EXPECT_DOUBLE_EQ(s.c_int, 25.0);
  s = design_coefficients(2, 5.0, true);
  EXPECT_DOUBLE_EQ(s.coeffs.at(0), 2.8);
  EXPECT_DOUBLE_EQ(s.c_int, 4.0);
  s = design_coefficients(2, 8.0, true);
  EXPECT_DOUBLE_EQ(s.coeffs.at(0), 1.75);
  EXPECT_DOUBLE_EQ(s.c_int, 1.5625);
  EXPECT_LE(std::abs(s.c_int - 1.56) / 1.56, 0.005);
}

TEST(SigmaDesign, ScalesWithNaturalFrequency) {
  // ITAE order-3 shape s^3 + 1.75 w s^2 + 2.15 w^2 s + w^3 with w = 10 / ts
  for (double ts : {1.0, 2.5, 7.0}) {
    const double w = 10.0 / ts;
    const auto s = design_coefficients(3, ts, true);
    ASSERT_EQ(s.coeffs.size(), 2u);
    EXPECT_NEAR(s.coeffs[0], 1.75 * w, 1e-12 * w);
    EXPECT_NEAR(s.coeffs[1], 2.15 * w * w, 1e-12 * w * w);
    EXPECT_NEAR(s.c_int, w * w * w, 1e-12 * w * w * w);
  }
  const auto p = design_coefficients(3, 2.0, false);
  ASSERT_EQ(p.coeffs.size(), 2u);
  EXPECT_DOUBLE_EQ(p.coeffs[0], 7.0);
  EXPECT_DOUBLE_EQ(p.coeffs[1], 25.0);
  EXPECT_EQ(p.c_int, 0.0);
}

TEST(SigmaDesign, CharacteristicPolynomialIsHurwitz) {
  for (int r = 2; r <= 5; ++r)
    for (double ts : {0.5, 2.0, 8.0, 40.0})
      for (bool integral : {true, false}) {
        const auto s = design_coefficients(r, ts, integral);
        EXPECT_TRUE(is_hurwitz(s.characteristic())) << "r=" << r << " ts=" << ts << " integral=" << integral;
      }
}

TEST(SigmaDesign, InvalidArgumentsRejected) {
  EXPECT_THROW(design_coefficients(1, 2.0, true), ConfigError);
  EXPECT_THROW(design_coefficients(6, 2.0, true), ConfigError);
  EXPECT_THROW(design_coefficients(2, 0.0, true), ConfigError);
}

TEST(SigmaEval, RectangleRuleIntegral) {
  const auto spec = design_coefficients(2, 2.0, true);  // sigma = e' + 7 e + 25 int e
  SigmaAccumulator acc;
  const double h = 0.01;
  double integral = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double e = std::cos(0.1 * k), ed = -std::sin(0.1 * k);
    const double s = eval_sigma(spec, {e, ed}, acc, h);
    EXPECT_NEAR(s, ed + 7.0 * e + 25.0 * integral, 1e-12);
    integral += e * h;  // integral used at step k excludes sample k
  }
  EXPECT_NEAR(acc.integral, integral, 1e-12);
}

TEST(SigmaEval, GateFreezesIntegral) {
  const auto spec = design_coefficients(2, 2.0, true);
  SigmaAccumulator acc;
  acc.gate = 0.5;
  eval_sigma(spec, {1.0, 0.0}, acc, 0.1);  // proportional part 7 > gate
  EXPECT_EQ(acc.integral, 0.0);
  eval_sigma(spec, {0.01, 0.0}, acc, 0.1);
  EXPECT_NEAR(acc.integral, 0.001, 1e-15);
}

TEST(SigmaEval, StackLengthChecked) {
  const auto spec = design_coefficients(3, 2.0, true);
  SigmaAccumulator acc;
  EXPECT_THROW(eval_sigma(spec, {1.0, 2.0}, acc, 0.1), Error);
}

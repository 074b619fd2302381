#include <cmath>

#include <gtest/gtest.h>

#include "hawking/jet.hpp"

using hawking::Jet;

TEST(Jet, VariableCarriesUnitGradient) {
  const auto x = Jet<2>::variable(0.7, 1);
  EXPECT_DOUBLE_EQ(x.value(), 0.7);
  EXPECT_DOUBLE_EQ(x.derivative(0, 1, 0), 1.0);
  EXPECT_DOUBLE_EQ(x.derivative(1, 0, 0), 0.0);
  EXPECT_DOUBLE_EQ(x.derivative(0, 2, 0), 0.0);
}

TEST(Jet, ProductMatchesLeibniz) {
  const auto x = Jet<3>::variable(0.3, 0);
  const auto y = Jet<3>::variable(-1.2, 1);
  const auto f = x * x * y;  // x^2 y
  EXPECT_NEAR(f.value(), 0.09 * -1.2, 1e-15);
  EXPECT_NEAR(f.derivative(1, 0, 0), 2 * 0.3 * -1.2, 1e-15);
  EXPECT_NEAR(f.derivative(2, 1, 0), 2.0, 1e-15);
  EXPECT_NEAR(f.derivative(1, 1, 0), 0.6, 1e-15);
  EXPECT_NEAR(f.derivative(3, 0, 0), 0.0, 1e-15);
}

// Closed-form derivatives of exp(x y) + 1 / (1 + z^2) at a point.
TEST(Jet, ElementaryFunctionsAgainstClosedForms) {
  const double a = 0.4, b = -0.3, c = 0.8;
  const auto x = Jet<4>::variable(a, 0), y = Jet<4>::variable(b, 1), z = Jet<4>::variable(c, 2);
  const auto f = exp(x * y) + 1.0 / (1.0 + z * z);
  const double e = std::exp(a * b);
  EXPECT_NEAR(f.value(), e + 1.0 / (1.0 + c * c), 1e-14);
  EXPECT_NEAR(f.derivative(1, 0, 0), b * e, 1e-14);
  EXPECT_NEAR(f.derivative(1, 1, 0), e * (1.0 + a * b), 1e-14);
  EXPECT_NEAR(f.derivative(2, 2, 0), e * (2.0 + 4.0 * a * b + a * a * b * b), 1e-13);
  const double q = 1.0 + c * c;
  EXPECT_NEAR(f.derivative(0, 0, 1), -2.0 * c / (q * q), 1e-14);
  EXPECT_NEAR(f.derivative(0, 0, 2), (6.0 * c * c - 2.0) / (q * q * q), 1e-13);
}

TEST(Jet, SqrtAndLogInvertPowAndExp) {
  const auto x = Jet<4>::variable(1.7, 2);
  const auto r = sqrt(x) * sqrt(x) - x;
  const auto l = log(exp(x)) - x;
  for (int k = 0; k <= 4; ++k) {
    EXPECT_NEAR(r.derivative(0, 0, k), 0.0, 1e-12);
    EXPECT_NEAR(l.derivative(0, 0, k), 0.0, 1e-12);
  }
}

TEST(Jet, PartialShiftsCoefficients) {
  const auto x = Jet<3>::variable(2.0, 0), y = Jet<3>::variable(1.0, 1);
  const auto f = x * x * x + x * y;
  const auto fx = f.partial(0);  // 3x^2 + y, valid to order 2
  EXPECT_NEAR(fx.value(), 13.0, 1e-14);
  EXPECT_NEAR(fx.derivative(1, 0, 0), 12.0, 1e-14);
  EXPECT_NEAR(fx.derivative(0, 1, 0), 1.0, 1e-14);
}

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hawking/expansion.hpp"

using namespace hawking;

namespace {

constexpr double kPi = std::numbers::pi;

const SphereGrid& grid() {
  static const SphereGrid g = build_grid(24, 48);
  return g;
}

const SurfaceEvaluator& evaluator() {
  static const SurfaceEvaluator ev(grid());
  return ev;
}

std::vector<double> radii(double rho0, int n) { return ladder_radii({rho0, n, 0.5}); }

}  // namespace

TEST(Expansion, LadderIsGeometric) {
  const auto r = radii(0.4, 6);
  ASSERT_EQ(r.size(), 6u);
  for (size_t i = 1; i < r.size(); ++i) EXPECT_DOUBLE_EQ(r[i], r[i - 1] / 2);
}

TEST(Expansion, FitRecoversExactModels) {
  const auto r = radii(0.2, 6);
  std::vector<double> v, v6;
  for (double x : r) {
    v.push_back(0.5 * std::pow(x, 3) - 0.25 * std::pow(x, 5));
    v6.push_back(v.back() + 0.7 * std::pow(x, 6));
  }
  const ExpansionFit f = fit_coefficients(r, v);
  EXPECT_NEAR(f.c3, 0.5, 1e-10);
  EXPECT_NEAR(f.c5, -0.25, 1e-10);
  const ExpansionFit g = fit_coefficients(r, v6);
  EXPECT_NEAR(g.c3, 0.5, 1e-9);
  EXPECT_NEAR(g.c5, -0.25, 1e-9);
  EXPECT_NEAR(g.c6, 0.7, 1e-7);
  EXPECT_LT(g.condition, 1e8);
}

TEST(Expansion, FitGuards) {
  EXPECT_THROW(fit_coefficients({0.1, 0.05, 0.025, 0.0125}, {0, 0, 0, 0}), FitUnstable);
  // Nearly equal radii make the basis columns almost collinear.
  const auto r = ladder_radii({1.0, 8, 0.99999});
  EXPECT_THROW(fit_coefficients(r, std::vector<double>(r.size(), 0.0)), FitUnstable);
}

TEST(Expansion, PredictedCoefficientFixtures) {
  CurvaturePacket flat;
  const auto p0 = predicted_coefficients(flat, PerturbationMode::Optimal);
  EXPECT_EQ(p0.c3, 0.0);
  EXPECT_EQ(p0.c5, 0.0);

  const CurvaturePacket s3 = curvature_packet(MetricField(metrics::RoundSphere{}), Vec3::Zero());
  const auto ps = predicted_coefficients(s3, PerturbationMode::Optimal);
  EXPECT_NEAR(ps.c3, 0.5, 1e-14);
  EXPECT_NEAR(ps.c5, -0.25, 1e-14);
  const auto pu = predicted_coefficients(s3, PerturbationMode::Unperturbed);
  EXPECT_NEAR(pu.c5, -0.25, 1e-14);

  const CurvaturePacket h3 = curvature_packet(MetricField(metrics::Hyperbolic{}), Vec3::Zero());
  const auto pg = predicted_coefficients(h3, PerturbationMode::Generalized, -1.0);
  EXPECT_NEAR(pg.willmore_c2, 0.0, 1e-13);
  EXPECT_NEAR(pg.willmore_c4, 0.0, 1e-13);
  EXPECT_NEAR(pg.c3, 0.0, 1e-14);

  // Substitution: Sc = 6, |S|^2 = 0, K = 1 in the generalized Willmore pair.
  const auto p1 = predicted_coefficients(s3, PerturbationMode::Generalized, 1.0);
  EXPECT_NEAR(p1.willmore_c2, 8 * kPi / 3 * 6 - 16 * kPi, 1e-12);
  EXPECT_NEAR(p1.willmore_c4, -4 * kPi / 27 * 36 + 8 * kPi / 9 * 6, 1e-12);
}

TEST(Expansion, CompareReport) {
  ExpansionFit fit;
  const auto r = compare_report(fit, PredictedCoefficients{});
  EXPECT_EQ(r.delta_c3, 0.0);
  EXPECT_EQ(r.delta_c5, 0.0);
  EXPECT_TRUE(r.pass());
  fit.c3 = 0.51;
  PredictedCoefficients p;
  p.c3 = 0.5;
  EXPECT_FALSE(compare_report(fit, p, {0.0, 0.01, 1e-7, 0.05}).pass_c3);
  fit.c3 = 0.504;
  EXPECT_TRUE(compare_report(fit, p, {0.0, 0.01, 1e-7, 0.05}).pass_c3);
}

TEST(Expansion, FlatLadderVanishes) {
  for (auto mode : {PerturbationMode::Optimal, PerturbationMode::Unperturbed}) {
    const Ladder lad = radius_ladder(evaluator(), MetricField{}, Vec3::Zero(), mode, {0.4, 6, 0.5});
    for (const auto& s : lad.samples) EXPECT_LE(std::abs(s.hawking), 1e-10);
  }
}

TEST(Expansion, LadderGuards) {
  MetricField sw(metrics::Schwarzschild{});
  EXPECT_THROW(radius_ladder(evaluator(), sw, Vec3(4, 0, 0), PerturbationMode::Optimal, {0.4, 4, 0.5}),
               FitUnstable);
  EXPECT_THROW(radius_ladder(evaluator(), sw, Vec3(4, 0, 0), PerturbationMode::Optimal, {5.0, 6, 0.5}),
               RadiusOutOfRange);
}

// Round S^3: c3 = Sc/12 = 0.5 and c5 = -Sc^2/144 = -0.25, and halving rho0
// moves the fit by < 1% in c3 and < 5% in c5.
TEST(Expansion, RoundSphereFitAndStability) {
  MetricField s3(metrics::RoundSphere{});
  const auto fit = [&](double rho0) {
    const Ladder lad = radius_ladder(evaluator(), s3, Vec3::Zero(), PerturbationMode::Optimal, {rho0, 6, 0.5});
    for (size_t i = 1; i < lad.samples.size(); ++i) EXPECT_LT(lad.samples[i].hawking, lad.samples[i - 1].hawking);
    return fit_coefficients(lad.radii(), lad.masses());
  };
  const ExpansionFit a = fit(0.2), b = fit(0.1);
  EXPECT_NEAR(a.c3, 0.5, 0.005);
  EXPECT_NEAR(a.c5, -0.25, 0.0125);
  EXPECT_LT(std::abs(a.c3 - b.c3), 0.01 * std::abs(a.c3));
  EXPECT_LT(std::abs(a.c5 - b.c5), 0.05 * std::abs(a.c5));
}

// Positive mass away from flat space for Sc >= 0 built-ins.
TEST(Expansion, PositiveMassOnCurvedBuiltins) {
  MetricField sw(metrics::Schwarzschild{});
  const Ladder lad = radius_ladder(evaluator(), sw, Vec3(4, 0, 0), PerturbationMode::Optimal, {0.4, 5, 0.5});
  for (const auto& s : lad.samples) EXPECT_GT(s.hawking, 0.0);
}

TEST(Expansion, WillmoreAndAreaOnRoundSphere) {
  const auto chk = willmore_expansion_check(evaluator(), MetricField(metrics::RoundSphere{}), Vec3::Zero(),
                                            {0.2, 6, 0.5});
  EXPECT_NEAR(chk.willmore.coeffs[0], -16 * kPi, 0.01 * 16 * kPi);
  EXPECT_NEAR(chk.area.coeffs[0], -1.0 / 3, 0.02 / 3);
  EXPECT_GE(chk.area_remainder_order, 3.5);
}

// Flat data is pure roundoff, so each fitted term must vanish at the largest
// radius rather than each raw coefficient.
TEST(Expansion, WillmoreOnFlatIsZero) {
  const double rho0 = 0.4;
  const auto chk = willmore_expansion_check(evaluator(), MetricField{}, Vec3::Zero(), {rho0, 6, 0.5});
  for (size_t k = 0; k < chk.willmore.coeffs.size(); ++k)
    EXPECT_LT(std::abs(chk.willmore.coeffs[k]) * std::pow(rho0, chk.willmore.powers[k]), 1e-10);
  for (size_t k = 0; k < chk.area.coeffs.size(); ++k)
    EXPECT_LT(std::abs(chk.area.coeffs[k]) * std::pow(rho0, chk.area.powers[k]), 1e-10);
}

TEST(Expansion, OrderCheckFixtures) {
  const auto zero = evaluator().zero_field();
  const OrderCheck flat = expansion_order_check(evaluator(), MetricField{}, Vec3::Zero(), zero, radii(0.4, 5));
  for (double r : flat.residuals) EXPECT_LT(r, 1e-9);

  const OrderCheck s3 =
      expansion_order_check(evaluator(), MetricField(metrics::RoundSphere{}), Vec3::Zero(), zero, radii(0.4, 5));
  EXPECT_GE(s3.slope, 3.5);

  std::vector<double> w(grid().size());
  for (int n = 0; n < grid().size(); ++n) {
    const Vec3& t = grid().directions[n];
    w[n] = 0.01 * (t[0] * t[0] - t[1] * t[1]);
  }
  const OrderCheck sw =
      expansion_order_check(evaluator(), MetricField(metrics::Schwarzschild{}), Vec3(4, 0, 0), w, radii(0.8, 5));
  EXPECT_GE(sw.slope, 3.5);
  EXPECT_THROW(expansion_order_check(evaluator(), MetricField{}, Vec3::Zero(), zero, radii(0.4, 4)), FitUnstable);
}

TEST(Expansion, LoglogSlope) {
  std::vector<double> x = {1, 0.5, 0.25, 0.125}, y;
  for (double v : x) y.push_back(3 * std::pow(v, 4));
  const SlopeFit s = loglog_slope(x, y);
  EXPECT_NEAR(s.slope, 4.0, 1e-12);
  EXPECT_NEAR(s.r_squared, 1.0, 1e-12);
}

TEST(Expansion, BartnikBound) {
  EXPECT_EQ(bartnik_lower_bound(CurvaturePacket{}, 0.1, 1.0).value, 0.0);
  metrics::Conformal c;
  c.phi.terms = {{-1.0 / 12, {2, 0, 0}}, {-1.0 / 12, {0, 2, 0}}, {-1.0 / 12, {0, 0, 2}}};
  const auto b = bartnik_lower_bound(curvature_packet(MetricField(c), Vec3::Zero()), 0.1, 1.0);
  EXPECT_NEAR(b.leading, 2.0 * 1e-3 / 12, 1e-15);
  const auto s = bartnik_lower_bound(curvature_packet(MetricField(metrics::Schwarzschild{}), Vec3(4, 0, 0)), 0.1, 1.0);
  EXPECT_NEAR(s.value, 6.0 / 4096 * 1e-5 / 90, 1e-18);
  EXPECT_GT(s.value, 0.0);
  EXPECT_THROW(bartnik_lower_bound(CurvaturePacket{}, 0.5, 1.0), RadiusOutOfRange);
  EXPECT_THROW(bartnik_lower_bound(CurvaturePacket{}, 0.0, 1.0), RadiusOutOfRange);
}

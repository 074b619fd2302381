#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hawking/harmonics.hpp"
#include "hawking/surface.hpp"

using namespace hawking;

namespace {

const SphereGrid& grid() {
  static const SphereGrid g = build_grid(24, 48);
  return g;
}

HarmonicField random_field(std::mt19937_64& rng, int L) {
  std::normal_distribution<double> n(0, 1);
  HarmonicField f(L);
  for (double& c : f.coeffs) c = n(rng);
  return f;
}

std::vector<double> sample(const std::function<double(const Vec3&)>& f) {
  std::vector<double> v(grid().size());
  for (int n = 0; n < grid().size(); ++n) v[n] = f(grid().directions[n]);
  return v;
}

}  // namespace

TEST(Harmonics, BasisIsOrthonormalUnderQuadrature) {
  const SphericalTransform tr(grid(), 8);
  for (int l1 = 0; l1 <= 8; ++l1)
    for (int m1 = -l1; m1 <= l1; ++m1) {
      HarmonicField f(8);
      f.coeff(l1, m1) = 1.0;
      const HarmonicField back = analyze(tr, synthesize(tr, f), 8);
      for (size_t i = 0; i < back.coeffs.size(); ++i)
        EXPECT_NEAR(back.coeffs[i], i == static_cast<size_t>(HarmonicField::index(l1, m1)) ? 1.0 : 0.0, 1e-13);
    }
}

TEST(Harmonics, ConstantAndQuadraticContent) {
  const SphericalTransform tr(grid());
  const HarmonicField one = analyze(tr, sample([](const Vec3&) { return 1.0; }), 6);
  EXPECT_NEAR(one.coeff(0, 0), std::sqrt(4 * std::numbers::pi), 1e-12);
  for (size_t i = 1; i < one.coeffs.size(); ++i) EXPECT_NEAR(one.coeffs[i], 0.0, 1e-12);
  const HarmonicField q = analyze(tr, sample([](const Vec3& x) { return x[0] * x[0] - x[1] * x[1]; }), 6);
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m)
      if (l != 2) EXPECT_NEAR(q.coeff(l, m), 0.0, 1e-13);
  EXPECT_GT(std::abs(q.coeff(2, 2)), 0.1);
}

TEST(Harmonics, ClosedFormHarmonics) {
  // Y_10 = sqrt(3 / 4 pi) cos(theta), Y_22 = sqrt(15 / 16 pi) sin^2(theta) cos(2 phi).
  const double th = 0.7, ph = 1.9;
  EXPECT_NEAR(real_spherical_harmonic(1, 0, th, ph), std::sqrt(3 / (4 * std::numbers::pi)) * std::cos(th), 1e-15);
  EXPECT_NEAR(real_spherical_harmonic(2, 2, th, ph),
              std::sqrt(15 / (16 * std::numbers::pi)) * std::pow(std::sin(th), 2) * std::cos(2 * ph), 1e-15);
  EXPECT_NEAR(real_spherical_harmonic(1, -1, th, ph),
              std::sqrt(3 / (4 * std::numbers::pi)) * std::sin(th) * std::sin(ph), 1e-15);
}

TEST(Harmonics, RoundTripAndParsevalProperty) {
  std::mt19937_64 rng(31);
  const SphericalTransform tr(grid());
  for (int t = 0; t < 5; ++t) {
    const HarmonicField f = random_field(rng, 12);
    const std::vector<double> v = synthesize(tr, f);
    const HarmonicField back = analyze(tr, v, 12);
    double err = 0;
    for (size_t i = 0; i < f.coeffs.size(); ++i) err = std::max(err, std::abs(f.coeffs[i] - back.coeffs[i]));
    EXPECT_LT(err, 1e-11);
    std::vector<double> sq(v.size());
    for (size_t i = 0; i < v.size(); ++i) sq[i] = v[i] * v[i];
    EXPECT_NEAR(integrate(grid(), sq), f.norm() * f.norm(), 1e-10 * f.norm() * f.norm());
  }
}

TEST(Harmonics, BandLimit) {
  const SphericalTransform tr(grid());
  EXPECT_EQ(tr.band_limit(), 22);
  EXPECT_THROW(analyze(tr, std::vector<double>(grid().size(), 0.0), 23), BandLimitExceeded);
  EXPECT_THROW(SphericalTransform(grid(), 30), BandLimitExceeded);
}

TEST(Harmonics, SpectralOperatorsEigenvalues) {
  HarmonicField f(3);
  for (double& c : f.coeffs) c = 1.0;
  const HarmonicField b = apply_bilaplacian_shifted(f);
  EXPECT_EQ(b.coeff(0, 0), 0.0);
  EXPECT_EQ(b.coeff(1, -1), 0.0);
  EXPECT_EQ(b.coeff(2, 1), 24.0);
  EXPECT_EQ(b.coeff(3, 0), 120.0);
  const HarmonicField k = kernel_projection(f);
  EXPECT_EQ(k.coeff(1, 1), 0.0);
  EXPECT_EQ(k.coeff(2, 0), 1.0);
  EXPECT_EQ(apply_laplacian(f).coeff(3, 2), -12.0);
}

TEST(Harmonics, SolveConstrained) {
  const SphericalTransform tr(grid());
  const auto xy = sample([](const Vec3& x) { return x[0] * x[0] - x[1] * x[1]; });
  HarmonicField rhs = analyze(tr, xy, 4);
  rhs *= 24.0;
  const HarmonicField w = solve_constrained(rhs);
  const auto wv = synthesize(tr, w);
  for (size_t i = 0; i < wv.size(); ++i) EXPECT_NEAR(wv[i], xy[i], 1e-13);

  HarmonicField low(3);
  low.coeff(0, 0) = 2.0;
  low.coeff(1, 1) = -1.0;
  EXPECT_EQ(solve_constrained(low).norm(), 0.0);

  std::mt19937_64 rng(5);
  const HarmonicField r = random_field(rng, 10);
  const HarmonicField sol = solve_constrained(r);
  const HarmonicField lhs = apply_bilaplacian_shifted(sol), pr = kernel_projection(r);
  double err = 0;
  for (size_t i = 0; i < lhs.coeffs.size(); ++i) err += std::pow(lhs.coeffs[i] - pr.coeffs[i], 2);
  EXPECT_LT(std::sqrt(err), 1e-11);
  for (int l = 0; l < 2; ++l)
    for (int m = -l; m <= l; ++m) EXPECT_EQ(sol.coeff(l, m), 0.0);
}

// Round-sphere Laplacian of band-limited fields against the eigenvalue rule.
TEST(Harmonics, DerivativesSpectralAndFiniteDifference) {
  std::mt19937_64 rng(9);
  const SphericalTransform tr(grid());
  const HarmonicField f = random_field(rng, 6);
  const auto lap_exact = synthesize(tr, apply_laplacian(f));
  const auto v = synthesize(tr, f);
  const GridDifferentiator spectral(grid(), DiffScheme::Spectral);
  const auto ls = round_laplacian(grid(), spectral(v));
  double es = 0;
  for (size_t i = 0; i < v.size(); ++i) es = std::max(es, std::abs(ls[i] - lap_exact[i]));
  EXPECT_LT(es, 1e-10);

  // Fourth order stencils: doubling the resolution cuts the error by about 16.
  auto fd_error = [&](int nt) {
    const SphereGrid g = build_grid(nt, 2 * nt);
    const SphericalTransform t(g);
    const auto vv = synthesize(t, f), ex = synthesize(t, apply_laplacian(f));
    const GridDifferentiator fd(g, DiffScheme::FiniteDifference4);
    const auto lf = round_laplacian(g, fd(vv));
    double e = 0;
    for (size_t i = 0; i < vv.size(); ++i) e = std::max(e, std::abs(lf[i] - ex[i]));
    return e;
  };
  const double e1 = fd_error(32), e2 = fd_error(64);
  EXPECT_LT(e2, e1 / 8.0);
}

TEST(Harmonics, OptimalPerturbationFixtures) {
  // Einstein packet: wbar vanishes identically.
  CurvaturePacket ein;
  ein.ricci = 2.0 * Mat3::Identity();
  ein.scalar = 6.0;
  EXPECT_LT(optimal_perturbation(ein).wbar.norm(), 1e-14);
  EXPECT_NEAR(optimal_perturbation(ein).lambda, 4.0, 1e-15);

  // Ric = diag(1, 0, 0), Sc = 1: wbar = -x^2/6 + 1/18.
  CurvaturePacket d;
  d.ricci = Mat3::Zero();
  d.ricci(0, 0) = 1.0;
  d.scalar = 1.0;
  const OptimalPerturbation op = optimal_perturbation(d);
  const SphericalTransform tr(grid());
  const auto v = synthesize(tr, op.wbar);
  for (int n = 0; n < grid().size(); ++n) {
    const double x = grid().directions[n][0];
    EXPECT_NEAR(v[n], -x * x / 6 + 1.0 / 18, 1e-14);
  }
  EXPECT_NEAR(op.wbar.coeff(0, 0), 0.0, 1e-15);
  for (int m = -1; m <= 1; ++m) EXPECT_NEAR(op.wbar.coeff(1, m), 0.0, 1e-15);
  EXPECT_LT(pde_residual(d, op.wbar), 1e-10);
  EXPECT_EQ(pde_residual(CurvaturePacket{}, HarmonicField(2)), 0.0);
}

TEST(Harmonics, SchwarzschildProfileMatchesPointwiseFormula) {
  const CurvaturePacket cp = curvature_packet(MetricField(metrics::Schwarzschild{}), Vec3(4, 0, 0));
  const OptimalPerturbation op = optimal_perturbation(cp);
  const SphericalTransform tr(grid());
  const HarmonicField direct =
      analyze(tr, sample([&](const Vec3& t) { return -ricci_quadratic(cp, t) / 6 + cp.scalar / 18; }), 6);
  for (int l = 0; l <= 2; ++l)
    for (int m = -l; m <= l; ++m) EXPECT_NEAR(op.wbar.coeff(l, m), direct.coeff(l, m), 1e-10);
  for (int l = 3; l <= 6; ++l)
    for (int m = -l; m <= l; ++m) EXPECT_NEAR(direct.coeff(l, m), 0.0, 1e-12);
}

// Ric(Theta, Theta) - Sc/3 is a pure degree two field; its integral is (4 pi / 3) Sc.
TEST(Harmonics, RicciQuadraticIdentitiesProperty) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n(0, 1);
  const SphericalTransform tr(grid());
  for (int t = 0; t < 10; ++t) {
    CurvaturePacket cp;
    Mat3 a;
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = n(rng);
    cp.ricci = a + a.transpose();
    cp.scalar = cp.ricci.trace();
    const auto f = sample([&](const Vec3& x) { return ricci_quadratic(cp, x) - cp.scalar / 3; });
    const HarmonicField h = analyze(tr, f, 8);
    for (int l = 0; l <= 8; ++l)
      for (int m = -l; m <= l; ++m)
        if (l != 2) EXPECT_NEAR(h.coeff(l, m), 0.0, 1e-10);
    const auto q = sample([&](const Vec3& x) { return ricci_quadratic(cp, x); });
    EXPECT_NEAR(integrate(grid(), q), 4 * std::numbers::pi / 3 * cp.scalar, 1e-10 * std::max(1.0, std::abs(cp.scalar)));
    EXPECT_LT(pde_residual(cp, optimal_perturbation(cp).wbar), 1e-9);
  }
}

TEST(Harmonics, CoefficientCsv) {
  HarmonicField f(1);
  f.coeff(1, -1) = 0.1;
  std::ostringstream os;
  export_coefficients_csv(os, f);
  EXPECT_EQ(os.str(), "l,m,value\n0,0,0\n1,-1,0.10000000000000001\n1,0,0\n1,1,0\n");
}

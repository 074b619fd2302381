#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "hawking/errors.hpp"
#include "hawking/geodesics.hpp"
#include "hawking/harmonics.hpp"
#include "hawking/manifold.hpp"
#include "hawking/spectral.hpp"
#include "hawking/surface.hpp"

namespace hawking {

enum class PerturbationMode { Optimal, Unperturbed, Generalized };

inline const char* to_string(PerturbationMode m) {
  switch (m) {
    case PerturbationMode::Optimal: return "optimal";
    case PerturbationMode::Unperturbed: return "unperturbed";
    default: return "generalized";
  }
}

// Bundles the grid, the differentiation scheme and the integrator settings
// used to turn (p, rho, w) into a surface and its Hawking mass.
class SurfaceEvaluator {
 public:
  SurfaceEvaluator(const SphereGrid& grid, DiffScheme scheme = DiffScheme::Spectral, GeodesicConfig cfg = {})
      : grid_(grid), diff_(grid, scheme), transform_(grid), cfg_(cfg) {}

  struct Evaluation {
    SphereEmbedding embedding;
    EmbeddedSurface surface;
    ExtrinsicGeometry geometry;
    HawkingReport report;
  };

  Evaluation evaluate(const MetricField& metric, const Vec3& p, double rho, const std::vector<double>& w,
                      double K = 0.0, bool with_ricci = false) const {
    Evaluation e;
    e.embedding = embed_sphere(metric, p, rho, w, grid_, cfg_);
    e.surface = make_surface(diff_, e.embedding);
    e.geometry = extrinsic_geometry(metric, e.surface, with_ricci);
    e.report = hawking_mass(grid_, e.geometry, K);
    return e;
  }

  HawkingReport mass(const MetricField& metric, const Vec3& p, double rho, const std::vector<double>& w,
                     double K = 0.0) const {
    return evaluate(metric, p, rho, w, K).report;
  }

  std::vector<double> zero_field() const { return std::vector<double>(grid_.size(), 0.0); }

  const SphereGrid& grid() const { return grid_; }
  const GridDifferentiator& differentiator() const { return diff_; }
  const SphericalTransform& transform() const { return transform_; }
  const GeodesicConfig& geodesic_config() const { return cfg_; }

 private:
  const SphereGrid& grid_;
  GridDifferentiator diff_;
  SphericalTransform transform_;
  GeodesicConfig cfg_;
};

struct LadderConfig {
  double rho0 = 0.2;
  int levels = 6;
  double ratio = 0.5;
};

struct PredictedCoefficients {
  PerturbationMode mode = PerturbationMode::Optimal;
  double K = 0.0;
  double c3 = 0.0;
  double c5 = 0.0;
  // Coefficients of rho^2 and rho^4 in 16 pi - W - 4 K A.
  double willmore_c2 = 0.0;
  double willmore_c4 = 0.0;
};

inline PredictedCoefficients predicted_coefficients(const CurvaturePacket& cp, PerturbationMode mode, double K = 0.0) {
  const double pi = std::numbers::pi;
  const double sc = cp.scalar, lap = cp.laplacian_scalar, s2 = cp.traceless_norm2;
  PredictedCoefficients pc;
  pc.mode = mode;
  pc.K = mode == PerturbationMode::Generalized ? K : 0.0;
  switch (mode) {
    case PerturbationMode::Optimal:
      pc.c3 = sc / 12.0;
      pc.c5 = lap / 120.0 + s2 / 90.0 - sc * sc / 144.0;
      pc.willmore_c2 = 8.0 * pi / 3.0 * sc;
      pc.willmore_c4 = 4.0 * pi / 15.0 * lap + 16.0 * pi / 45.0 * s2 - 4.0 * pi / 27.0 * sc * sc;
      break;
    case PerturbationMode::Unperturbed:
      pc.c3 = sc / 12.0;
      pc.c5 = -(sc * sc / 144.0 - lap / 120.0);
      pc.willmore_c2 = 8.0 * pi / 3.0 * sc;
      pc.willmore_c4 = -(4.0 * pi / 27.0 * sc * sc - 4.0 * pi / 15.0 * lap);
      break;
    case PerturbationMode::Generalized:
      pc.c3 = sc / 12.0 - K / 2.0;
      pc.c5 = lap / 120.0 + s2 / 90.0 - sc * sc / 144.0 + K * sc / 24.0;
      pc.willmore_c2 = 8.0 * pi / 3.0 * sc - 16.0 * pi * K;
      pc.willmore_c4 = 4.0 * pi / 15.0 * lap + 16.0 * pi / 45.0 * s2 - 4.0 * pi / 27.0 * sc * sc +
                       8.0 * pi * K / 9.0 * sc;
      break;
  }
  return pc;
}

struct LadderSample {
  double rho = 0.0;
  double area = 0.0;
  double willmore = 0.0;
  double willmore_deficit = 0.0;
  double hawking = 0.0;
  double predicted = 0.0;  // c3 rho^3 + c5 rho^5 from the curvature packet
};

struct Ladder {
  PerturbationMode mode = PerturbationMode::Optimal;
  double K = 0.0;
  std::vector<LadderSample> samples;

  std::vector<double> radii() const {
    std::vector<double> r;
    for (const auto& s : samples) r.push_back(s.rho);
    return r;
  }
  std::vector<double> masses() const {
    std::vector<double> r;
    for (const auto& s : samples) r.push_back(s.hawking);
    return r;
  }
};

inline std::vector<double> ladder_radii(const LadderConfig& cfg) {
  std::vector<double> r;
  double rho = cfg.rho0;
  for (int k = 0; k < cfg.levels; ++k, rho *= cfg.ratio) r.push_back(rho);
  return r;
}

// Perturbation profile on the evaluator grid for a mode at radius rho.
inline std::vector<double> mode_profile(const SurfaceEvaluator& ev, const CurvaturePacket& cp, PerturbationMode mode,
                                        double rho) {
  if (mode == PerturbationMode::Unperturbed) return ev.zero_field();
  return optimal_perturbation(cp).values(ev.transform(), rho);
}

inline Ladder radius_ladder(const SurfaceEvaluator& ev, const MetricField& metric, const Vec3& p,
                            PerturbationMode mode, const LadderConfig& cfg, double K = 0.0) {
  if (cfg.levels < 5) throw FitUnstable("a radius ladder needs at least 5 radii");
  if (!(cfg.rho0 > 0.0) || cfg.rho0 >= metric.injectivity_bound(p))
    throw RadiusOutOfRange("ladder start radius must lie below the injectivity bound");
  const CurvaturePacket cp = curvature_packet(metric, p);
  const PredictedCoefficients pc = predicted_coefficients(cp, mode, K);
  const double k_used = mode == PerturbationMode::Generalized ? K : 0.0;
  Ladder lad;
  lad.mode = mode;
  lad.K = k_used;
  for (double rho : ladder_radii(cfg)) {
    const HawkingReport r = ev.mass(metric, p, rho, mode_profile(ev, cp, mode, rho), k_used);
    LadderSample s;
    s.rho = rho;
    s.area = r.area;
    s.willmore = r.willmore;
    s.willmore_deficit = r.willmore_deficit;
    s.hawking = r.hawking_mass;
    s.predicted = pc.c3 * std::pow(rho, 3) + pc.c5 * std::pow(rho, 5);
    lad.samples.push_back(s);
  }
  return lad;
}

// Weighted least squares of values against rho^powers[k], with each row
// divided by rho^powers[0] and columns scaled by the largest radius.
struct PowerFit {
  std::vector<int> powers;
  std::vector<double> coeffs;
  double condition = 0.0;
  double rms_residual = 0.0;
};

inline PowerFit fit_powers(const std::vector<double>& radii, const std::vector<double>& values,
                           const std::vector<int>& powers) {
  const int n = static_cast<int>(radii.size()), k = static_cast<int>(powers.size());
  if (n < k + 1 || n != static_cast<int>(values.size())) throw FitUnstable("not enough samples for the fit");
  double scale = 0.0;
  for (double r : radii) scale = std::max(scale, std::abs(r));
  Eigen::MatrixXd A(n, k);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) throw FitUnstable("non-finite sample in fit");
    const double t = radii[i] / scale;
    for (int j = 0; j < k; ++j) A(i, j) = std::pow(t, powers[j] - powers[0]);
    b[i] = values[i] / std::pow(radii[i], powers[0]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  PowerFit f;
  f.powers = powers;
  f.condition = sv[0] / sv[sv.size() - 1];
  if (!(f.condition <= 1e8)) throw FitUnstable("design matrix condition number above 1e8");
  const Eigen::VectorXd x = svd.solve(b);
  for (int j = 0; j < k; ++j) f.coeffs.push_back(x[j] / std::pow(scale, powers[j] - powers[0]));
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    double model = 0.0;
    for (int j = 0; j < k; ++j) model += f.coeffs[j] * std::pow(radii[i], powers[j]);
    ss += (values[i] - model) * (values[i] - model);
  }
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

struct ExpansionFit {
  std::vector<double> radii, values;
  double c3 = 0.0, c5 = 0.0, c6 = 0.0;
  double condition = 0.0;
  double rms_residual = 0.0;
};

// m_H(rho) ~ c3 rho^3 + c5 rho^5 + c6 rho^6 with weights rho^-6.
inline ExpansionFit fit_coefficients(const std::vector<double>& radii, const std::vector<double>& values) {
  if (radii.size() < 5) throw FitUnstable("coefficient fit needs at least 5 samples");
  const PowerFit pf = fit_powers(radii, values, {3, 5, 6});
  ExpansionFit f;
  f.radii = radii;
  f.values = values;
  f.c3 = pf.coeffs[0];
  f.c5 = pf.coeffs[1];
  f.c6 = pf.coeffs[2];
  f.condition = pf.condition;
  f.rms_residual = pf.rms_residual;
  return f;
}

struct Tolerances {
  double c3_abs = 2e-3;
  double c3_rel = 0.01;
  double c5_abs = 1e-7;
  double c5_rel = 0.05;
};

struct ComparisonRecord {
  double fitted_c3 = 0.0, predicted_c3 = 0.0, delta_c3 = 0.0, rel_c3 = 0.0;
  double fitted_c5 = 0.0, predicted_c5 = 0.0, delta_c5 = 0.0, rel_c5 = 0.0;
  bool pass_c3 = false, pass_c5 = false;
  bool pass() const { return pass_c3 && pass_c5; }
};

inline ComparisonRecord compare_report(const ExpansionFit& fit, const PredictedCoefficients& pred,
                                       const Tolerances& tol = {}) {
  ComparisonRecord r;
  r.fitted_c3 = fit.c3;
  r.predicted_c3 = pred.c3;
  r.delta_c3 = fit.c3 - pred.c3;
  r.rel_c3 = pred.c3 != 0.0 ? r.delta_c3 / std::abs(pred.c3) : 0.0;
  r.fitted_c5 = fit.c5;
  r.predicted_c5 = pred.c5;
  r.delta_c5 = fit.c5 - pred.c5;
  r.rel_c5 = pred.c5 != 0.0 ? r.delta_c5 / std::abs(pred.c5) : 0.0;
  r.pass_c3 = std::abs(r.delta_c3) <= std::max(tol.c3_abs, tol.c3_rel * std::abs(pred.c3));
  r.pass_c5 = std::abs(r.delta_c5) <= std::max(tol.c5_abs, tol.c5_rel * std::abs(pred.c5));
  return r;
}

// Least-squares slope of log(y) against log(x) and its coefficient of
// determination.
struct SlopeFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

inline SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) mx += std::log(x[i]) / n, my += std::log(y[i]) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx, dy = std::log(y[i]) - my;
    sxx += dx * dx, sxy += dx * dy, syy += dy * dy;
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

struct WillmoreExpansionCheck {
  PowerFit willmore;  // W - 16 pi against rho^2, rho^4, rho^5
  PowerFit area;      // |S| / (4 pi rho^2) - 1 against rho^2, rho^4
  double predicted_willmore_c2 = 0.0;  // -(8 pi / 3) Sc
  double predicted_willmore_c4 = 0.0;  // (4 pi/27) Sc^2 - (16 pi/45) |S|^2 - (4 pi/15) Delta Sc
  double predicted_area_c2 = 0.0;      // -Sc / 18
  double area_remainder_order = 0.0;   // slope of |S|/(4 pi rho^2) - (1 - Sc rho^2/18)
  std::vector<double> area_remainders;
};

inline WillmoreExpansionCheck willmore_expansion_check(const SurfaceEvaluator& ev, const MetricField& metric,
                                                       const Vec3& p, const LadderConfig& cfg) {
  const Ladder lad = radius_ladder(ev, metric, p, PerturbationMode::Optimal, cfg);
  const CurvaturePacket cp = curvature_packet(metric, p);
  const PredictedCoefficients pc = predicted_coefficients(cp, PerturbationMode::Optimal);
  std::vector<double> radii = lad.radii(), w, a;
  WillmoreExpansionCheck out;
  for (const auto& s : lad.samples) {
    w.push_back(-s.willmore_deficit);
    const double ratio = s.area / (4.0 * std::numbers::pi * s.rho * s.rho);
    a.push_back(ratio - 1.0);
    out.area_remainders.push_back(std::abs(ratio - (1.0 - cp.scalar * s.rho * s.rho / 18.0)));
  }
  out.willmore = fit_powers(radii, w, {2, 4, 5});
  out.area = fit_powers(radii, a, {2, 4});
  out.predicted_willmore_c2 = -pc.willmore_c2;
  out.predicted_willmore_c4 = -pc.willmore_c4;
  out.predicted_area_c2 = -cp.scalar / 18.0;
  bool all_positive = true;
  for (double r : out.area_remainders) all_positive = all_positive && r > 0.0;
  out.area_remainder_order = all_positive ? loglog_slope(radii, out.area_remainders).slope : 0.0;
  return out;
}

struct OrderCheck {
  std::vector<double> radii, residuals;
  double slope = 0.0;
  double r_squared = 0.0;
};

namespace detail {

// Polar coordinate frame on the unit sphere and its second derivatives.
struct PolarFrame {
  Vec3 theta, t1, t2, t11, t12, t22;
  double s = 0.0, c = 0.0;
};

inline PolarFrame polar_frame(double th, double ph) {
  PolarFrame f;
  f.s = std::sin(th), f.c = std::cos(th);
  const double cp = std::cos(ph), sp = std::sin(ph);
  f.theta = Vec3(f.s * cp, f.s * sp, f.c);
  f.t1 = Vec3(f.c * cp, f.c * sp, -f.s);
  f.t2 = Vec3(-f.s * sp, f.s * cp, 0.0);
  f.t11 = -f.theta;
  f.t12 = (f.c / f.s) * f.t2;
  f.t22 = -f.s * f.c * f.t1 - f.s * f.s * f.theta;
  return f;
}

inline double rm4(const Riemann& rm, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  double v = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) v += rm[i][j][k][l] * a[i] * b[j] * c[k] * d[l];
  return v;
}

// Second fundamental form of the Euclidean radial graph r = rho (1 - w),
// inward normal.
inline Eigen::Matrix2d flat_graph_second_form(const PolarFrame& f, double rho, double w, const Eigen::Vector2d& dw,
                                              const Eigen::Matrix2d& ddw) {
  const double r = rho * (1.0 - w);
  const Eigen::Vector2d dr = -rho * dw;
  const Eigen::Matrix2d ddr = -rho * ddw;
  const Vec3 ti[2] = {f.t1, f.t2};
  const Vec3 tij[2][2] = {{f.t11, f.t12}, {f.t12, f.t22}};
  const double ginv[2] = {1.0, 1.0 / (f.s * f.s)};
  Vec3 outward = r * f.theta;
  for (int k = 0; k < 2; ++k) outward -= ginv[k] * dr[k] * ti[k];
  const Vec3 normal = -outward.normalized();
  Eigen::Matrix2d h;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Vec3 xij = ddr(i, j) * f.theta + dr[i] * ti[j] + dr[j] * ti[i] + r * tij[i][j];
      h(i, j) = xij.dot(normal);
    }
  return h;
}

}  // namespace detail

// Truncation of the second fundamental form of S_{p,rho}(w) through rho^3.
// The purely w-dependent part is the exact flat-space radial graph form; the
// curvature part is linear in Rm(p) with the Q-terms up to rho^3.
inline Eigen::Matrix2d truncated_second_form(const Riemann& rm, double th, double ph, double rho, double w,
                                             const Eigen::Vector2d& dw, const Eigen::Matrix2d& ddw) {
  const detail::PolarFrame f = detail::polar_frame(th, ph);
  const Vec3 ti[2] = {f.t1, f.t2};
  const Vec3 tij[2][2] = {{f.t11, f.t12}, {f.t12, f.t22}};
  const double ginv[2] = {1.0, 1.0 / (f.s * f.s)};
  // dg[a][b][c] = d_a g^S_bc; only d_1 g_22 is nonzero.
  auto dg = [&](int a, int b, int c) { return (a == 0 && b == 1 && c == 1) ? 2.0 * f.s * f.c : 0.0; };
  // Q[i][j] = g(R(Theta, Theta_i) Theta, Theta_j) = Rm(Theta_j, Theta, Theta, Theta_i)
  double Q[2][2], dQ[2][2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) Q[i][j] = detail::rm4(rm, ti[j], f.theta, f.theta, ti[i]);
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        dQ[a][i][j] = detail::rm4(rm, tij[j][a], f.theta, f.theta, ti[i]) +
                      detail::rm4(rm, ti[j], ti[a], f.theta, ti[i]) +
                      detail::rm4(rm, ti[j], f.theta, ti[a], ti[i]) +
                      detail::rm4(rm, ti[j], f.theta, f.theta, tij[i][a]);
  Eigen::Matrix2d h = detail::flat_graph_second_form(f, rho, w, dw, ddw);
  const double r3 = rho * rho * rho;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double t = 2.0 / 3.0 * Q[i][j] * std::pow(1.0 - w, 3);
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          // g^S is diagonal, so g^{kn} Q_nm g^{ml} = ginv[k] Q[k][l] ginv[l].
          t += dw[k] * ginv[k] * Q[k][l] * ginv[l] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j)) / 6.0;
        }
      for (int k = 0; k < 2; ++k) t -= dw[k] * ginv[k] * (dQ[i][j][k] + dQ[j][i][k] - dQ[k][i][j]) / 6.0;
      h(i, j) += t * r3;
    }
  return h;
}

// Sup over nodes of |h_numeric - h_truncated| measured with the round metric,
// for a fixed profile w along a radius ladder, and the log-log slope.
inline OrderCheck expansion_order_check(const SurfaceEvaluator& ev, const MetricField& metric, const Vec3& p,
                                        const std::vector<double>& w, const std::vector<double>& radii) {
  if (radii.size() < 5) throw FitUnstable("order check needs at least 5 radii");
  const SphereGrid& grid = ev.grid();
  const CurvaturePacket cp = curvature_packet(metric, p);
  const GridDerivatives dw = ev.differentiator()(w);
  OrderCheck out;
  out.radii = radii;
  for (double rho : radii) {
    const auto e = ev.evaluate(metric, p, rho, w);
    double worst = 0.0;
    for (int j = 0; j < grid.n_theta; ++j)
      for (int k = 0; k < grid.n_phi; ++k) {
        const int n = grid.node(j, k);
        Eigen::Matrix2d ddw;
        ddw << dw.tt[n], dw.tp[n], dw.tp[n], dw.pp[n];
        const Eigen::Matrix2d ht = truncated_second_form(cp.riemann, grid.theta[j], grid.phi[k], rho, w[n],
                                                         Eigen::Vector2d(dw.t[n], dw.p[n]), ddw);
        const Eigen::Matrix2d d = e.geometry.nodes[n].second - ht;
        const double s = grid.sin_theta[j];
        const double norm2 = d(0, 0) * d(0, 0) + 2.0 * d(0, 1) * d(0, 1) / (s * s) + d(1, 1) * d(1, 1) / (s * s * s * s);
        worst = std::max(worst, std::sqrt(norm2));
      }
    out.residuals.push_back(worst);
  }
  bool positive = true;
  for (double r : out.residuals) positive = positive && r > 0.0;
  if (!positive) {
    out.slope = std::numeric_limits<double>::infinity();
    out.r_squared = 1.0;
    return out;
  }
  const SlopeFit sf = loglog_slope(out.radii, out.residuals);
  out.slope = sf.slope;
  out.r_squared = sf.r_squared;
  if (out.r_squared < 0.99) throw FitUnstable("order regression has R^2 below 0.99");
  return out;
}

struct BartnikBound {
  Vec3 point = Vec3::Zero();
  double rho = 0.0;
  double validity_radius = 0.0;
  double leading = 0.0;      // Sc rho^3 / 12
  double next = 0.0;         // (Delta Sc/120 + |S|^2/90 - Sc^2/144) rho^5
  double value = 0.0;        // leading + next
  bool scalar_nonnegative = true;
  std::string remainder = "O(rho^6) remainder dropped; not a rigorous bound at finite rho";
};

inline BartnikBound bartnik_lower_bound(const CurvaturePacket& cp, double rho, double rbar) {
  if (!(rho > 0.0) || !(rho < 0.5 * rbar)) throw RadiusOutOfRange("bound requires 0 < rho < rbar / 2");
  BartnikBound b;
  b.point = cp.point;
  b.rho = rho;
  b.validity_radius = rbar;
  b.leading = cp.scalar * std::pow(rho, 3) / 12.0;
  b.next = (cp.laplacian_scalar / 120.0 + cp.traceless_norm2 / 90.0 - cp.scalar * cp.scalar / 144.0) * std::pow(rho, 5);
  b.value = b.leading + b.next;
  b.scalar_nonnegative = cp.scalar >= -1e-12;
  return b;
}

}  // namespace hawking

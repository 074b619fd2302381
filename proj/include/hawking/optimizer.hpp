#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "hawking/detail/parallel.hpp"
#include "hawking/errors.hpp"
#include "hawking/expansion.hpp"
#include "hawking/harmonics.hpp"
#include "hawking/surface.hpp"

namespace hawking {

struct OptimizeConfig {
  int max_degree = 4;
  int max_iters = 500;
  double initial_step = 1.0;
  double shrink = 0.5;
  double armijo = 1e-4;
  double gradient_step = 1e-6;
  double gradient_tol = 1e-9;
  double area_tol = 1e-12;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_degree < 2) throw ConfigError("optimizer max_degree must be at least 2");
    if (max_iters < 1 || !(initial_step > 0) || !(shrink > 0 && shrink < 1) || !(gradient_step > 0) ||
        !(gradient_tol > 0) || !(area_tol > 0) || !(armijo > 0 && armijo < 1))
      throw ConfigError("optimizer settings must be positive, shrink and armijo in (0, 1)");
  }
};

struct OptimizeTraceRow {
  int iteration = 0;
  double hawking = 0.0;
  double rho = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
};

struct OptimizeResult {
  HarmonicField w_star;
  double rho_star = 0.0;
  double target_area = 0.0;
  double area = 0.0;
  double m_H_star = 0.0;
  double m_H_initial = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  double el_residual_norm = 0.0;
  double lambda = 0.0;
  bool converged = false;
  std::vector<OptimizeTraceRow> trace;
};

namespace detail {

// Hawking mass as a function of the l >= 2 coefficients at fixed area.
class ConstrainedMass {
 public:
  ConstrainedMass(const SurfaceEvaluator& ev, const MetricField& metric, const Vec3& p, double target_area,
                  const OptimizeConfig& cfg)
      : ev_(ev), metric_(metric), p_(p), target_(target_area), cfg_(cfg) {
    for (int l = 2; l <= cfg.max_degree; ++l)
      for (int m = -l; m <= l; ++m) slots_.push_back(HarmonicField::index(l, m));
  }

  int dimension() const { return static_cast<int>(slots_.size()); }

  HarmonicField field(const std::vector<double>& c) const {
    HarmonicField f(cfg_.max_degree);
    for (int i = 0; i < dimension(); ++i) f.coeffs[slots_[i]] = c[i];
    return f;
  }

  int degree_of(int i) const { return static_cast<int>(std::sqrt(static_cast<double>(slots_[i]))); }

  struct Value {
    double mass = 0.0;
    double rho = 0.0;
    double area = 0.0;
  };

  // Rescales rho by fixed-point steps rho <- rho sqrt(A* / A(rho)).
  Value operator()(const std::vector<double>& c, double rho_guess) const {
    const std::vector<double> w = synthesize(ev_.transform(), field(c));
    double rho = rho_guess;
    HawkingReport r;
    for (int it = 0; it < 30; ++it) {
      r = ev_.mass(metric_, p_, rho, w);
      const double ratio = target_ / r.area;
      if (std::abs(ratio - 1.0) < cfg_.area_tol) break;
      rho *= std::sqrt(ratio);
    }
    return {r.hawking_mass, rho, r.area};
  }

 private:
  const SurfaceEvaluator& ev_;
  const MetricField& metric_;
  Vec3 p_;
  double target_;
  OptimizeConfig cfg_;
  std::vector<int> slots_;
};

}  // namespace detail

// Lagrange multiplier minimizing the L2 norm of
// 2 Delta H + H (H^2 - 4D + 2 Ric(N,N)) - lambda H over the surface.
inline double lagrange_multiplier_estimate(const SurfaceEvaluator& ev, const MetricField& metric, const Vec3& p,
                                           double rho, const std::vector<double>& w) {
  const auto e = ev.evaluate(metric, p, rho, w, 0.0, true);
  const WillmoreOperator op = willmore_operator(ev.differentiator(), e.geometry);
  CompensatedSum num, den;
  const SphereGrid& g = ev.grid();
  for (int n = 0; n < g.size(); ++n) {
    const double wt = g.weights[n] * e.geometry.nodes[n].area_density;
    num.add(wt * op.operator_value[n] * op.mean_curvature[n]);
    den.add(wt * op.mean_curvature[n] * op.mean_curvature[n]);
  }
  return num.value() / den.value();
}

inline double lagrange_multiplier_estimate(const SurfaceEvaluator& ev, const OptimizeResult& res,
                                           const MetricField& metric, const Vec3& p) {
  return lagrange_multiplier_estimate(ev, metric, p, res.rho_star, synthesize(ev.transform(), res.w_star));
}

// Preconditioned gradient ascent of the Hawking mass over the l = 2..L
// coefficients of w, with the area held at target_area by rescaling rho.
inline OptimizeResult maximize_hawking(const SurfaceEvaluator& ev_in, const MetricField& metric, const Vec3& p,
                                       double target_area, const OptimizeConfig& cfg) {
  cfg.validate();
  if (cfg.max_degree > ev_in.transform().band_limit())
    throw BandLimitExceeded("optimizer degree exceeds the grid band limit");
  const double rho0 = std::sqrt(target_area / (4.0 * std::numbers::pi));
  if (!(rho0 > 0.0) || rho0 >= metric.injectivity_bound(p))
    throw RadiusOutOfRange("target area corresponds to a radius beyond the injectivity bound");

  // Freeze the geodesic step count so the objective is a smooth function of
  // the coefficients.
  GeodesicConfig gcfg = ev_in.geodesic_config();
  if (gcfg.uniform_steps <= 0) {
    std::vector<double> zero(ev_in.grid().size(), 0.0);
    const SphereEmbedding e = embed_sphere(metric, p, 1.2 * rho0, zero, ev_in.grid(), gcfg);
    gcfg.uniform_steps = e.steps;
  }
  const SurfaceEvaluator ev(ev_in.grid(), ev_in.differentiator().scheme(), gcfg);
  const detail::ConstrainedMass F(ev, metric, p, target_area, cfg);
  const int n = F.dimension();

  std::vector<double> c(n, 0.0);
  if (cfg.seed != 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& x : c) x = 1e-3 * rho0 * rho0 * u(rng);
  }
  std::vector<double> precond(n);
  for (int i = 0; i < n; ++i) {
    const int l = F.degree_of(i);
    const double e = l * (l + 1.0) - 2.0;
    precond[i] = 16.0 / (e * e);
  }

  OptimizeResult res;
  res.target_area = target_area;
  auto cur = F(c, rho0);
  res.m_H_initial = cur.mass;
  double alpha = cfg.initial_step / rho0;
  std::vector<double> grad(n), trial(n);
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    detail::parallel_for(n, [&](int i) {
      std::vector<double> cp = c, cm = c;
      cp[i] += cfg.gradient_step;
      cm[i] -= cfg.gradient_step;
      grad[i] = (F(cp, cur.rho).mass - F(cm, cur.rho).mass) / (2.0 * cfg.gradient_step);
    });
    double gnorm = 0.0, slope = 0.0;
    for (int i = 0; i < n; ++i) gnorm += grad[i] * grad[i], slope += precond[i] * grad[i] * grad[i];
    gnorm = std::sqrt(gnorm);
    res.gradient_norm = gnorm;
    res.trace.push_back({it, cur.mass, cur.rho, gnorm, alpha});
    if (gnorm <= cfg.gradient_tol) {
      res.converged = true;
      break;
    }
    auto step_to = [&](double a) {
      for (int i = 0; i < n; ++i) trial[i] = c[i] + a * precond[i] * grad[i];
      return F(trial, cur.rho);
    };
    auto armijo_ok = [&](double a, double m) { return m >= cur.mass + cfg.armijo * a * slope; };

    double a = alpha;
    auto val = step_to(a);
    // Quadratic model along the ray refines the trial step.
    const double kappa = 2.0 * (cur.mass + a * slope - val.mass) / (a * a);
    if (kappa > 0.0) {
      const double a_model = slope / kappa;
      if (std::abs(a_model - a) > 0.1 * a) {
        const auto v2 = step_to(a_model);
        if (v2.mass > val.mass) a = a_model, val = v2;
      }
    }
    int tries = 0;
    while (!armijo_ok(a, val.mass) && tries < 40) {
      a *= cfg.shrink;
      val = step_to(a);
      ++tries;
    }
    if (!armijo_ok(a, val.mass) || !(val.mass > cur.mass)) break;  // no ascent possible at this noise level
    for (int i = 0; i < n; ++i) c[i] += a * precond[i] * grad[i];
    cur = val;
    alpha = a;
  }
  res.iterations = it;
  res.w_star = F.field(c);
  res.rho_star = cur.rho;
  res.area = cur.area;
  res.m_H_star = cur.mass;
  const std::vector<double> w = synthesize(ev.transform(), res.w_star);
  res.lambda = lagrange_multiplier_estimate(ev, metric, p, res.rho_star, w);
  res.el_residual_norm = sup_norm(willmore_el_residual(ev.differentiator(), metric,
                                                       ev.evaluate(metric, p, res.rho_star, w).surface, res.lambda));
  return res;
}

}  // namespace hawking

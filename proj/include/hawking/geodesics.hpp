#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hawking/detail/parallel.hpp"
#include "hawking/errors.hpp"
#include "hawking/manifold.hpp"
#include "hawking/sphere_grid.hpp"

namespace hawking {

struct GeodesicConfig {
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  int max_steps = 20000;
  // Steps used for every node of an embedded sphere; 0 picks a count from an
  // adaptive pilot run on the longest ray.
  int uniform_steps = 0;
  int min_uniform_steps = 32;
};

struct GeodesicState {
  Vec3 offset = Vec3::Zero();  // x - p
  Vec3 velocity = Vec3::Zero();
};

struct GeodesicResult {
  Vec3 position = Vec3::Zero();
  Vec3 offset = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  int steps = 0;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
  static constexpr double e[7] = {71.0 / 57600,      0.0, -71.0 / 16695, 71.0 / 1920,
                                  -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
};

// One Dormand-Prince step of the geodesic equation; returns the 5th order
// solution and writes the embedded error estimate to `err`.
inline GeodesicState dp_step(const MetricField& metric, const Vec3& p, const GeodesicState& s, double h,
                             GeodesicState* err) {
  using T = DormandPrince;
  Vec3 ky[7], ku[7];
  for (int i = 0; i < 7; ++i) {
    Vec3 y = s.offset, u = s.velocity;
    for (int j = 0; j < i; ++j) {
      y += h * T::a[i][j] * ky[j];
      u += h * T::a[i][j] * ku[j];
    }
    ky[i] = u;
    ku[i] = geodesic_acceleration(metric, p + y, u);
  }
  GeodesicState out = s;
  for (int i = 0; i < 7; ++i) {
    out.offset += h * T::b[i] * ky[i];
    out.velocity += h * T::b[i] * ku[i];
  }
  if (err) {
    err->offset.setZero();
    err->velocity.setZero();
    for (int i = 0; i < 7; ++i) {
      err->offset += h * T::e[i] * ky[i];
      err->velocity += h * T::e[i] * ku[i];
    }
  }
  return out;
}

inline double error_norm(const GeodesicState& a, const GeodesicState& b, const GeodesicState& err,
                         const GeodesicConfig& cfg) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sy = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(a.offset[i]), std::abs(b.offset[i]));
    const double su = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(a.velocity[i]), std::abs(b.velocity[i]));
    worst = std::max({worst, std::abs(err.offset[i]) / sy, std::abs(err.velocity[i]) / su});
  }
  return worst;
}

template <class Fn>
decltype(auto) guard_domain(Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    throw DomainExit(std::string("geodesic left the chart domain: ") + e.what());
  }
}

}  // namespace detail

// Adaptive integration of the geodesic from p with initial velocity s.velocity,
// starting at offset s.offset, over parameter time [0, t_end].
inline GeodesicResult integrate_geodesic(const MetricField& metric, const Vec3& p, GeodesicState s, double t_end,
                                         const GeodesicConfig& cfg = {}) {
  return detail::guard_domain([&] {
    metric.check_domain(p + s.offset);
    double t = 0.0, h = t_end / 8.0;
    int steps = 0;
    while (t < t_end) {
      if (steps >= cfg.max_steps) throw StepLimit("geodesic integration exceeded max_steps");
      h = std::min(h, t_end - t);
      GeodesicState err;
      const GeodesicState next = detail::dp_step(metric, p, s, h, &err);
      const double en = detail::error_norm(s, next, err, cfg);
      if (en <= 1.0) {
        s = next;
        t += h;
        ++steps;
      }
      const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= factor;
    }
    return GeodesicResult{p + s.offset, s.offset, s.velocity, steps};
  });
}

// exp_p(v): endpoint at parameter 1 of the geodesic with initial velocity v.
inline GeodesicResult exp_map(const MetricField& metric, const Vec3& p, const Vec3& v,
                              const GeodesicConfig& cfg = {}) {
  return integrate_geodesic(metric, p, GeodesicState{Vec3::Zero(), v}, 1.0, cfg);
}

// Fixed-step integration over [0, 1] with the 5th order Dormand-Prince scheme.
inline GeodesicResult exp_map_uniform(const MetricField& metric, const Vec3& p, const Vec3& v, int steps) {
  return detail::guard_domain([&] {
    GeodesicState s{Vec3::Zero(), v};
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) s = detail::dp_step(metric, p, s, h, nullptr);
    return GeodesicResult{p + s.offset, s.offset, s.velocity, steps};
  });
}

// Positions along the geodesic at t = k / samples, k = 0..samples.
inline std::vector<GeodesicResult> geodesic_flow(const MetricField& metric, const Vec3& p, const Vec3& v,
                                                 int samples, const GeodesicConfig& cfg = {}) {
  std::vector<GeodesicResult> out;
  GeodesicState s{Vec3::Zero(), v};
  out.push_back({p, Vec3::Zero(), v, 0});
  for (int k = 0; k < samples; ++k) {
    const GeodesicResult r = integrate_geodesic(metric, p, s, 1.0 / samples, cfg);
    s = {r.offset, r.velocity};
    out.push_back(r);
  }
  return out;
}

// Perturbed geodesic sphere: nodes exp_p(rho (1 - w) Theta) over a grid.
struct SphereEmbedding {
  Vec3 origin = Vec3::Zero();
  double rho = 0.0;
  Mat3 frame = Mat3::Identity();
  std::vector<double> w;
  std::vector<Vec3> offsets;     // X - p
  std::vector<Vec3> velocities;  // geodesic velocity at the endpoint, points outward
  int steps = 0;
};

inline SphereEmbedding embed_sphere(const MetricField& metric, const Vec3& p, double rho,
                                    const std::vector<double>& w, const SphereGrid& grid,
                                    const GeodesicConfig& cfg = {}) {
  if (static_cast<int>(w.size()) != grid.size()) throw PerturbationTooLarge("perturbation size does not match grid");
  double wmax = 0.0, reach = 0.0;
  int longest = 0;
  for (int n = 0; n < grid.size(); ++n) {
    wmax = std::max(wmax, std::abs(w[n]));
    if (1.0 - w[n] > reach) reach = 1.0 - w[n], longest = n;
  }
  if (wmax >= 1.0) throw PerturbationTooLarge("perturbation sup norm must be below 1");
  if (!(rho > 0.0)) throw RadiusOutOfRange("sphere radius must be positive");
  if (rho * reach >= metric.injectivity_bound(p))
    throw RadiusOutOfRange("sphere reaches beyond the injectivity bound of the chart");

  SphereEmbedding emb;
  emb.origin = p;
  emb.rho = rho;
  emb.frame = orthonormal_frame(metric, p);
  emb.w = w;
  auto velocity = [&](int n) -> Vec3 { return rho * (1.0 - w[n]) * (emb.frame * grid.directions[n]); };

  int steps = cfg.uniform_steps;
  if (steps <= 0) {
    const GeodesicResult pilot = exp_map(metric, p, velocity(longest), cfg);
    steps = std::max(cfg.min_uniform_steps, (pilot.steps * 5 + 3) / 4);
  }
  emb.steps = steps;
  emb.offsets.resize(grid.size());
  emb.velocities.resize(grid.size());
  detail::parallel_for(grid.size(), [&](int n) {
    const GeodesicResult r = exp_map_uniform(metric, p, velocity(n), steps);
    emb.offsets[n] = r.offset;
    emb.velocities[n] = r.velocity;
  });
  return emb;
}

}  // namespace hawking

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hawking/errors.hpp"
#include "hawking/types.hpp"

namespace hawking {

// Gauss-Legendre nodes in cos(theta) times a uniform azimuthal grid.
// Nodes are stored ring by ring, theta ascending, node(j, k) = j * n_phi + k.
struct SphereGrid {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> theta, cos_theta, sin_theta, ring_weight;
  std::vector<double> phi;
  std::vector<double> weights;  // per node, sums to 4 pi
  std::vector<Vec3> directions;

  int size() const { return n_theta * n_phi; }
  int node(int j, int k) const { return j * n_phi + k; }
  // Node diametrically across the pole axis on the same ring.
  int opposite(int j, int k) const { return node(j, (k + n_phi / 2) % n_phi); }
};

// Gauss-Legendre nodes and weights on [-1, 1], nodes descending.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

inline SphereGrid build_grid(int n_theta, int n_phi) {
  if (n_theta < 8 || n_phi < 16 || n_phi % 2 != 0)
    throw GridTooCoarse("grid needs n_theta >= 8 and even n_phi >= 16, got " + std::to_string(n_theta) +
                        " x " + std::to_string(n_phi));
  SphereGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  gauss_legendre(n_theta, g.cos_theta, g.ring_weight);
  g.theta.resize(n_theta);
  g.sin_theta.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    g.theta[j] = std::acos(g.cos_theta[j]);
    g.sin_theta[j] = std::sqrt((1.0 - g.cos_theta[j]) * (1.0 + g.cos_theta[j]));
  }
  g.phi.resize(n_phi);
  for (int k = 0; k < n_phi; ++k) g.phi[k] = 2.0 * std::numbers::pi * k / n_phi;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  g.weights.resize(g.size());
  g.directions.resize(g.size());
  for (int j = 0; j < n_theta; ++j)
    for (int k = 0; k < n_phi; ++k) {
      g.weights[g.node(j, k)] = g.ring_weight[j] * dphi;
      g.directions[g.node(j, k)] =
          Vec3(g.sin_theta[j] * std::cos(g.phi[k]), g.sin_theta[j] * std::sin(g.phi[k]), g.cos_theta[j]);
    }
  return g;
}

// Neumaier compensated sum; quadrature sums over a few thousand nodes otherwise
// lose two digits, which matters for the small Hawking mass signals.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

// Quadrature of a function sampled at the nodes, against the round measure.
inline double integrate(const SphereGrid& grid, const std::vector<double>& f) {
  CompensatedSum s;
  for (int n = 0; n < grid.size(); ++n) s.add(grid.weights[n] * f[n]);
  return s.value();
}

}  // namespace hawking

#pragma once

#include <cmath>
#include <numbers>
#include <ostream>
#include <vector>

#include "hawking/errors.hpp"
#include "hawking/format.hpp"
#include "hawking/manifold.hpp"
#include "hawking/spectral.hpp"
#include "hawking/surface.hpp"

namespace hawking {

// Real spherical-harmonic coefficients up to degree L, index l*l + l + m.
struct HarmonicField {
  int max_degree = 0;
  std::vector<double> coeffs;

  HarmonicField() : coeffs(1, 0.0) {}
  explicit HarmonicField(int L) : max_degree(L), coeffs((L + 1) * (L + 1), 0.0) {}

  static int index(int l, int m) { return l * l + l + m; }
  double coeff(int l, int m) const { return l <= max_degree ? coeffs[index(l, m)] : 0.0; }
  double& coeff(int l, int m) { return coeffs[index(l, m)]; }

  double norm() const {
    double s = 0.0;
    for (double c : coeffs) s += c * c;
    return std::sqrt(s);
  }

  HarmonicField& operator*=(double s) {
    for (double& c : coeffs) c *= s;
    return *this;
  }
  friend HarmonicField operator*(double s, HarmonicField f) { return f *= s; }
};

inline HarmonicField analyze(const SphericalTransform& tr, const std::vector<double>& values, int L) {
  if (L > tr.band_limit()) throw BandLimitExceeded("requested degree exceeds the grid band limit");
  const std::vector<double> all = tr.analyze(values);
  HarmonicField f(L);
  for (int i = 0; i < static_cast<int>(f.coeffs.size()); ++i) f.coeffs[i] = all[i];
  return f;
}

inline std::vector<double> synthesize(const SphericalTransform& tr, const HarmonicField& f) {
  if (f.max_degree > tr.band_limit()) throw BandLimitExceeded("field degree exceeds the grid band limit");
  return tr.synthesize(f.coeffs);
}

template <class Fn>
HarmonicField map_degrees(HarmonicField f, Fn&& scale) {
  for (int l = 0; l <= f.max_degree; ++l)
    for (int m = -l; m <= l; ++m) f.coeff(l, m) *= scale(l);
  return f;
}

inline HarmonicField apply_laplacian(const HarmonicField& f) {
  return map_degrees(f, [](int l) { return -l * (l + 1.0); });
}

// Delta (Delta + 2): degree l scales by (-l(l+1)) (-l(l+1) + 2).
inline HarmonicField apply_bilaplacian_shifted(const HarmonicField& f) {
  return map_degrees(f, [](int l) {
    const double e = -l * (l + 1.0);
    return e * (e + 2.0);
  });
}

// Removes the l = 0, 1 content, the kernel of Delta (Delta + 2).
inline HarmonicField kernel_projection(const HarmonicField& f) {
  return map_degrees(f, [](int l) { return l < 2 ? 0.0 : 1.0; });
}

// w orthogonal to the kernel with Delta (Delta + 2) w = P rhs.
inline HarmonicField solve_constrained(const HarmonicField& rhs) {
  return map_degrees(rhs, [](int l) {
    if (l < 2) return 0.0;
    const double e = -l * (l + 1.0);
    return 1.0 / (e * (e + 2.0));
  });
}

inline void export_coefficients_csv(std::ostream& os, const HarmonicField& f) {
  os << "l,m,value\n";
  for (int l = 0; l <= f.max_degree; ++l)
    for (int m = -l; m <= l; ++m) os << l << ',' << m << ',' << num(f.coeff(l, m)) << '\n';
}

// Ric(Theta, Theta) with Theta a unit vector in the packet frame.
inline double ricci_quadratic(const CurvaturePacket& cp, const Vec3& theta) { return theta.dot(cp.ricci * theta); }

struct OptimalPerturbation {
  HarmonicField wbar;  // dimensionless profile; w = rho^2 wbar
  double lambda = 0.0;

  std::vector<double> values(const SphericalTransform& tr, double rho) const {
    std::vector<double> v = synthesize(tr, wbar);
    for (double& x : v) x *= rho * rho;
    return v;
  }
};

namespace detail {

inline const SphereGrid& small_grid() {
  static const SphereGrid g = build_grid(8, 16);
  return g;
}

}  // namespace detail

// wbar(Theta) = -Ric(Theta, Theta)/6 + Sc/18, projected exactly onto degrees
// <= 2 (the profile is a quadratic form, so nothing is lost), and
// lambda = (2/3) Sc.
inline OptimalPerturbation optimal_perturbation(const CurvaturePacket& cp) {
  const SphereGrid& g = detail::small_grid();
  const SphericalTransform tr(g);
  std::vector<double> v(g.size());
  for (int n = 0; n < g.size(); ++n) v[n] = -ricci_quadratic(cp, g.directions[n]) / 6.0 + cp.scalar / 18.0;
  OptimalPerturbation op;
  op.wbar = analyze(tr, v, 2);
  op.lambda = 2.0 * cp.scalar / 3.0;
  return op;
}

// Laplacian on the unit sphere from coordinate derivatives.
inline std::vector<double> round_laplacian(const SphereGrid& grid, const GridDerivatives& d) {
  std::vector<double> out(grid.size());
  for (int j = 0; j < grid.n_theta; ++j) {
    const double s = grid.sin_theta[j], c = grid.cos_theta[j];
    for (int k = 0; k < grid.n_phi; ++k) {
      const int n = grid.node(j, k);
      out[n] = d.tt[n] + (c / s) * d.t[n] + d.pp[n] / (s * s);
    }
  }
  return out;
}

// L2 norm of the spectral coefficients of
// Delta(Delta+2) wbar - [ (1/3) Delta Ric(Theta,Theta) - 2 Ric(Theta,Theta) + lambda ]
// with lambda = (2/3) Sc.  The bracket is sampled on a grid, its Laplacian is
// taken numerically, and the result is analyzed.
inline double pde_residual(const CurvaturePacket& cp, const HarmonicField& wbar) {
  static const SphereGrid g = build_grid(16, 32);
  const SphericalTransform tr(g);
  std::vector<double> ric(g.size());
  for (int n = 0; n < g.size(); ++n) ric[n] = ricci_quadratic(cp, g.directions[n]);
  const std::vector<double> lap = round_laplacian(g, tr.differentiate_values(ric));
  const double lambda = 2.0 * cp.scalar / 3.0;
  std::vector<double> bracket(g.size());
  for (int n = 0; n < g.size(); ++n) bracket[n] = lap[n] / 3.0 - 2.0 * ric[n] + lambda;
  const int L = tr.band_limit();
  const HarmonicField rhs = analyze(tr, bracket, L);
  HarmonicField lhs(L);
  for (int l = 0; l <= std::min(L, wbar.max_degree); ++l)
    for (int m = -l; m <= l; ++m) lhs.coeff(l, m) = wbar.coeff(l, m);
  lhs = apply_bilaplacian_shifted(lhs);
  double s = 0.0;
  for (size_t i = 0; i < lhs.coeffs.size(); ++i) s += (lhs.coeffs[i] - rhs.coeffs[i]) * (lhs.coeffs[i] - rhs.coeffs[i]);
  return std::sqrt(s);
}

// Pieces of the area-constrained Willmore equation
// 2 Delta H + H (H^2 - 4D + 2 Ric(N,N)) = lambda H.
struct WillmoreOperator {
  std::vector<double> mean_curvature;
  std::vector<double> operator_value;  // left-hand side without lambda
};

inline WillmoreOperator willmore_operator(const GridDifferentiator& diff, const ExtrinsicGeometry& geo) {
  const int n = static_cast<int>(geo.nodes.size());
  WillmoreOperator out;
  out.mean_curvature.resize(n);
  for (int i = 0; i < n; ++i) out.mean_curvature[i] = geo.nodes[i].mean_curvature;
  const std::vector<double> lap = surface_laplacian(diff, geo, out.mean_curvature);
  out.operator_value.resize(n);
  for (int i = 0; i < n; ++i) {
    const NodeGeometry& ng = geo.nodes[i];
    const double H = ng.mean_curvature;
    out.operator_value[i] = 2.0 * lap[i] + H * (H * H - 4.0 * ng.gauss_ratio + 2.0 * ng.ricci_normal);
  }
  return out;
}

inline std::vector<double> willmore_el_residual(const GridDifferentiator& diff, const MetricField& metric,
                                                const EmbeddedSurface& surf, double lambda) {
  const ExtrinsicGeometry geo = extrinsic_geometry(metric, surf, true);
  const WillmoreOperator op = willmore_operator(diff, geo);
  std::vector<double> r(op.operator_value.size());
  for (size_t i = 0; i < r.size(); ++i) r[i] = op.operator_value[i] - lambda * op.mean_curvature[i];
  return r;
}

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace hawking

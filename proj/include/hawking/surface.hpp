#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "hawking/detail/parallel.hpp"
#include "hawking/errors.hpp"
#include "hawking/format.hpp"
#include "hawking/geodesics.hpp"
#include "hawking/manifold.hpp"
#include "hawking/spectral.hpp"
#include "hawking/sphere_grid.hpp"

namespace hawking {

enum class DiffScheme { Spectral, FiniteDifference4 };

inline const char* to_string(DiffScheme s) { return s == DiffScheme::Spectral ? "spectral" : "fd4"; }

namespace detail {

// Fornberg's weights for derivatives 0..M at x0 from nodes x[0..n).
// c[m * n + i] multiplies f(x[i]) for the m-th derivative.
inline void fornberg_weights(double x0, const double* x, int n, int M, double* c) {
  std::fill(c, c + (M + 1) * n, 0.0);
  double c1 = 1.0, c4 = x[0] - x0;
  c[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, M);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k * n + i] = c1 * (k * c[(k - 1) * n + i - 1] - c5 * c[k * n + i - 1]) / c2;
        c[i] = -c1 * c5 * c[i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k * n + j] = (c4 * c[k * n + j] - k * c[(k - 1) * n + j]) / c3;
      c[j] = c4 * c[j] / c3;
    }
    c1 = c2;
  }
}

// Fourth order differences on the grid.  Meridians are continued through the
// poles: the point at theta = -t on meridian phi is (t, phi + pi).
class FiniteDifference4 {
 public:
  explicit FiniteDifference4(const SphereGrid& grid) : grid_(grid) {
    const int nt = grid.n_theta;
    w1_.resize(nt * 5);
    w2_.resize(nt * 5);
    for (int j = 0; j < nt; ++j) {
      double x[5], c[15];
      for (int s = 0; s < 5; ++s) x[s] = extended_theta(j + s - 2);
      fornberg_weights(grid.theta[j], x, 5, 2, c);
      for (int s = 0; s < 5; ++s) {
        w1_[j * 5 + s] = c[5 + s];
        w2_[j * 5 + s] = c[10 + s];
      }
    }
  }

  GridDerivatives differentiate(const std::vector<double>& f) const {
    const int n = grid_.size();
    GridDerivatives d;
    d.f = f;
    d.p.resize(n);
    d.pp.resize(n);
    d.t.resize(n);
    d.tt.resize(n);
    d.tp.resize(n);
    const double h = 2.0 * std::numbers::pi / grid_.n_phi;
    for (int j = 0; j < grid_.n_theta; ++j)
      for (int k = 0; k < grid_.n_phi; ++k) {
        auto at = [&](int dk) { return f[grid_.node(j, (k + dk + grid_.n_phi) % grid_.n_phi)]; };
        const int idx = grid_.node(j, k);
        d.p[idx] = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
        d.pp[idx] = (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h);
      }
    for (int j = 0; j < grid_.n_theta; ++j)
      for (int k = 0; k < grid_.n_phi; ++k) {
        double t = 0.0, tt = 0.0, tp = 0.0;
        for (int s = 0; s < 5; ++s) {
          const int src = extended_node(j + s - 2, k);
          t += w1_[j * 5 + s] * f[src];
          tt += w2_[j * 5 + s] * f[src];
          tp += w1_[j * 5 + s] * d.p[src];
        }
        const int idx = grid_.node(j, k);
        d.t[idx] = t;
        d.tt[idx] = tt;
        d.tp[idx] = tp;
      }
    return d;
  }

 private:
  double extended_theta(int jj) const {
    const int nt = grid_.n_theta;
    if (jj < 0) return -grid_.theta[-jj - 1];
    if (jj >= nt) return 2.0 * std::numbers::pi - grid_.theta[2 * nt - 1 - jj];
    return grid_.theta[jj];
  }
  int extended_node(int jj, int k) const {
    const int nt = grid_.n_theta;
    if (jj < 0) return grid_.opposite(-jj - 1, k);
    if (jj >= nt) return grid_.opposite(2 * nt - 1 - jj, k);
    return grid_.node(jj, k);
  }

  const SphereGrid& grid_;
  std::vector<double> w1_, w2_;
};

}  // namespace detail

// Differentiates scalar fields sampled on a grid with the selected scheme.
class GridDifferentiator {
 public:
  GridDifferentiator(const SphereGrid& grid, DiffScheme scheme) : grid_(grid), scheme_(scheme) {
    if (scheme == DiffScheme::Spectral)
      spectral_ = std::make_unique<SphericalTransform>(grid);
    else
      fd_ = std::make_unique<detail::FiniteDifference4>(grid);
  }

  GridDerivatives operator()(const std::vector<double>& f) const {
    return spectral_ ? spectral_->differentiate_values(f) : fd_->differentiate(f);
  }

  const SphereGrid& grid() const { return grid_; }
  DiffScheme scheme() const { return scheme_; }

 private:
  const SphereGrid& grid_;
  DiffScheme scheme_;
  std::unique_ptr<SphericalTransform> spectral_;
  std::unique_ptr<detail::FiniteDifference4> fd_;
};

// Coordinate derivatives of the embedding X(theta, phi); index 1 is theta.
struct SurfaceTangents {
  std::vector<Vec3> x1, x2, x11, x12, x22;
};

inline SurfaceTangents surface_tangents(const GridDifferentiator& diff, const std::vector<Vec3>& offsets) {
  const int n = diff.grid().size();
  SurfaceTangents t;
  t.x1.resize(n);
  t.x2.resize(n);
  t.x11.resize(n);
  t.x12.resize(n);
  t.x22.resize(n);
  std::vector<double> comp(n);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < n; ++i) comp[i] = offsets[i][c];
    const GridDerivatives d = diff(comp);
    for (int i = 0; i < n; ++i) {
      t.x1[i][c] = d.t[i];
      t.x2[i][c] = d.p[i];
      t.x11[i][c] = d.tt[i];
      t.x12[i][c] = d.tp[i];
      t.x22[i][c] = d.pp[i];
    }
  }
  return t;
}

inline SurfaceTangents surface_tangents(const SphereGrid& grid, const std::vector<Vec3>& offsets,
                                        DiffScheme scheme = DiffScheme::Spectral) {
  return surface_tangents(GridDifferentiator(grid, scheme), offsets);
}

// Closed surface sampled on a grid: X = origin + offsets.  `outward` is any
// vector field pointing out of the enclosed region, used to orient the normal.
struct EmbeddedSurface {
  const SphereGrid* grid = nullptr;
  Vec3 origin = Vec3::Zero();
  std::vector<Vec3> offsets;
  std::vector<Vec3> outward;
  SurfaceTangents tangents;

  Vec3 position(int n) const { return origin + offsets[n]; }
};

inline EmbeddedSurface make_surface(const GridDifferentiator& diff, const SphereEmbedding& emb) {
  EmbeddedSurface s;
  s.grid = &diff.grid();
  s.origin = emb.origin;
  s.offsets = emb.offsets;
  s.outward = emb.velocities;
  s.tangents = surface_tangents(diff, s.offsets);
  return s;
}

// Surface given by an explicit map; the outward reference is X - origin.
inline EmbeddedSurface make_surface(const GridDifferentiator& diff, const Vec3& origin,
                                    const std::vector<Vec3>& offsets) {
  EmbeddedSurface s;
  s.grid = &diff.grid();
  s.origin = origin;
  s.offsets = offsets;
  s.outward = offsets;
  s.tangents = surface_tangents(diff, s.offsets);
  return s;
}

// Pointwise extrinsic data.  The normal N points into the enclosed region and
// h_ij = g(D_{Z_i} Z_j, N), so a small geodesic sphere has H close to 2/rho.
struct NodeGeometry {
  Vec3 normal = Vec3::Zero();
  Eigen::Matrix2d first = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d first_inv = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  std::array<Eigen::Matrix2d, 2> christoffel{};  // christoffel[k](i, j) of the induced metric
  double mean_curvature = 0.0;
  double gauss_ratio = 0.0;  // det h / det first
  double sqrt_det = 0.0;
  double area_density = 0.0;  // sqrt_det / sin(theta)
  double ricci_normal = 0.0;  // Ric(N, N)
};

struct ExtrinsicGeometry {
  std::vector<NodeGeometry> nodes;
};

inline ExtrinsicGeometry extrinsic_geometry(const MetricField& metric, const EmbeddedSurface& surf,
                                            bool with_ricci = false) {
  const SphereGrid& grid = *surf.grid;
  const SurfaceTangents& t = surf.tangents;
  ExtrinsicGeometry out;
  out.nodes.resize(grid.size());
  detail::parallel_for(grid.size(), [&](int n) {
    const Vec3 x = surf.position(n);
    const Mat3 g = metric_at(metric, x);
    const Christoffel gamma = christoffel_at(metric, x);
    const Vec3 z[2] = {t.x1[n], t.x2[n]};
    const Vec3 zz[2][2] = {{t.x11[n], t.x12[n]}, {t.x12[n], t.x22[n]}};
    NodeGeometry& ng = out.nodes[n];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ng.first(i, j) = contract(g, z[i], z[j]);
    const double det = ng.first.determinant();
    if (!(det > 0.0)) throw DegenerateSurface("induced metric is degenerate");
    ng.first_inv = ng.first.inverse();
    ng.sqrt_det = std::sqrt(det);
    ng.area_density = ng.sqrt_det / grid.sin_theta[n / grid.n_phi];

    // Normal covector annihilates both tangents; raise and normalize.
    Vec3 cov = z[0].cross(z[1]);
    const Mat3 ginv = g.inverse();
    const double len2 = cov.dot(ginv * cov);
    if (!(len2 > 0.0)) throw DegenerateSurface("normal has zero length");
    cov /= std::sqrt(len2);
    if (cov.dot(surf.outward[n]) > 0.0) cov = -cov;
    ng.normal = ginv * cov;

    Vec3 accel[2][2];
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j) {
        accel[i][j] = zz[i][j] + contract_christoffel(gamma, z[i], z[j]);
        accel[j][i] = accel[i][j];
      }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ng.second(i, j) = cov.dot(accel[i][j]);
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double a0 = contract(g, accel[i][j], z[0]), a1 = contract(g, accel[i][j], z[1]);
          ng.christoffel[k](i, j) = ng.first_inv(k, 0) * a0 + ng.first_inv(k, 1) * a1;
        }
    ng.mean_curvature = (ng.first_inv * ng.second).trace();
    ng.gauss_ratio = ng.second.determinant() / det;
    if (with_ricci) ng.ricci_normal = contract(ricci_at(metric, x), ng.normal, ng.normal);
  });
  return out;
}

// Laplace-Beltrami operator of the induced metric in non-divergence form,
// Delta f = g^{ij} (f_ij - Gamma^k_ij f_k).
inline std::vector<double> surface_laplacian(const GridDifferentiator& diff, const ExtrinsicGeometry& geo,
                                             const std::vector<double>& f) {
  const GridDerivatives d = diff(f);
  std::vector<double> out(f.size());
  for (size_t n = 0; n < f.size(); ++n) {
    const NodeGeometry& ng = geo.nodes[n];
    Eigen::Matrix2d hess;
    hess << d.tt[n], d.tp[n], d.tp[n], d.pp[n];
    const Eigen::Vector2d grad(d.t[n], d.p[n]);
    hess -= grad[0] * ng.christoffel[0] + grad[1] * ng.christoffel[1];
    out[n] = (ng.first_inv.cwiseProduct(hess)).sum();
  }
  return out;
}

struct HawkingReport {
  double area = 0.0;
  double willmore = 0.0;
  double willmore_deficit = 0.0;  // 16 pi - W
  double curvature_constant = 0.0;
  double hawking_mass = 0.0;
};

inline double hawking_mass_from(double area, double deficit, double K = 0.0) {
  const double c = 16.0 * std::numbers::pi;
  return std::sqrt(area / (c * c * c)) * (deficit - 4.0 * K * area);
}

// Area, Willmore energy and (generalized) Hawking mass
// sqrt(A / (16 pi)^3) (16 pi - int H^2 - 4 K A).
inline HawkingReport hawking_mass(const SphereGrid& grid, const ExtrinsicGeometry& geo, double K = 0.0) {
  CompensatedSum area, willmore, deficit;
  for (int n = 0; n < grid.size(); ++n) {
    const NodeGeometry& ng = geo.nodes[n];
    const double h2da = ng.mean_curvature * ng.mean_curvature * ng.area_density;
    area.add(grid.weights[n] * ng.area_density);
    willmore.add(grid.weights[n] * h2da);
    // Summing 4 - H^2 dA node by node keeps the deficit accurate when W is
    // within a few ulps of 16 pi.
    deficit.add(grid.weights[n] * (4.0 - h2da));
  }
  HawkingReport r;
  r.area = area.value();
  r.willmore = willmore.value();
  r.willmore_deficit = deficit.value();
  r.curvature_constant = K;
  r.hawking_mass = hawking_mass_from(r.area, r.willmore_deficit, K);
  return r;
}

inline HawkingReport hawking_mass(const MetricField& metric, const EmbeddedSurface& surf, double K = 0.0) {
  return hawking_mass(*surf.grid, extrinsic_geometry(metric, surf), K);
}

// Writes theta1, theta2, x, y, z, H, dA rows.
inline void export_surface_csv(std::ostream& os, const EmbeddedSurface& surf, const ExtrinsicGeometry& geo) {
  const SphereGrid& grid = *surf.grid;
  os << "theta1,theta2,x,y,z,H,dA\n";
  for (int j = 0; j < grid.n_theta; ++j)
    for (int k = 0; k < grid.n_phi; ++k) {
      const int n = grid.node(j, k);
      const Vec3 x = surf.position(n);
      os << num(grid.theta[j]) << ',' << num(grid.phi[k]) << ',' << num(x[0]) << ',' << num(x[1]) << ','
         << num(x[2]) << ',' << num(geo.nodes[n].mean_curvature) << ',' << num(geo.nodes[n].area_density) << '\n';
    }
}

}  // namespace hawking

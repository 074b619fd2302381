#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hawking/errors.hpp"
#include "hawking/sphere_grid.hpp"

namespace hawking {

// Values of a scalar field and its coordinate derivatives in (theta, phi).
struct GridDerivatives {
  std::vector<double> f, t, p, tt, tp, pp;
};

// Orthonormal real spherical harmonics without the Condon-Shortley phase:
// Y_l0 = L_l0(theta), Y_lm = sqrt2 L_lm cos(m phi), Y_l,-m = sqrt2 L_lm sin(m phi)
// for m > 0, where L_lm is the normalized associated Legendre function.
// Coefficients are stored at index l*l + l + m.
class SphericalTransform {
 public:
  explicit SphericalTransform(const SphereGrid& grid, int band_limit = -1) : grid_(grid) {
    const int max_l = std::min(grid.n_theta - 2, grid.n_phi / 2 - 1);
    L_ = band_limit < 0 ? max_l : band_limit;
    if (L_ > max_l) throw BandLimitExceeded("band limit exceeds what the grid resolves");
    const int tri = (L_ + 1) * (L_ + 2) / 2;
    lam_.assign(grid.n_theta * tri, 0.0);
    dlam_.assign(grid.n_theta * tri, 0.0);
    d2lam_.assign(grid.n_theta * tri, 0.0);
    for (int j = 0; j < grid.n_theta; ++j) {
      const double c = grid.cos_theta[j], s = grid.sin_theta[j];
      double* row = &lam_[j * tri];
      legendre_row(L_, c, s, row);
      for (int m = 0; m <= L_; ++m)
        for (int l = m; l <= L_; ++l) {
          const double prev = l > m ? row[tri_index(l - 1, m)] : 0.0;
          const double d = (l * c * row[tri_index(l, m)] -
                            std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (l * l - m * m)) * prev) /
                           s;
          dlam_[j * tri + tri_index(l, m)] = d;
          d2lam_[j * tri + tri_index(l, m)] =
              -(c / s) * d - (l * (l + 1.0) - m * m / (s * s)) * row[tri_index(l, m)];
        }
    }
    cos_.resize(grid.n_phi);
    sin_.resize(grid.n_phi);
    for (int k = 0; k < grid.n_phi; ++k) {
      cos_[k] = std::cos(2.0 * std::numbers::pi * k / grid.n_phi);
      sin_[k] = std::sin(2.0 * std::numbers::pi * k / grid.n_phi);
    }
  }

  int band_limit() const { return L_; }
  int size() const { return (L_ + 1) * (L_ + 1); }
  const SphereGrid& grid() const { return grid_; }
  static int index(int l, int m) { return l * l + l + m; }

  std::vector<double> analyze(const std::vector<double>& f) const {
    const int np = grid_.n_phi, tri = (L_ + 1) * (L_ + 2) / 2;
    const double dphi = 2.0 * std::numbers::pi / np;
    std::vector<double> out(size(), 0.0), a(L_ + 1), b(L_ + 1);
    for (int j = 0; j < grid_.n_theta; ++j) {
      const double* row = &f[j * np];
      for (int m = 0; m <= L_; ++m) {
        double sa = 0.0, sb = 0.0;
        for (int k = 0; k < np; ++k) {
          const int q = (m * k) % np;
          sa += row[k] * cos_[q];
          sb += row[k] * sin_[q];
        }
        const double scale = grid_.ring_weight[j] * dphi * (m == 0 ? 1.0 : std::numbers::sqrt2);
        a[m] = sa * scale;
        b[m] = sb * scale;
      }
      const double* lam = &lam_[j * tri];
      for (int m = 0; m <= L_; ++m)
        for (int l = m; l <= L_; ++l) {
          const double v = lam[tri_index(l, m)];
          out[index(l, m)] += v * a[m];
          if (m > 0) out[index(l, -m)] += v * b[m];
        }
    }
    return out;
  }

  std::vector<double> synthesize(const std::vector<double>& coeffs) const {
    return differentiate(coeffs, false).f;
  }

  GridDerivatives differentiate(const std::vector<double>& coeffs, bool derivatives = true) const {
    const int np = grid_.n_phi, tri = (L_ + 1) * (L_ + 2) / 2, n = grid_.size();
    const int Lc = std::min(L_, coeffs.empty() ? -1 : static_cast<int>(std::sqrt(coeffs.size() + 0.5)) - 1);
    GridDerivatives out;
    out.f.assign(n, 0.0);
    if (derivatives) {
      out.t.assign(n, 0.0);
      out.p.assign(n, 0.0);
      out.tt.assign(n, 0.0);
      out.tp.assign(n, 0.0);
      out.pp.assign(n, 0.0);
    }
    std::vector<double> A(Lc + 1), B(Lc + 1), A1(Lc + 1), B1(Lc + 1), A2(Lc + 1), B2(Lc + 1);
    for (int j = 0; j < grid_.n_theta; ++j) {
      const double *lam = &lam_[j * tri], *dl = &dlam_[j * tri], *d2l = &d2lam_[j * tri];
      for (int m = 0; m <= Lc; ++m) {
        double a = 0, b = 0, a1 = 0, b1 = 0, a2 = 0, b2 = 0;
        for (int l = m; l <= Lc; ++l) {
          const int t = tri_index(l, m);
          const double cp = coeffs[index(l, m)], cm = m > 0 ? coeffs[index(l, -m)] : 0.0;
          a += cp * lam[t];
          b += cm * lam[t];
          a1 += cp * dl[t];
          b1 += cm * dl[t];
          a2 += cp * d2l[t];
          b2 += cm * d2l[t];
        }
        const double s = m == 0 ? 1.0 : std::numbers::sqrt2;
        A[m] = s * a, B[m] = s * b, A1[m] = s * a1, B1[m] = s * b1, A2[m] = s * a2, B2[m] = s * b2;
      }
      for (int k = 0; k < np; ++k) {
        double f = 0, ft = 0, fp = 0, ftt = 0, ftp = 0, fpp = 0;
        for (int m = 0; m <= Lc; ++m) {
          const int q = (m * k) % np;
          const double c = cos_[q], s = sin_[q];
          f += A[m] * c + B[m] * s;
          if (!derivatives) continue;
          ft += A1[m] * c + B1[m] * s;
          ftt += A2[m] * c + B2[m] * s;
          fp += m * (B[m] * c - A[m] * s);
          ftp += m * (B1[m] * c - A1[m] * s);
          fpp -= m * m * (A[m] * c + B[m] * s);
        }
        const int idx = grid_.node(j, k);
        out.f[idx] = f;
        if (!derivatives) continue;
        out.t[idx] = ft;
        out.p[idx] = fp;
        out.tt[idx] = ftt;
        out.tp[idx] = ftp;
        out.pp[idx] = fpp;
      }
    }
    return out;
  }

  GridDerivatives differentiate_values(const std::vector<double>& f) const { return differentiate(analyze(f)); }

  // Normalized associated Legendre functions L_lm(theta) for 0 <= m <= l <= L,
  // stored at l(l+1)/2 + m.
  static void legendre_row(int L, double c, double s, double* row) {
    row[0] = 0.5 / std::sqrt(std::numbers::pi);
    for (int m = 0; m <= L; ++m) {
      if (m > 0) row[tri_index(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * row[tri_index(m - 1, m - 1)];
      if (m + 1 <= L) row[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * c * row[tri_index(m, m)];
      for (int l = m + 2; l <= L; ++l) {
        const double a = std::sqrt((4.0 * l * l - 1.0) / (l * l - m * m));
        const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
        row[tri_index(l, m)] = a * (c * row[tri_index(l - 1, m)] - b * row[tri_index(l - 2, m)]);
      }
    }
  }

  static int tri_index(int l, int m) { return l * (l + 1) / 2 + m; }

 private:
  const SphereGrid& grid_;
  int L_ = 0;
  std::vector<double> lam_, dlam_, d2lam_, cos_, sin_;
};

// Real spherical harmonic at an arbitrary direction, same convention as above.
inline double real_spherical_harmonic(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  std::vector<double> row((l + 1) * (l + 2) / 2);
  SphericalTransform::legendre_row(l, std::cos(theta), std::sin(theta), row.data());
  const double v = row[SphericalTransform::tri_index(l, am)];
  if (m == 0) return v;
  return std::numbers::sqrt2 * v * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

}  // namespace hawking

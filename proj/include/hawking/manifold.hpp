#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "hawking/errors.hpp"
#include "hawking/jet.hpp"
#include "hawking/types.hpp"

namespace hawking {

struct Monomial {
  double coeff = 0.0;
  std::array<int, 3> powers{0, 0, 0};
};

// Polynomial in the chart coordinates (x, y, z).
struct Polynomial3 {
  std::vector<Monomial> terms;

  int degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, t.powers[0] + t.powers[1] + t.powers[2]);
    return d;
  }

  template <class T>
  T operator()(const Vec3T<T>& x) const {
    T sum(0.0);
    for (const auto& t : terms) {
      if (t.coeff == 0.0) continue;
      sum += t.coeff * ipow(x[0], t.powers[0]) * ipow(x[1], t.powers[1]) * ipow(x[2], t.powers[2]);
    }
    return sum;
  }
};

namespace metrics {

struct Euclidean {
  static constexpr const char* kName = "euclidean";

  template <class T>
  Mat3T<T> components(const Vec3T<T>&) const {
    Mat3T<T> g;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g[a][b] = T(a == b ? 1.0 : 0.0);
    return g;
  }
  bool in_domain(const Vec3&) const { return true; }
  double injectivity_bound(const Vec3&) const { return std::numeric_limits<double>::infinity(); }
  double sectional_constant() const { return 0.0; }
};

// Constant curvature K in the conformal chart g = delta / (1 + K|x|^2/4)^2.
// The origin is an isometric copy of any point, and the chart metric there is
// the identity.
struct ConstantCurvature {
  double radius = 1.0;
  int sign = 1;  // +1 round sphere, -1 hyperbolic space

  double curvature() const { return sign / (radius * radius); }
  double sectional_constant() const { return curvature(); }

  template <class T>
  Mat3T<T> components(const Vec3T<T>& x) const {
    const T r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const T q = T(1.0) + (0.25 * curvature()) * r2;
    const T s = 1.0 / (q * q);
    Mat3T<T> g;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g[a][b] = a == b ? s : T(0.0);
    return g;
  }

  // Gradient of log(conformal factor).
  Vec3 dphi(const Vec3& x) const {
    const double k = curvature();
    return -(0.5 * k / (1.0 + 0.25 * k * x.squaredNorm())) * x;
  }

  bool in_domain(const Vec3& x) const {
    const double r = x.norm();
    if (sign < 0) return r < 2.0 * radius * 0.999;
    return r < 2.0 * radius * std::tan(0.45 * std::numbers::pi);
  }

  // Distance from the chart origin to the point, measured in the metric.
  double distance_from_origin(const Vec3& x) const {
    const double s = x.norm() / (2.0 * radius);
    return 2.0 * radius * (sign > 0 ? std::atan(s) : std::atanh(s));
  }

  double injectivity_bound(const Vec3& x) const {
    if (sign > 0) return 0.5 * std::numbers::pi * radius;
    return 2.0 * radius * std::atanh(0.999) - distance_from_origin(x);
  }
};

struct RoundSphere : ConstantCurvature {
  static constexpr const char* kName = "round_sphere";
  RoundSphere(double r = 1.0) : ConstantCurvature{r, 1} {}
};

struct Hyperbolic : ConstantCurvature {
  static constexpr const char* kName = "hyperbolic";
  Hyperbolic(double r = 1.0) : ConstantCurvature{r, -1} {}
};

// Spatial Schwarzschild slice in the areal chart:
// g = delta + f(r) n n^T, n = x/r, f = 2m/(r - 2m).
struct Schwarzschild {
  static constexpr const char* kName = "schwarzschild";
  double mass = 1.0;
  double horizon_margin = 1.05;

  template <class T>
  Mat3T<T> components(const Vec3T<T>& x) const {
    using std::sqrt;
    const T r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    const T r = sqrt(r2);
    // f n n^T = 2m x x^T / (r^2 (r - 2m))
    const T c = (2.0 * mass) / (r2 * (r - 2.0 * mass));
    Mat3T<T> g;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g[a][b] = c * x[a] * x[b] + T(a == b ? 1.0 : 0.0);
    return g;
  }

  bool in_domain(const Vec3& x) const { return x.norm() > 2.0 * mass * horizon_margin; }

  // Radial proper distance from the guard surface r = 2m * margin.
  double radial_distance(double r) const {
    auto prim = [&](double s) {
      const double a = std::sqrt(s * (s - 2.0 * mass));
      return a + 2.0 * mass * std::log(std::sqrt(s) + std::sqrt(s - 2.0 * mass));
    };
    return prim(r) - prim(2.0 * mass * horizon_margin);
  }
  double injectivity_bound(const Vec3& x) const { return radial_distance(x.norm()); }
  double sectional_constant() const { return 0.0; }
};

// g = exp(2 phi) delta with phi a polynomial.
struct Conformal {
  static constexpr const char* kName = "conformal";
  Polynomial3 phi;
  double chart_radius = 10.0;
  double injectivity = 1.0;

  template <class T>
  Mat3T<T> components(const Vec3T<T>& x) const {
    using std::exp;
    const T s = exp(2.0 * phi(x));
    Mat3T<T> g;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) g[a][b] = a == b ? s : T(0.0);
    return g;
  }
  bool in_domain(const Vec3& x) const { return x.norm() < chart_radius; }
  double injectivity_bound(const Vec3&) const { return injectivity; }
  double sectional_constant() const { return 0.0; }
};

// g = delta + h with h a symmetric matrix of polynomials of degree <= 4.
// Components are stored in the order xx, xy, xz, yy, yz, zz.
struct PolynomialPerturbation {
  static constexpr const char* kName = "polynomial_perturbation";
  std::array<Polynomial3, 6> h;
  double chart_radius = 1.0;
  double injectivity = 0.25;

  static constexpr int slot(int a, int b) {
    const int i = a < b ? a : b, j = a < b ? b : a;
    return i == 0 ? j : (i == 1 ? 2 + j : 5);
  }

  template <class T>
  Mat3T<T> components(const Vec3T<T>& x) const {
    Mat3T<T> g;
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        g[a][b] = h[slot(a, b)](x) + T(a == b ? 1.0 : 0.0);
        g[b][a] = g[a][b];
      }
    return g;
  }
  bool in_domain(const Vec3& x) const { return x.norm() < chart_radius; }
  double injectivity_bound(const Vec3&) const { return injectivity; }
  double sectional_constant() const { return 0.0; }
};

}  // namespace metrics

template <class T>
Vec3T<T> lift(const Vec3& x) {
  return {T(x[0]), T(x[1]), T(x[2])};
}

template <int N>
Vec3T<Jet<N>> jet_point(const Vec3& p) {
  return {Jet<N>::variable(p[0], 0), Jet<N>::variable(p[1], 1), Jet<N>::variable(p[2], 2)};
}

template <class T>
Mat3T<T> inverse3(const Mat3T<T>& m) {
  const T c00 = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const T c01 = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  const T c02 = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  const T det = m[0][0] * c00 + m[0][1] * c01 + m[0][2] * c02;
  const T inv = 1.0 / det;
  Mat3T<T> r;
  r[0][0] = c00 * inv;
  r[1][0] = c01 * inv;
  r[2][0] = c02 * inv;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv;
  return r;
}

// Taylor jets of the metric and everything derived from it at one point.
// Valid orders: g, ginv to N; gamma to N-1; riemann, ricci, scalar to N-2.
template <int N>
struct CurvatureJets {
  using J = Jet<N>;
  Mat3T<J> g, ginv;
  std::array<Mat3T<J>, 3> gamma;                       // gamma[s][m][n]
  std::array<std::array<Mat3T<J>, 3>, 3> riemann_up;  // R^a_{bcd} as [a][b][c][d]
  Mat3T<J> ricci;
  J scalar;
};

template <int N>
std::array<Mat3T<Jet<N>>, 3> christoffel_jets(const Mat3T<Jet<N>>& g, const Mat3T<Jet<N>>& ginv) {
  using J = Jet<N>;
  std::array<Mat3T<J>, 3> dg;  // dg[l][a][b] = d_l g_ab
  for (int l = 0; l < 3; ++l)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) dg[l][a][b] = g[a][b].partial(l);
  std::array<Mat3T<J>, 3> gamma;
  for (int m = 0; m < 3; ++m)
    for (int n = m; n < 3; ++n) {
      std::array<J, 3> first;
      for (int l = 0; l < 3; ++l) first[l] = 0.5 * (dg[m][l][n] + dg[n][l][m] - dg[l][m][n]);
      for (int s = 0; s < 3; ++s) {
        J v = ginv[s][0] * first[0] + ginv[s][1] * first[1] + ginv[s][2] * first[2];
        gamma[s][m][n] = v;
        gamma[s][n][m] = v;
      }
    }
  return gamma;
}

template <int N, class Kind>
CurvatureJets<N> curvature_jets(const Kind& kind, const Vec3& p) {
  using J = Jet<N>;
  CurvatureJets<N> cj;
  cj.g = kind.template components<J>(jet_point<N>(p));
  cj.ginv = inverse3(cj.g);
  cj.gamma = christoffel_jets<N>(cj.g, cj.ginv);
  if constexpr (N >= 2) {
    std::array<std::array<Mat3T<J>, 3>, 3> dgamma;  // dgamma[l][s][m][n] = d_l Gamma^s_mn
    for (int l = 0; l < 3; ++l)
      for (int s = 0; s < 3; ++s)
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n) dgamma[l][s][m][n] = cj.gamma[s][m][n].partial(l);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) {
            if (c == d) {
              cj.riemann_up[a][b][c][d] = J(0.0);
              continue;
            }
            if (d < c) {
              cj.riemann_up[a][b][c][d] = -cj.riemann_up[a][b][d][c];
              continue;
            }
            J v = dgamma[c][a][d][b] - dgamma[d][a][c][b];
            for (int e = 0; e < 3; ++e)
              v += cj.gamma[a][c][e] * cj.gamma[e][d][b] - cj.gamma[a][d][e] * cj.gamma[e][c][b];
            cj.riemann_up[a][b][c][d] = v;
          }
    for (int b = 0; b < 3; ++b)
      for (int d = 0; d < 3; ++d) {
        J v(0.0);
        for (int c = 0; c < 3; ++c) v += cj.riemann_up[c][b][c][d];
        cj.ricci[b][d] = v;
      }
    J sc(0.0);
    for (int b = 0; b < 3; ++b)
      for (int d = 0; d < 3; ++d) sc += cj.ginv[b][d] * cj.ricci[b][d];
    cj.scalar = sc;
  }
  return cj;
}

// Ricci and scalar curvature in the frame of an orthonormal basis.
struct CurvaturePacket {
  Vec3 point = Vec3::Zero();
  Mat3 metric = Mat3::Identity();
  Mat3 frame = Mat3::Identity();   // columns E_1, E_2, E_3 in chart components
  Riemann riemann{};               // frame components
  Mat3 ricci = Mat3::Zero();       // frame components
  double scalar = 0.0;
  Mat3 traceless = Mat3::Zero();   // Ric - Sc/3 * I in the frame
  double traceless_norm2 = 0.0;
  Vec3 grad_scalar = Vec3::Zero(); // frame components
  double laplacian_scalar = 0.0;
};

class MetricField {
 public:
  using Variant = std::variant<metrics::Euclidean, metrics::RoundSphere, metrics::Hyperbolic,
                               metrics::Schwarzschild, metrics::Conformal,
                               metrics::PolynomialPerturbation>;

  MetricField() = default;
  template <class Kind>
  MetricField(Kind k) : v_(std::move(k)) {}  // NOLINT

  const Variant& variant() const { return v_; }

  std::string kind_name() const {
    return std::visit([](const auto& k) { return std::string(std::decay_t<decltype(k)>::kName); }, v_);
  }

  bool is_builtin() const {
    return !std::holds_alternative<metrics::Conformal>(v_) &&
           !std::holds_alternative<metrics::PolynomialPerturbation>(v_);
  }

  // K for which geodesic spheres of the model space have vanishing
  // generalized mass: +-1/R^2 for the constant curvature kinds, else 0.
  double model_curvature() const {
    return std::visit([](const auto& k) { return k.sectional_constant(); }, v_);
  }

  bool in_domain(const Vec3& x) const {
    return std::visit([&](const auto& k) { return k.in_domain(x); }, v_);
  }

  void check_domain(const Vec3& x) const {
    if (!in_domain(x)) throw DomainError(kind_name() + ": point outside chart domain");
  }

  double injectivity_bound(const Vec3& p) const {
    return std::visit([&](const auto& k) { return k.injectivity_bound(p); }, v_);
  }

  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), v_);
  }

 private:
  Variant v_{metrics::Euclidean{}};
};

namespace detail {

inline Mat3 to_eigen(const Mat3T<double>& m) {
  Mat3 r;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) r(a, b) = m[a][b];
  return r;
}

template <class Kind>
constexpr bool is_constant_curvature = std::is_base_of_v<metrics::ConstantCurvature, Kind>;

inline Riemann riemann_from_ricci(const Mat3& g, const Mat3& ric) {
  const double sc = (g.inverse() * ric).trace();
  Riemann rm;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
          rm[a][b][c][d] = g(a, c) * ric(b, d) + g(b, d) * ric(a, c) - g(a, d) * ric(b, c) -
                           g(b, c) * ric(a, d) - 0.5 * sc * (g(a, c) * g(b, d) - g(a, d) * g(b, c));
  return rm;
}

inline Mat3 schwarzschild_ricci(const metrics::Schwarzschild& s, const Vec3& x) {
  const double r = x.norm();
  const Vec3 n = x / r;
  const double lapse2 = 1.0 - 2.0 * s.mass / r;
  const Mat3 g = Mat3::Identity() + (2.0 * s.mass / (r - 2.0 * s.mass)) * n * n.transpose();
  const Vec3 nu = n / std::sqrt(lapse2);
  return (s.mass / (r * r * r)) * (g - 3.0 * nu * nu.transpose());
}

}  // namespace detail

inline Mat3 metric_at(const MetricField& metric, const Vec3& x) {
  metric.check_domain(x);
  return metric.visit([&](const auto& k) { return detail::to_eigen(k.template components<double>(lift<double>(x))); });
}

inline Christoffel christoffel_at(const MetricField& metric, const Vec3& x) {
  metric.check_domain(x);
  return metric.visit([&](const auto& k) -> Christoffel {
    using K = std::decay_t<decltype(k)>;
    Christoffel gamma;
    if constexpr (std::is_same_v<K, metrics::Euclidean>) {
      for (auto& m : gamma) m.setZero();
    } else if constexpr (detail::is_constant_curvature<K>) {
      const Vec3 d = k.dphi(x);
      for (int s = 0; s < 3; ++s)
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n)
            gamma[s](m, n) = (s == m ? d[n] : 0.0) + (s == n ? d[m] : 0.0) - (m == n ? d[s] : 0.0);
    } else if constexpr (std::is_same_v<K, metrics::Schwarzschild>) {
      const double r = x.norm();
      const Vec3 n = x / r;
      const double rm = r - 2.0 * k.mass;
      const double f = 2.0 * k.mass / rm;
      const double fp = -2.0 * k.mass / (rm * rm);
      const Mat3 proj = Mat3::Identity() - n * n.transpose();
      const Mat3 inner = 0.5 * fp * n * n.transpose() + (f / r) * proj;
      for (int s = 0; s < 3; ++s) gamma[s] = (n[s] / (1.0 + f)) * inner;
    } else {
      const auto cj = curvature_jets<1>(k, x);
      for (int s = 0; s < 3; ++s)
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n) gamma[s](m, n) = cj.gamma[s][m][n].value();
    }
    return gamma;
  });
}

inline Vec3 contract_christoffel(const Christoffel& gamma, const Vec3& u, const Vec3& v) {
  return Vec3(u.dot(gamma[0] * v), u.dot(gamma[1] * v), u.dot(gamma[2] * v));
}

// Geodesic acceleration x'' = -Gamma(x', x').
inline Vec3 geodesic_acceleration(const MetricField& metric, const Vec3& x, const Vec3& u) {
  return metric.visit([&](const auto& k) -> Vec3 {
    using K = std::decay_t<decltype(k)>;
    if (!k.in_domain(x)) throw DomainError(std::string(K::kName) + ": point outside chart domain");
    if constexpr (std::is_same_v<K, metrics::Euclidean>) {
      return Vec3::Zero();
    } else if constexpr (detail::is_constant_curvature<K>) {
      const Vec3 d = k.dphi(x);
      return u.squaredNorm() * d - 2.0 * d.dot(u) * u;
    } else if constexpr (std::is_same_v<K, metrics::Schwarzschild>) {
      const double r = x.norm();
      const Vec3 n = x / r;
      const double rm = r - 2.0 * k.mass;
      const double f = 2.0 * k.mass / rm;
      const double fp = -2.0 * k.mass / (rm * rm);
      const double nu = n.dot(u);
      return -(0.5 * fp * nu * nu + (f / r) * (u.squaredNorm() - nu * nu)) / (1.0 + f) * n;
    } else {
      const auto cj = curvature_jets<1>(k, x);
      Vec3 a;
      for (int s = 0; s < 3; ++s) {
        double v = 0.0;
        for (int m = 0; m < 3; ++m)
          for (int n = 0; n < 3; ++n) v += cj.gamma[s][m][n].value() * u[m] * u[n];
        a[s] = -v;
      }
      return a;
    }
  });
}

inline Mat3 ricci_at(const MetricField& metric, const Vec3& x) {
  metric.check_domain(x);
  return metric.visit([&](const auto& k) -> Mat3 {
    using K = std::decay_t<decltype(k)>;
    if constexpr (std::is_same_v<K, metrics::Euclidean>) {
      return Mat3::Zero();
    } else if constexpr (detail::is_constant_curvature<K>) {
      return 2.0 * k.curvature() * detail::to_eigen(k.template components<double>(lift<double>(x)));
    } else if constexpr (std::is_same_v<K, metrics::Schwarzschild>) {
      return detail::schwarzschild_ricci(k, x);
    } else {
      const auto cj = curvature_jets<2>(k, x);
      Mat3 r;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) r(a, b) = cj.ricci[a][b].value();
      return r;
    }
  });
}

inline Riemann riemann_at(const MetricField& metric, const Vec3& x) {
  metric.check_domain(x);
  return metric.visit([&](const auto& k) -> Riemann {
    using K = std::decay_t<decltype(k)>;
    const Mat3 g = detail::to_eigen(k.template components<double>(lift<double>(x)));
    if constexpr (std::is_same_v<K, metrics::Euclidean>) {
      return Riemann{};
    } else if constexpr (detail::is_constant_curvature<K>) {
      return detail::riemann_from_ricci(g, 2.0 * k.curvature() * g);
    } else if constexpr (std::is_same_v<K, metrics::Schwarzschild>) {
      return detail::riemann_from_ricci(g, detail::schwarzschild_ricci(k, x));
    } else {
      const auto cj = curvature_jets<2>(k, x);
      Riemann rm;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c)
            for (int d = 0; d < 3; ++d) {
              double v = 0.0;
              for (int e = 0; e < 3; ++e) v += g(a, e) * cj.riemann_up[e][b][c][d].value();
              rm[a][b][c][d] = v;
            }
      return rm;
    }
  });
}

inline double scalar_curvature_at(const MetricField& metric, const Vec3& x) {
  const Mat3 g = metric_at(metric, x);
  return (g.inverse() * ricci_at(metric, x)).trace();
}

// Columns are a g-orthonormal basis obtained by Gram-Schmidt of the chart basis.
inline Mat3 orthonormal_frame(const Mat3& g) {
  Mat3 e = Mat3::Identity();
  for (int i = 0; i < 3; ++i) {
    Vec3 v = e.col(i);
    for (int j = 0; j < i; ++j) v -= contract(g, e.col(j), v) * e.col(j);
    e.col(i) = v / std::sqrt(contract(g, v, v));
  }
  return e;
}

inline Mat3 orthonormal_frame(const MetricField& metric, const Vec3& p) {
  return orthonormal_frame(metric_at(metric, p));
}

namespace detail {

inline void finish_packet(CurvaturePacket& pk, const Mat3& ric_chart, const Riemann& rm_chart,
                          const Vec3& dsc_chart) {
  const Mat3& e = pk.frame;
  pk.ricci = e.transpose() * ric_chart * e;
  pk.scalar = pk.ricci.trace();
  pk.traceless = pk.ricci - (pk.scalar / 3.0) * Mat3::Identity();
  pk.traceless_norm2 = pk.traceless.squaredNorm();
  pk.grad_scalar = e.transpose() * dsc_chart;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          double v = 0.0;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                  v += e(i, a) * e(j, b) * e(k, c) * e(l, d) * rm_chart[i][j][k][l];
          pk.riemann[a][b][c][d] = v;
        }
}

}  // namespace detail

// Curvature packet evaluated through Taylor jets of the metric, for any kind.
inline CurvaturePacket curvature_packet_jets(const MetricField& metric, const Vec3& p) {
  metric.check_domain(p);
  return metric.visit([&](const auto& k) {
    const auto cj = curvature_jets<4>(k, p);
    CurvaturePacket pk;
    pk.point = p;
    Mat3 g, ginv, ric;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        g(a, b) = cj.g[a][b].value();
        ginv(a, b) = cj.ginv[a][b].value();
        ric(a, b) = cj.ricci[a][b].value();
      }
    pk.metric = g;
    pk.frame = orthonormal_frame(g);
    Riemann rm;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) {
            double v = 0.0;
            for (int e = 0; e < 3; ++e) v += g(a, e) * cj.riemann_up[e][b][c][d].value();
            rm[a][b][c][d] = v;
          }
    const auto& sc = cj.scalar;
    const Vec3 dsc(sc.derivative(1, 0, 0), sc.derivative(0, 1, 0), sc.derivative(0, 0, 1));
    Mat3 hess;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const int i = (a == 0) + (b == 0), j = (a == 1) + (b == 1), l = (a == 2) + (b == 2);
        hess(a, b) = sc.derivative(i, j, l);
      }
    double lap = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double christ = 0.0;
        for (int s = 0; s < 3; ++s) christ += cj.gamma[s][a][b].value() * dsc[s];
        lap += ginv(a, b) * (hess(a, b) - christ);
      }
    detail::finish_packet(pk, ric, rm, dsc);
    pk.laplacian_scalar = lap;
    return pk;
  });
}

// Ricci data, scalar curvature and its first two derivatives at p in an
// orthonormal frame.  Built-in kinds use closed forms; their scalar curvature
// is constant, so the gradient and Laplacian vanish identically.
inline CurvaturePacket curvature_packet(const MetricField& metric, const Vec3& p) {
  if (!metric.is_builtin()) return curvature_packet_jets(metric, p);
  CurvaturePacket pk;
  pk.point = p;
  pk.metric = metric_at(metric, p);
  pk.frame = orthonormal_frame(pk.metric);
  detail::finish_packet(pk, ricci_at(metric, p), riemann_at(metric, p), Vec3::Zero());
  pk.laplacian_scalar = 0.0;
  return pk;
}

inline double scalar_laplacian(const MetricField& metric, const Vec3& p) {
  return curvature_packet(metric, p).laplacian_scalar;
}

}  // namespace hawking

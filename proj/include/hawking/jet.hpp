#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace hawking {

// Truncated Taylor polynomial in three variables, total degree <= N.
//
// A Jet<N> carries the Taylor coefficients of a scalar function around a base
// point; arithmetic and elementary functions propagate all coefficients, so
// derivatives up to order N of any composite expression come out exactly up to
// rounding.  Coefficient (i,j,k) multiplies dx^i dy^j dz^k.
template <int N>
class Jet {
  static_assert(N >= 0 && N <= 8);

 public:
  static constexpr int kOrder = N;
  static constexpr int kSide = N + 1;
  static constexpr int kSize = kSide * kSide * kSide;

  Jet() { c_.fill(0.0); }
  Jet(double v) {  // NOLINT: implicit on purpose, constants mix freely.
    c_.fill(0.0);
    c_[0] = v;
  }

  static Jet variable(double value, int axis) {
    Jet r(value);
    if (N >= 1) r.c_[index(axis == 0, axis == 1, axis == 2)] = 1.0;
    return r;
  }

  static constexpr int index(int i, int j, int k) { return (i * kSide + j) * kSide + k; }

  double value() const { return c_[0]; }
  double coeff(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i + j + k > N) return 0.0;
    return c_[index(i, j, k)];
  }
  double& coeff_ref(int i, int j, int k) { return c_[index(i, j, k)]; }

  // Mixed partial derivative d^{i+j+k} / dx^i dy^j dz^k at the base point.
  double derivative(int i, int j, int k) const {
    return coeff(i, j, k) * factorial(i) * factorial(j) * factorial(k);
  }

  // Jet of the first partial derivative along `axis`.  The top degree of the
  // result is not known and is left at zero, so the result is valid to N-1.
  Jet partial(int axis) const {
    Jet r;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j)
        for (int k = 0; i + j + k <= N; ++k) {
          const int a = i + (axis == 0), b = j + (axis == 1), c = k + (axis == 2);
          if (a + b + c > N) continue;
          const int p = axis == 0 ? a : (axis == 1 ? b : c);
          r.c_[index(i, j, k)] = p * c_[index(a, b, c)];
        }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    for (int n = 0; n < kSize; ++n) c_[n] += o.c_[n];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int n = 0; n < kSize; ++n) c_[n] -= o.c_[n];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int i1 = 0; i1 <= N; ++i1)
      for (int j1 = 0; i1 + j1 <= N; ++j1)
        for (int k1 = 0; i1 + j1 + k1 <= N; ++k1) {
          const double x = a.c_[index(i1, j1, k1)];
          if (x == 0.0) continue;
          const int rest = N - i1 - j1 - k1;
          for (int i2 = 0; i2 <= rest; ++i2)
            for (int j2 = 0; i2 + j2 <= rest; ++j2)
              for (int k2 = 0; i2 + j2 + k2 <= rest; ++k2)
                r.c_[index(i1 + i2, j1 + j2, k1 + k2)] += x * b.c_[index(i2, j2, k2)];
        }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
  friend Jet operator/(double s, const Jet& b) { return s * pow(b, -1.0); }

  // f(x) with f^{(k)}(x0) supplied in `d`: sum_k d[k]/k! (x - x0)^k.
  friend Jet compose(const Jet& x, const std::array<double, N + 1>& d) {
    Jet u = x;
    u.c_[0] = 0.0;
    Jet r(d[0]);
    Jet power(1.0);
    double inv_fact = 1.0;
    for (int k = 1; k <= N; ++k) {
      power = power * u;
      inv_fact /= k;
      r += power * (d[k] * inv_fact);
    }
    return r;
  }

  friend Jet pow(const Jet& x, double p) {
    std::array<double, N + 1> d{};
    const double x0 = x.value();
    double falling = 1.0;
    for (int k = 0; k <= N; ++k) {
      d[k] = falling * std::pow(x0, p - k);
      falling *= (p - k);
    }
    return compose(x, d);
  }
  friend Jet sqrt(const Jet& x) { return pow(x, 0.5); }
  friend Jet exp(const Jet& x) {
    std::array<double, N + 1> d;
    d.fill(std::exp(x.value()));
    return compose(x, d);
  }
  friend Jet log(const Jet& x) {
    std::array<double, N + 1> d{};
    const double x0 = x.value();
    d[0] = std::log(x0);
    double f = 1.0;
    for (int k = 1; k <= N; ++k) {
      d[k] = f / std::pow(x0, k);
      f *= -k;
    }
    return compose(x, d);
  }

 private:
  static constexpr double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }

  std::array<double, kSize> c_;
};

// Scalar helpers so templated metric code can be written once for double and
// for jets.
inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) {
  return x.value();
}

template <class T>
T ipow(const T& x, int n) {
  T r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

}  // namespace hawking

#pragma once

#include <array>

#include <Eigen/Dense>

namespace hawking {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Small fixed-size containers used by the templated metric evaluation, where
// the scalar may be a Taylor jet rather than a double.
template <class T>
using Vec3T = std::array<T, 3>;
template <class T>
using Mat3T = std::array<std::array<T, 3>, 3>;

// Christoffel symbols of the second kind, gamma[s][m][n] = Gamma^s_{mn}.
using Christoffel = std::array<Mat3, 3>;

// Fully covariant Riemann tensor, rm[a][b][c][d] = Rm(d_a, d_b, d_c, d_d)
// with Rm(X,Y,Z,W) = g(R(Z,W)Y, X).
using Riemann = std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>;

inline double contract(const Mat3& g, const Vec3& u, const Vec3& v) { return u.dot(g * v); }

}  // namespace hawking

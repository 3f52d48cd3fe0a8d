#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "fsq/core/errors.hpp"

namespace fsq::atomstark {

/// Total angular momentum quantum number, stored as 2J so half-integers are exact.
struct AngularMomentum {
  int twice_j = 0;

  static constexpr AngularMomentum integer(int j) { return {2 * j}; }
  static constexpr AngularMomentum half(int twice) { return {twice}; }

  constexpr double value() const { return 0.5 * twice_j; }
  constexpr int dim() const { return twice_j + 1; }
  /// m_J of basis index i; index 0 is m = -J.
  constexpr double m(int index) const { return -value() + index; }
  friend constexpr bool operator==(AngularMomentum, AngularMomentum) = default;
};

struct SpinMatrices {
  Eigen::MatrixXcd x;
  Eigen::MatrixXcd y;
  Eigen::MatrixXcd z;
};

/// J_x, J_y, J_z (units of hbar) in the |J, m> basis ordered m = -J ... +J.
inline SpinMatrices spin_matrices(AngularMomentum j) {
  if (j.twice_j < 0) throw InvalidArgument("negative angular momentum");
  const int d = j.dim();
  const double jv = j.value();
  Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(d, d);
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = j.m(i);
    jz(i, i) = m;
    if (i + 1 < d) jp(i + 1, i) = std::sqrt(jv * (jv + 1.0) - m * (m + 1.0));
  }
  const std::complex<double> half_i(0.0, 0.5);
  SpinMatrices s;
  s.x = 0.5 * (jp + jp.adjoint());
  s.y = -half_i * (jp - jp.adjoint());
  s.z = jz;
  return s;
}

}  // namespace fsq::atomstark

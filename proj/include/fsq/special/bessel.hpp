#pragma once

#include <cmath>

namespace fsq::special {

/// Bessel function of the first kind J_n(x) for integer order n >= 0 and
/// x >= 0. Backed by the C++17 special math library.
inline double bessel_j(int n, double x) {
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::cyl_bessel_j(static_cast<double>(n), x);
}

}  // namespace fsq::special

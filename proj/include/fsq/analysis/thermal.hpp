#pragma once

#include <cmath>
#include <limits>

#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"
#include "fsq/focalfield/lightshift_map.hpp"
#include "fsq/trapmodel/trap.hpp"

namespace fsq::analysis {

/// Gaussian-dephasing time 1 / (2 pi sigma) of the thermal spread sigma [Hz]
/// of dU/h over the focal-plane map, with the position distribution of the
/// lower qubit level's harmonic trap at temperature T. Infinite for a
/// uniform map.
inline double thermal_dephasing_estimate(const focalfield::LightShiftMap& map,
                                         const trapmodel::TrapCharacterization& trap, double temperature_K) {
  if (!(temperature_K > 0)) throw InvalidArgument("temperature must be positive");
  const double kt_m = constants::k_B * temperature_K / trap.mass_kg;
  const double sx = std::sqrt(kt_m) / trap.lower.omega_rad_s(0) / constants::nm;
  const double sy = std::sqrt(kt_m) / trap.lower.omega_rad_s(1) / constants::nm;
  const double step = map.spacing_nm();
  if (std::min(sx, sy) < 3.0 * step)
    throw GridTooCoarse("thermal cloud spans fewer than 3 grid steps");
  if (map.grid.half_extent_nm < 3.0 * std::max(sx, sy))
    throw GridTooCoarse("map does not cover +-3 sigma of the thermal cloud");
  if (map.values_Hz.maxCoeff() == map.values_Hz.minCoeff()) return std::numeric_limits<double>::infinity();
  double w_sum = 0, m1 = 0;
  for (int iy = 0; iy < map.grid.points; ++iy)
    for (int ix = 0; ix < map.grid.points; ++ix) {
      const double x = map.x_nm(ix) / sx, y = map.y_nm(iy) / sy;
      const double w = std::exp(-0.5 * (x * x + y * y));
      w_sum += w;
      m1 += w * map.values_Hz(iy, ix);
    }
  const double mean = m1 / w_sum;
  double var = 0;
  for (int iy = 0; iy < map.grid.points; ++iy)
    for (int ix = 0; ix < map.grid.points; ++ix) {
      const double x = map.x_nm(ix) / sx, y = map.y_nm(iy) / sy;
      const double d = map.values_Hz(iy, ix) - mean;
      var += std::exp(-0.5 * (x * x + y * y)) * d * d;
    }
  const double sigma = std::sqrt(var / w_sum);
  if (sigma == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (2.0 * constants::pi * sigma);
}

}  // namespace fsq::analysis

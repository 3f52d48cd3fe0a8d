#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "fsq/atomstark/light_shift.hpp"
#include "fsq/core/parallel.hpp"
#include "fsq/focalfield/debye_wolf.hpp"

namespace fsq::focalfield {

/// Square grid in the focal plane, centred on the beam axis.
struct GridSpec {
  double half_extent_nm = 846.0;
  int points = 101;  // per axis, odd so the centre is a grid node
  double z_nm = 0.0;

  static GridSpec around_waist(double waist_nm, double extent_in_waists = 1.5, int points = 101) {
    return {extent_in_waists * waist_nm, points, 0.0};
  }
  double spacing_nm() const { return 2.0 * half_extent_nm / (points - 1); }
  double coordinate(int i) const { return -half_extent_nm + i * spacing_nm(); }
};

/// dU/h over a regular grid. values(iy, ix) is the shift at
/// (coordinate(ix), coordinate(iy)).
struct LightShiftMap {
  GridSpec grid;
  Eigen::MatrixXd values_Hz;

  double spacing_nm() const { return grid.spacing_nm(); }
  double x_nm(int ix) const { return grid.coordinate(ix); }
  double y_nm(int iy) const { return grid.coordinate(iy); }
  double center_Hz() const { return values_Hz(grid.points / 2, grid.points / 2); }

  /// Largest |dU/h| over grid nodes with x^2 + y^2 <= radius^2.
  double max_abs_within(double radius_nm) const {
    double best = 0.0;
    for (int iy = 0; iy < grid.points; ++iy)
      for (int ix = 0; ix < grid.points; ++ix) {
        const double r2 = x_nm(ix) * x_nm(ix) + y_nm(iy) * y_nm(iy);
        if (r2 <= radius_nm * radius_nm) best = std::max(best, std::abs(values_Hz(iy, ix)));
      }
    return best;
  }
};

/// Pointwise differential light shift for an arbitrary field provider
/// `field(Eigen::Vector3d position_nm) -> FieldSample`. Grid points are
/// evaluated concurrently; every point is written by exactly one task, so the
/// result does not depend on the thread count.
template <class FieldFn>
LightShiftMap lightshift_map(FieldFn&& field, const atomstark::FieldEnvironment& env,
                             const atomstark::PolarizabilityTable& table, const GridSpec& grid,
                             const atomstark::QubitLevels& levels = {}, unsigned threads = 0) {
  if (grid.points < 2 || !(grid.half_extent_nm > 0))
    throw InvalidArgument("map grid needs positive spacing");
  LightShiftMap map;
  map.grid = grid;
  map.values_Hz.resize(grid.points, grid.points);
  const Eigen::Vector3cd fallback(env.polarization_axis.x(), env.polarization_axis.y(), 0.0);
  const auto n = static_cast<std::size_t>(grid.points) * grid.points;
  parallel_for(
      n,
      [&](std::size_t k) {
        const int iy = static_cast<int>(k / grid.points), ix = static_cast<int>(k % grid.points);
        const FieldSample s = field(Eigen::Vector3d(grid.coordinate(ix), grid.coordinate(iy), grid.z_nm));
        map.values_Hz(iy, ix) =
            atomstark::differential_light_shift(env, s.polarization(fallback), table, levels);
      },
      threads);
  return map;
}

/// Map of the Debye-Wolf focus. The optical parameters of `env` are taken
/// from the focal-field configuration.
inline LightShiftMap lightshift_map(const FocalField& focus, atomstark::FieldEnvironment env,
                                    const atomstark::PolarizabilityTable& table, const GridSpec& grid,
                                    const atomstark::QubitLevels& levels = {}, unsigned threads = 0) {
  env.wavelength_nm = focus.config().wavelength_nm;
  env.power_W = focus.config().power_W;
  env.na = focus.config().na;
  env.polarization_axis = focus.config().polarization_axis;
  return lightshift_map([&](const Eigen::Vector3d& p) { return focus.at(p); }, env, table, grid,
                        levels, threads);
}

}  // namespace fsq::focalfield

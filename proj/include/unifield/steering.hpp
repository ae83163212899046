#pragma once

#include <Eigen/Dense>

#include "unifield/geometry.hpp"
#include "unifield/types.hpp"

namespace unifield {

// Planar-wavefront response: entry n = exp(-i 2pi/lambda <p_n, u>) / sqrt(N).
cvec planar_steering(const ArrayGeometry& geom, const Eigen::Vector3d& direction);

cvec planar_steering(const ArrayGeometry& geom, double azimuth, double elevation);

// Spherical-wavefront response for a point source at s:
// entry n = exp(-i 2pi/lambda (|s| - |p_n - s|)) / sqrt(N). The |s| phase
// reference puts zero phase at the array center, and the sign keeps the
// far limit equal to planar_steering of the same direction (|s| - |p_n - s|
// tends to <p_n, u>), so the two regimes meet continuously at the boundary.
// Throws SourceOnArray when s coincides with an element.
cvec spherical_steering(const ArrayGeometry& geom, const Eigen::Vector3d& source);

cvec spherical_steering(const ArrayGeometry& geom, double azimuth, double elevation,
                        double distance);

} // namespace unifield

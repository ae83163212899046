#pragma once

#include <Eigen/Dense>
#include <cstddef>

#include "unifield/types.hpp"

namespace unifield {

enum class RegionLabel { NearField, FarField };

// Uniform planar array on a centered grid in the x-y plane, broadside +z.
// Rows run along x, columns along y; element n = r*cols + c (row-major).
struct ArrayGeometry {
    std::size_t rows = 1;
    std::size_t cols = 1;
    double element_spacing = 0.0;
    double wavelength = 0.0;
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    // cached N x 3 element coordinates, filled by build_upa
    rmat positions;

    std::size_t size() const { return rows * cols; }
};

// Throws NonPositiveParameter unless every argument is > 0.
ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing, double wavelength);

// N x 3, row n = position of element n; centroid is the origin.
const rmat& element_positions(const ArrayGeometry& geom);

// diagonal of the array footprint: sqrt((rows-1)^2 + (cols-1)^2) * spacing
double aperture(const ArrayGeometry& geom);

// 2 D^2 / lambda with D the footprint diagonal
double rayleigh_distance(const ArrayGeometry& geom);

// NearField strictly inside the Rayleigh distance; the boundary itself is
// FarField (closed far-field region).
RegionLabel classify_region(const ArrayGeometry& geom, const Eigen::Vector3d& point);

// u = (cos el * sin az, sin el, cos el * cos az); broadside at az = el = 0
Eigen::Vector3d direction_from_angles(double azimuth, double elevation);

} // namespace unifield

#include "unifield/geometry.hpp"

#include <cmath>

#include "unifield/errors.hpp"

namespace unifield {

ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing, double wavelength) {
    if (rows == 0 || cols == 0)
        throw NonPositiveParameter("build_upa: rows and cols must be >= 1");
    if (!(spacing > 0.0))
        throw NonPositiveParameter("build_upa: element spacing must be > 0");
    if (!(wavelength > 0.0))
        throw NonPositiveParameter("build_upa: wavelength must be > 0");

    ArrayGeometry g;
    g.rows = rows;
    g.cols = cols;
    g.element_spacing = spacing;
    g.wavelength = wavelength;
    g.origin.setZero();

    std::size_t const n = rows * cols;
    g.positions.resize(Eigen::Index(n), 3);
    double const x0 = (double(rows) - 1.0) / 2.0;
    double const y0 = (double(cols) - 1.0) / 2.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            Eigen::Index const i = Eigen::Index(r * cols + c);
            g.positions(i, 0) = (double(r) - x0) * spacing;
            g.positions(i, 1) = (double(c) - y0) * spacing;
            g.positions(i, 2) = 0.0;
        }
    }
    return g;
}

const rmat& element_positions(const ArrayGeometry& geom) {
    return geom.positions;
}

double aperture(const ArrayGeometry& geom) {
    double const dr = double(geom.rows) - 1.0;
    double const dc = double(geom.cols) - 1.0;
    return std::hypot(dr, dc) * geom.element_spacing;
}

double rayleigh_distance(const ArrayGeometry& geom) {
    double const d = aperture(geom);
    return 2.0 * d * d / geom.wavelength;
}

RegionLabel classify_region(const ArrayGeometry& geom, const Eigen::Vector3d& point) {
    double const r = (point - geom.origin).norm();
    return r < rayleigh_distance(geom) ? RegionLabel::NearField : RegionLabel::FarField;
}

Eigen::Vector3d direction_from_angles(double azimuth, double elevation) {
    double const ce = std::cos(elevation);
    return {ce * std::sin(azimuth), std::sin(elevation), ce * std::cos(azimuth)};
}

} // namespace unifield

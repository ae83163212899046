#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "unifield/errors.hpp"
#include "unifield/geometry.hpp"

using namespace unifield;

TEST_CASE("rayleigh distance matches hand-computed apertures") {
    ArrayGeometry const g8 = build_upa(8, 8, 0.005, 0.01);
    // D = 0.005 * sqrt(49 + 49), 2 D^2 / lambda = 0.49
    CHECK(rayleigh_distance(g8) == doctest::Approx(0.49).epsilon(1e-12));
    CHECK(aperture(g8) == doctest::Approx(0.005 * std::sqrt(98.0)).epsilon(1e-12));

    ArrayGeometry const g32 = build_upa(32, 32, 0.005, 0.01);
    CHECK(rayleigh_distance(g32) == doctest::Approx(9.61).epsilon(1e-12));
}

TEST_CASE("element grid is centered with rows along x") {
    SUBCASE("2x1 pair straddles the origin") {
        ArrayGeometry const g = build_upa(2, 1, 0.003, 0.01);
        const rmat& p = element_positions(g);
        REQUIRE(p.rows() == 2);
        CHECK(p(0, 0) == doctest::Approx(-0.0015));
        CHECK(p(1, 0) == doctest::Approx(0.0015));
        CHECK(p.col(1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(p.col(2).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("2x2 corners, row-major element order") {
        ArrayGeometry const g = build_upa(2, 2, 0.004, 0.01);
        const rmat& p = element_positions(g);
        double const h = 0.002;
        CHECK(p(0, 0) == doctest::Approx(-h));
        CHECK(p(0, 1) == doctest::Approx(-h));
        CHECK(p(1, 0) == doctest::Approx(-h));
        CHECK(p(1, 1) == doctest::Approx(h));
        CHECK(p(2, 0) == doctest::Approx(h));
        CHECK(p(2, 1) == doctest::Approx(-h));
        CHECK(p(3, 0) == doctest::Approx(h));
        CHECK(p(3, 1) == doctest::Approx(h));
    }
    SUBCASE("centroid sits at the origin for odd and even extents") {
        for (auto [r, c] : {std::pair<std::size_t, std::size_t>{5, 3}, {4, 6}, {1, 7}}) {
            ArrayGeometry const g = build_upa(r, c, 0.005, 0.01);
            CHECK(element_positions(g).colwise().mean().cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("rayleigh distance grows with the array") {
    double prev = 0.0;
    for (std::size_t rows = 2; rows <= 64; rows *= 2) {
        ArrayGeometry const g = build_upa(rows, 4, 0.005, 0.01);
        double const dr = rayleigh_distance(g);
        CHECK(dr > prev);
        prev = dr;
    }
}

TEST_CASE("region boundary is closed on the far side") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    double const dr = rayleigh_distance(g);
    CHECK(classify_region(g, {0, 0, dr}) == RegionLabel::FarField);
    CHECK(classify_region(g, {0, 0, dr * (1 - 1e-9)}) == RegionLabel::NearField);
    CHECK(classify_region(g, {0, 0, dr * 10}) == RegionLabel::FarField);
    CHECK(classify_region(g, {0.001, 0, 0.001}) == RegionLabel::NearField);
}

TEST_CASE("direction vector convention") {
    Eigen::Vector3d const broadside = direction_from_angles(0.0, 0.0);
    CHECK((broadside - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
    Eigen::Vector3d const east = direction_from_angles(pi / 2, 0.0);
    CHECK((east - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
    Eigen::Vector3d const up = direction_from_angles(0.0, pi / 2);
    CHECK((up - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
    // always unit length
    for (double az : {-2.1, 0.3, 1.9})
        for (double el : {-1.2, 0.0, 0.7})
            CHECK(direction_from_angles(az, el).norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("non-positive array parameters are rejected") {
    CHECK_THROWS_AS(build_upa(0, 8, 0.005, 0.01), NonPositiveParameter);
    CHECK_THROWS_AS(build_upa(8, 0, 0.005, 0.01), NonPositiveParameter);
    CHECK_THROWS_AS(build_upa(8, 8, 0.0, 0.01), NonPositiveParameter);
    CHECK_THROWS_AS(build_upa(8, 8, -0.005, 0.01), NonPositiveParameter);
    CHECK_THROWS_AS(build_upa(8, 8, 0.005, 0.0), NonPositiveParameter);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "unifield/dictionary.hpp"
#include "unifield/errors.hpp"
#include "unifield/geometry.hpp"
#include "unifield/rng.hpp"
#include "unifield/steering.hpp"

using namespace unifield;

namespace {

// |<a,b>| for unit-norm vectors is 1 exactly when they agree up to a global phase
double phase_invariant_overlap(const cvec& a, const cvec& b) {
    return std::abs(a.dot(b));
}

Eigen::Vector3d hemisphere_direction(Rng& rng) {
    double const uz = rng.uniform();
    double const phi = rng.uniform(0.0, 2.0 * pi);
    double const s = std::sqrt(std::max(0.0, 1.0 - uz * uz));
    return {s * std::cos(phi), s * std::sin(phi), uz};
}

} // namespace

TEST_CASE("plain dft codebook is unitary") {
    for (std::size_t side : {std::size_t(2), std::size_t(8)}) {
        ArrayGeometry const g = build_upa(side, side, 0.005, 0.01);
        Dictionary const d = dft_codebook(g, 1);
        std::size_t const n = side * side;
        REQUIRE(d.size() == n);
        REQUIRE(d.grid_meta.size() == n);
        CHECK(d.kind == DictionaryKind::Dft);
        cmat const gram = d.atoms.adjoint() * d.atoms;
        cmat const eye = cmat::Identity(Eigen::Index(n), Eigen::Index(n));
        CHECK((gram - eye).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("oversampling multiplies the dft grid") {
    ArrayGeometry const small = build_upa(8, 8, 0.005, 0.01);
    Dictionary const d2 = dft_codebook(small, 2);
    CHECK(d2.size() == 4 * 64);
    ArrayGeometry const big = build_upa(32, 32, 0.005, 0.01);
    CHECK(dft_codebook(big, 2).size() == 4096);
    CHECK_THROWS_AS(dft_codebook(small, 0), NonPositiveParameter);
}

TEST_CASE("dft columns match planar steering at their recorded directions") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    for (std::size_t os : {std::size_t(1), std::size_t(2)}) {
        Dictionary const d = dft_codebook(g, os);
        std::size_t visible = 0;
        for (std::size_t m = 0; m < d.size(); ++m) {
            GridMeta const& meta = d.grid_meta[m];
            if (std::isnan(meta.azimuth)) {
                // outside visible space: both angles must be flagged
                CHECK(std::isnan(meta.elevation));
                continue;
            }
            ++visible;
            cvec const ref = planar_steering(g, meta.azimuth, meta.elevation);
            CHECK(phase_invariant_overlap(d.atoms.col(Eigen::Index(m)), ref) ==
                  doctest::Approx(1.0).epsilon(1e-10));
        }
        // the propagating disk keeps most of the grid physical
        CHECK(visible > d.size() / 2);
    }
}

TEST_CASE("polar codebook stacks a far-field slice and distance rings") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    double const dr = rayleigh_distance(g);
    Dictionary const far_only = dft_codebook(g, 1);

    Dictionary const p0 = polar_codebook(g, 0, 0.01 * dr);
    REQUIRE(p0.size() == 64);
    CHECK((p0.atoms - far_only.atoms).cwiseAbs().maxCoeff() < 1e-14);

    Dictionary const p3 = polar_codebook(g, 3, 0.01 * dr);
    REQUIRE(p3.size() == 64 * 4);
    REQUIRE(p3.grid_meta.size() == 64 * 4);
    CHECK(p3.kind == DictionaryKind::Polar);
    CHECK((p3.atoms.leftCols(64) - far_only.atoms).cwiseAbs().maxCoeff() < 1e-14);

    ArrayGeometry const big = build_upa(32, 32, 0.005, 0.01);
    CHECK(polar_codebook(big, 3, 0.1).size() == 4096);
}

TEST_CASE("polar ring columns are spherical steering vectors at the ring radii") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    double const dr = rayleigh_distance(g);
    Dictionary const d = polar_codebook(g, 3, 0.01 * dr);

    std::size_t checked = 0;
    for (std::size_t m = 0; m < d.size(); ++m) {
        GridMeta const& meta = d.grid_meta[m];
        if (!std::isfinite(meta.distance)) continue;
        cvec const ref =
            spherical_steering(g, meta.azimuth, meta.elevation, meta.distance);
        CHECK((d.atoms.col(Eigen::Index(m)) - ref).norm() < 1e-12);
        ++checked;
    }
    CHECK(checked == 3 * 64);

    // broadside ring radii follow the inverse-integer rule d_R / s
    for (std::size_t m = 0; m < d.size(); ++m) {
        GridMeta const& meta = d.grid_meta[m];
        if (!std::isfinite(meta.distance) || meta.lx != 0 || meta.ly != 0) continue;
        bool const is_ring_radius = std::abs(meta.distance - dr) < 1e-12 ||
                                    std::abs(meta.distance - dr / 2) < 1e-12 ||
                                    std::abs(meta.distance - dr / 3) < 1e-12;
        CHECK(is_ring_radius);
    }
}

TEST_CASE("min_distance clips the inner polar rings") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    double const dr = rayleigh_distance(g);
    double const floor_radius = 0.6 * dr;
    Dictionary const d = polar_codebook(g, 4, floor_radius);
    std::size_t clipped = 0;
    for (GridMeta const& meta : d.grid_meta) {
        if (!std::isfinite(meta.distance)) continue;
        CHECK(meta.distance >= floor_radius - 1e-12);
        if (std::abs(meta.distance - floor_radius) < 1e-12) ++clipped;
    }
    // rings s = 2, 3, 4 all collapse onto the floor radius
    CHECK(clipped == 3 * 64);
    CHECK_THROWS_AS(polar_codebook(g, 2, -1.0), NonPositiveParameter);
}

TEST_CASE("zero-wavenumber atom is the flat vector") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    Dictionary const d = wavenumber_dictionary(g, false);
    bool found = false;
    for (std::size_t m = 0; m < d.size(); ++m) {
        if (d.grid_meta[m].lx != 0 || d.grid_meta[m].ly != 0) continue;
        found = true;
        cvec const col = d.atoms.col(Eigen::Index(m));
        CHECK((col.array() - cx(1.0 / 8.0, 0.0)).abs().maxCoeff() < 1e-12);
    }
    CHECK(found);
}

TEST_CASE("wavenumber lattice counts follow the propagating disk") {
    struct Expect {
        std::size_t side, disk, with_ring;
    };
    for (Expect const e : {Expect{8, 47, 63}, Expect{16, 195, 239}, Expect{32, 795, 895}}) {
        ArrayGeometry const g = build_upa(e.side, e.side, 0.005, 0.01);
        Dictionary const disk = wavenumber_dictionary(g, false);
        Dictionary const ringed = wavenumber_dictionary(g, true);
        CHECK(disk.size() == e.disk);
        CHECK(ringed.size() == e.with_ring);
        CHECK(disk.kind == DictionaryKind::Wavenumber);
        // at half-wavelength spacing the disk fills ~ pi/4 of the N lattice cells
        if (e.side * e.side >= 256) {
            double const ratio = double(e.disk) / (pi / 4.0 * double(e.side * e.side));
            CHECK(ratio > 0.9);
            CHECK(ratio < 1.1);
        }
    }
}

TEST_CASE("wavenumber atoms are orthonormal on the element grid") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    Dictionary const d = wavenumber_dictionary(g, true);
    cmat const gram = d.atoms.adjoint() * d.atoms;
    cmat const eye = cmat::Identity(gram.rows(), gram.cols());
    CHECK((gram - eye).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("every dictionary column is unit norm and finite") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    double const dr = rayleigh_distance(g);
    for (Dictionary const& d : {dft_codebook(g, 2), polar_codebook(g, 3, 0.05 * dr),
                                wavenumber_dictionary(g, true)}) {
        CHECK(d.atoms.allFinite());
        for (std::size_t m = 0; m < d.size(); ++m)
            CHECK(d.atoms.col(Eigen::Index(m)).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("coherence is the worst off-diagonal correlation") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    CHECK(coherence(dft_codebook(g, 1)) < 1e-10);

    // duplicated column drives coherence to its ceiling
    Dictionary dup = dft_codebook(g, 1);
    dup.atoms.col(5) = dup.atoms.col(17);
    CHECK(coherence(dup) == doctest::Approx(1.0).epsilon(1e-12));

    // brute-force cross-check on an oversampled grid
    ArrayGeometry const tiny = build_upa(4, 4, 0.005, 0.01);
    Dictionary const d = dft_codebook(tiny, 2);
    double expected = 0.0;
    for (Eigen::Index i = 0; i < d.atoms.cols(); ++i)
        for (Eigen::Index j = i + 1; j < d.atoms.cols(); ++j)
            expected = std::max(expected, std::abs(d.atoms.col(i).dot(d.atoms.col(j))));
    CHECK(coherence(d) == doctest::Approx(expected).epsilon(1e-14));

    Dictionary lone;
    lone.atoms = cmat::Ones(4, 1) / 2.0;
    lone.grid_meta.resize(1);
    CHECK_THROWS_AS(coherence(lone), DimensionMismatch);
}

TEST_CASE("far-field steering vectors project into the wavenumber span") {
    // The lattice plane waves are claimed to represent any far-field response
    // to within 1% relative residual. Directions near grazing put half of the
    // response's spatial spectrum outside the propagating disk, so this holds
    // only with margin to spare near broadside; the whole-hemisphere draw
    // documents where the claim stands.
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    Dictionary const d = wavenumber_dictionary(g, true);
    Rng rng(7);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Eigen::Vector3d const u = hemisphere_direction(rng);
        cvec const h = planar_steering(g, u);
        // orthonormal atoms: the least-squares residual is the energy outside the span
        double const captured = (d.atoms.adjoint() * h).squaredNorm();
        double const residual = std::sqrt(std::max(0.0, 1.0 - captured));
        worst = std::max(worst, residual);
    }
    CHECK_MESSAGE(worst < 1e-2,
                  "worst relative projection residual over 100 directions: " << worst);
}

TEST_CASE("near-field responses compact better on the wavenumber grid than the angular grid") {
    ArrayGeometry const g = build_upa(16, 16, 0.005, 0.01);
    double const dr = rayleigh_distance(g);
    Dictionary const wav = wavenumber_dictionary(g, true);
    Dictionary const ang = dft_codebook(g, 1);
    // both dictionaries get the same coefficient budget (5% of the smaller
    // grid); handing each its own 5% would compare unequal budgets whenever
    // the ceilings land on different integers
    std::size_t const budget = std::size_t(std::ceil(0.05 * double(wav.size())));

    auto top_fraction = [budget](const Dictionary& d, const cvec& h) {
        Eigen::VectorXd mag = (d.atoms.adjoint() * h).cwiseAbs2();
        std::vector<double> v(mag.data(), mag.data() + mag.size());
        std::sort(v.begin(), v.end(), std::greater<double>());
        double const total = mag.sum();
        double top = 0.0;
        for (std::size_t i = 0; i < budget && i < v.size(); ++i) top += v[i];
        return top / total;
    };

    Rng rng(31);
    double wav_avg = 0.0, ang_avg = 0.0;
    for (int i = 0; i < 100; ++i) {
        Eigen::Vector3d const u = hemisphere_direction(rng);
        double const r = rng.uniform(0.05 * dr, 0.3 * dr);
        cvec const h = spherical_steering(g, r * u);
        wav_avg += top_fraction(wav, h);
        ang_avg += top_fraction(ang, h);
    }
    wav_avg /= 100.0;
    ang_avg /= 100.0;
    CHECK_MESSAGE(wav_avg > ang_avg,
                  "wavenumber " << wav_avg << " vs angular " << ang_avg);
}

TEST_CASE("dictionary files round-trip through the binary format") {
    ArrayGeometry const g = build_upa(8, 8, 0.005, 0.01);
    Dictionary const d = wavenumber_dictionary(g, true);
    std::string const path = "test_dictionary_roundtrip.ufmd";
    save_dictionary(d, path);

    // header: magic, then N, M, version as little-endian u32
    {
        std::ifstream in(path, std::ios::binary);
        REQUIRE(bool(in));
        char magic[4];
        std::uint32_t n = 0, m = 0, version = 0;
        in.read(magic, 4);
        in.read(reinterpret_cast<char*>(&n), 4);
        in.read(reinterpret_cast<char*>(&m), 4);
        in.read(reinterpret_cast<char*>(&version), 4);
        CHECK(std::memcmp(magic, "UFMD", 4) == 0);
        CHECK(n == 64);
        CHECK(m == d.size());
        CHECK(version == 1);
    }

    Dictionary const back = load_dictionary(path);
    CHECK(back.kind == DictionaryKind::Learned);
    REQUIRE(back.atoms.rows() == d.atoms.rows());
    REQUIRE(back.atoms.cols() == d.atoms.cols());
    CHECK(back.grid_meta.size() == d.size());
    // entries survive the float32 narrowing
    CHECK((back.atoms - d.atoms).cwiseAbs().maxCoeff() < 1e-6);

    CHECK_THROWS_AS(load_dictionary("no_such_dictionary.ufmd"), IoFailure);

    // corrupt magic
    {
        std::ofstream out(path, std::ios::binary);
        out.write("XXXX", 4);
    }
    CHECK_THROWS_AS(load_dictionary(path), IoFailure);

    // valid header, truncated payload
    {
        std::ofstream out(path, std::ios::binary);
        std::uint32_t const n = 4, m = 4, version = 1;
        out.write("UFMD", 4);
        out.write(reinterpret_cast<const char*>(&n), 4);
        out.write(reinterpret_cast<const char*>(&m), 4);
        out.write(reinterpret_cast<const char*>(&version), 4);
        float const half_entry = 0.5f;
        out.write(reinterpret_cast<const char*>(&half_entry), 4);
    }
    CHECK_THROWS_AS(load_dictionary(path), IoFailure);
    std::remove(path.c_str());
}

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "unifield/geometry.hpp"
#include "unifield/types.hpp"

namespace unifield {

enum class DictionaryKind { Dft, Polar, Wavenumber, Learned };

// Physical parameters of one column. Angular grids fill azimuth/elevation
// (NaN when the lattice point lies outside visible space) and distance
// (inf for far-field columns, the ring radius for polar spherical columns).
// Wavenumber columns fill the integer lattice indices.
struct GridMeta {
    double azimuth = 0.0;
    double elevation = 0.0;
    double distance = 0.0;
    int lx = 0;
    int ly = 0;
};

struct Dictionary {
    cmat atoms; // N x M, unit-norm columns
    DictionaryKind kind = DictionaryKind::Learned;
    std::vector<GridMeta> grid_meta;

    std::size_t size() const { return std::size_t(atoms.cols()); }
};

// Kronecker product of the two per-axis oversampled DFT grids;
// M = oversampling^2 * N. oversampling = 1 gives a unitary matrix.
Dictionary dft_codebook(const ArrayGeometry& geom, std::size_t oversampling);

// One far-field column per angular grid point (the DFT grid), plus
// distance_rings spherical columns per grid point at radii
// r_s = rayleigh_distance / s, s = 1..distance_rings, clipped below at
// min_distance. M = N * (distance_rings + 1). Grid points outside visible
// space are clamped onto the unit circle for the spherical columns.
Dictionary polar_codebook(const ArrayGeometry& geom, std::size_t distance_rings,
                          double min_distance);

// Sampled plane waves exp(i(k_x x_n + k_y y_n))/sqrt(N) on the lattice
// k = 2pi l / L with L_x = rows * spacing, L_y = cols * spacing (one extra
// spacing beyond the footprint, making distinct columns exactly orthogonal
// on the element grid). Lattice points restricted to the propagating disk
// (l_x lambda/L_x)^2 + (l_y lambda/L_y)^2 <= 1; include_evanescent adds the
// one-step lattice ring just outside the disk.
Dictionary wavenumber_dictionary(const ArrayGeometry& geom, bool include_evanescent);

// max over i != j of |<a_i, a_j>|, brute force
double coherence(const Dictionary& dict);

// Binary matrix file: 16-byte header (magic "UFMD", u32 N, u32 M, u32
// version), then row-major complex64 entries (float32 re/im pairs), little
// endian. Loaded dictionaries come back as kind Learned with default meta.
void save_dictionary(const Dictionary& dict, const std::string& path);
Dictionary load_dictionary(const std::string& path);

} // namespace unifield

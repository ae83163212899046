#include "unifield/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <utility>

#include "unifield/errors.hpp"
#include "unifield/steering.hpp"

namespace unifield {

namespace {

constexpr std::uint32_t k_format_version = 1;
constexpr char k_magic[4] = {'U', 'F', 'M', 'D'};

// centered lattice index for a natural grid index on an axis of given length
inline int centered_index(std::size_t i, std::size_t len) {
    return i < (len + 1) / 2 ? int(i) : int(i) - int(len);
}

inline double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline double inf_value() { return std::numeric_limits<double>::infinity(); }

} // namespace

Dictionary dft_codebook(const ArrayGeometry& geom, std::size_t oversampling) {
    if (oversampling == 0)
        throw NonPositiveParameter("dft_codebook: oversampling must be >= 1");
    std::size_t const rows = geom.rows, cols = geom.cols;
    std::size_t const n = geom.size();
    std::size_t const gx = oversampling * rows, gy = oversampling * cols;
    std::size_t const m = gx * gy;
    double const scale = 1.0 / std::sqrt(double(n));
    // direction component per unit lattice index on each axis
    double const fx = geom.wavelength / (double(gx) * geom.element_spacing);
    double const fy = geom.wavelength / (double(gy) * geom.element_spacing);

    Dictionary d;
    d.kind = DictionaryKind::Dft;
    d.atoms.resize(Eigen::Index(n), Eigen::Index(m));
    d.grid_meta.resize(m);

    std::size_t col = 0;
    for (std::size_t lx = 0; lx < gx; ++lx) {
        for (std::size_t ly = 0; ly < gy; ++ly, ++col) {
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t c = 0; c < cols; ++c) {
                    double const ph = -2.0 * pi * (double(r) * double(lx) / double(gx) +
                                                   double(c) * double(ly) / double(gy));
                    d.atoms(Eigen::Index(r * cols + c), Eigen::Index(col)) =
                        cx(std::cos(ph) * scale, std::sin(ph) * scale);
                }
            }
            GridMeta& meta = d.grid_meta[col];
            meta.lx = centered_index(lx, gx);
            meta.ly = centered_index(ly, gy);
            meta.distance = inf_value();
            double const ux = fx * meta.lx, uy = fy * meta.ly;
            double const rr = ux * ux + uy * uy;
            if (rr <= 1.0 + 1e-12) {
                double const uz = std::sqrt(std::max(0.0, 1.0 - rr));
                meta.azimuth = std::atan2(ux, uz);
                meta.elevation = std::asin(std::clamp(uy, -1.0, 1.0));
            } else {
                // beyond visible space; no physical direction
                meta.azimuth = nan_value();
                meta.elevation = nan_value();
            }
        }
    }
    return d;
}

Dictionary polar_codebook(const ArrayGeometry& geom, std::size_t distance_rings,
                          double min_distance) {
    if (min_distance < 0.0)
        throw NonPositiveParameter("polar_codebook: min_distance must be >= 0");
    std::size_t const rows = geom.rows, cols = geom.cols;
    std::size_t const n = geom.size();
    double const d_r = rayleigh_distance(geom);
    double const fx = geom.wavelength / (double(rows) * geom.element_spacing);
    double const fy = geom.wavelength / (double(cols) * geom.element_spacing);

    Dictionary far = dft_codebook(geom, 1);

    Dictionary d;
    d.kind = DictionaryKind::Polar;
    d.atoms.resize(Eigen::Index(n), Eigen::Index(n * (distance_rings + 1)));
    d.atoms.leftCols(Eigen::Index(n)) = far.atoms;
    d.grid_meta = std::move(far.grid_meta);
    d.grid_meta.reserve(n * (distance_rings + 1));

    std::size_t col = n;
    for (std::size_t s = 1; s <= distance_rings; ++s) {
        double const radius = std::max(d_r / double(s), min_distance);
        for (std::size_t lx = 0; lx < rows; ++lx) {
            for (std::size_t ly = 0; ly < cols; ++ly, ++col) {
                double ux = fx * centered_index(lx, rows);
                double uy = fy * centered_index(ly, cols);
                double const rr = ux * ux + uy * uy;
                double uz;
                if (rr > 1.0) {
                    // grid point outside visible space: clamp onto the unit
                    // circle so the source still lies at the ring radius
                    double const inv = 1.0 / std::sqrt(rr);
                    ux *= inv;
                    uy *= inv;
                    uz = 0.0;
                } else {
                    uz = std::sqrt(std::max(0.0, 1.0 - rr));
                }
                Eigen::Vector3d const src(radius * ux, radius * uy, radius * uz);
                d.atoms.col(Eigen::Index(col)) = spherical_steering(geom, src);

                GridMeta meta;
                meta.lx = centered_index(lx, rows);
                meta.ly = centered_index(ly, cols);
                meta.distance = radius;
                meta.azimuth = std::atan2(ux, uz);
                meta.elevation = std::asin(std::clamp(uy, -1.0, 1.0));
                d.grid_meta.push_back(meta);
            }
        }
    }
    return d;
}

Dictionary wavenumber_dictionary(const ArrayGeometry& geom, bool include_evanescent) {
    std::size_t const rows = geom.rows, cols = geom.cols;
    std::size_t const n = geom.size();
    // one extra spacing beyond the footprint keeps lattice columns exactly
    // orthogonal on the element grid
    double const lx_len = double(rows) * geom.element_spacing;
    double const ly_len = double(cols) * geom.element_spacing;
    double const qx = geom.wavelength / lx_len;
    double const qy = geom.wavelength / ly_len;

    int const lx_lo = rows % 2 == 0 ? -(int(rows) / 2 - 1) : -(int(rows) / 2);
    int const lx_hi = int(rows) / 2;
    int const ly_lo = cols % 2 == 0 ? -(int(cols) / 2 - 1) : -(int(cols) / 2);
    int const ly_hi = int(cols) / 2;

    auto inside = [&](int ix, int iy) {
        double const ax = qx * ix, ay = qy * iy;
        return ax * ax + ay * ay <= 1.0 + 1e-12;
    };

    std::vector<std::pair<int, int>> sel;
    for (int ix = lx_lo; ix <= lx_hi; ++ix)
        for (int iy = ly_lo; iy <= ly_hi; ++iy)
            if (inside(ix, iy)) sel.emplace_back(ix, iy);
    if (include_evanescent) {
        // one lattice step outside the disk
        for (int ix = lx_lo; ix <= lx_hi; ++ix) {
            for (int iy = ly_lo; iy <= ly_hi; ++iy) {
                if (inside(ix, iy)) continue;
                bool adjacent = false;
                for (int a = -1; a <= 1 && !adjacent; ++a)
                    for (int b = -1; b <= 1 && !adjacent; ++b)
                        if (inside(ix + a, iy + b)) adjacent = true;
                if (adjacent) sel.emplace_back(ix, iy);
            }
        }
    }

    Dictionary d;
    d.kind = DictionaryKind::Wavenumber;
    d.atoms.resize(Eigen::Index(n), Eigen::Index(sel.size()));
    d.grid_meta.resize(sel.size());
    double const scale = 1.0 / std::sqrt(double(n));
    const rmat& p = geom.positions;
    for (std::size_t m = 0; m < sel.size(); ++m) {
        auto const [ix, iy] = sel[m];
        double const kx = 2.0 * pi * double(ix) / lx_len;
        double const ky = 2.0 * pi * double(iy) / ly_len;
        for (std::size_t e = 0; e < n; ++e) {
            double const ph = kx * p(Eigen::Index(e), 0) + ky * p(Eigen::Index(e), 1);
            d.atoms(Eigen::Index(e), Eigen::Index(m)) = cx(std::cos(ph) * scale, std::sin(ph) * scale);
        }
        GridMeta& meta = d.grid_meta[m];
        meta.lx = ix;
        meta.ly = iy;
        meta.distance = inf_value();
        double const ux = qx * ix, uy = qy * iy;
        double const rr = ux * ux + uy * uy;
        if (rr <= 1.0 + 1e-12) {
            double const uz = std::sqrt(std::max(0.0, 1.0 - rr));
            meta.azimuth = std::atan2(ux, uz);
            meta.elevation = std::asin(std::clamp(uy, -1.0, 1.0));
        } else {
            meta.azimuth = nan_value();
            meta.elevation = nan_value();
        }
    }
    return d;
}

double coherence(const Dictionary& dict) {
    Eigen::Index const m = dict.atoms.cols();
    if (m < 2)
        throw DimensionMismatch("coherence: need at least two atoms");
    double best = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            double const v = std::abs(dict.atoms.col(i).dot(dict.atoms.col(j)));
            if (v > best) best = v;
        }
    }
    return best;
}

void save_dictionary(const Dictionary& dict, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("save_dictionary: cannot open " + path);
    std::uint32_t const n = std::uint32_t(dict.atoms.rows());
    std::uint32_t const m = std::uint32_t(dict.atoms.cols());
    out.write(k_magic, 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&m), 4);
    out.write(reinterpret_cast<const char*>(&k_format_version), 4);
    // row-major so external row-oriented readers need no transpose
    for (std::uint32_t r = 0; r < n; ++r) {
        for (std::uint32_t c = 0; c < m; ++c) {
            cx const v = dict.atoms(Eigen::Index(r), Eigen::Index(c));
            float const re = float(v.real()), im = float(v.imag());
            out.write(reinterpret_cast<const char*>(&re), 4);
            out.write(reinterpret_cast<const char*>(&im), 4);
        }
    }
    if (!out)
        throw IoFailure("save_dictionary: write failed for " + path);
}

Dictionary load_dictionary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("load_dictionary: cannot open " + path);
    char magic[4];
    std::uint32_t n = 0, m = 0, version = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&m), 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    if (!in || std::memcmp(magic, k_magic, 4) != 0)
        throw IoFailure("load_dictionary: bad header in " + path);
    if (version != k_format_version)
        throw IoFailure("load_dictionary: unsupported format version in " + path);
    Dictionary d;
    d.kind = DictionaryKind::Learned;
    d.atoms.resize(Eigen::Index(n), Eigen::Index(m));
    d.grid_meta.resize(m);
    for (std::uint32_t r = 0; r < n; ++r) {
        for (std::uint32_t c = 0; c < m; ++c) {
            float re = 0.0f, im = 0.0f;
            in.read(reinterpret_cast<char*>(&re), 4);
            in.read(reinterpret_cast<char*>(&im), 4);
            d.atoms(Eigen::Index(r), Eigen::Index(c)) = cx(double(re), double(im));
        }
    }
    if (!in)
        throw IoFailure("load_dictionary: truncated data in " + path);
    return d;
}

} // namespace unifield

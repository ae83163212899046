#include "unifield/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "unifield/errors.hpp"

namespace unifield {

namespace {

inline double wrap_angle(double a) {
    // into (-pi, pi]
    a = std::fmod(a + pi, 2.0 * pi);
    if (a <= 0.0) a += 2.0 * pi;
    return a - pi;
}

} // namespace

cvec planar_steering(const ArrayGeometry& geom, const Eigen::Vector3d& direction) {
    const rmat& p = geom.positions;
    std::size_t const n = geom.size();
    double const k = 2.0 * pi / geom.wavelength;
    double const scale = 1.0 / std::sqrt(double(n));
    cvec v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const phase = -k * (p(Eigen::Index(i), 0) * direction.x() +
                                   p(Eigen::Index(i), 1) * direction.y() +
                                   p(Eigen::Index(i), 2) * direction.z());
        v(Eigen::Index(i)) = cx(std::cos(phase) * scale, std::sin(phase) * scale);
    }
    return v;
}

cvec planar_steering(const ArrayGeometry& geom, double azimuth, double elevation) {
    return planar_steering(geom, direction_from_angles(azimuth, elevation));
}

cvec spherical_steering(const ArrayGeometry& geom, const Eigen::Vector3d& source) {
    const rmat& p = geom.positions;
    std::size_t const n = geom.size();
    double const k = 2.0 * pi / geom.wavelength;
    double const scale = 1.0 / std::sqrt(double(n));
    double const ref = source.norm();
    cvec v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const dx = p(Eigen::Index(i), 0) - source.x();
        double const dy = p(Eigen::Index(i), 1) - source.y();
        double const dz = p(Eigen::Index(i), 2) - source.z();
        double const dist = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (dist < 1e-12)
            throw SourceOnArray("spherical_steering: source coincides with an element");
        double const phase = k * (dist - ref);
        v(Eigen::Index(i)) = cx(std::cos(phase) * scale, std::sin(phase) * scale);
    }
    return v;
}

cvec spherical_steering(const ArrayGeometry& geom, double azimuth, double elevation,
                        double distance) {
    return spherical_steering(geom, distance * direction_from_angles(azimuth, elevation));
}

ClusterConfig make_cluster_config(std::size_t clusters, std::size_t rays_per_cluster,
                                  double angular_spread) {
    if (clusters == 0 || rays_per_cluster == 0)
        throw NonPositiveParameter("make_cluster_config: clusters and rays must be >= 1");
    if (angular_spread < 0.0)
        throw NonPositiveParameter("make_cluster_config: angular spread must be >= 0");
    ClusterConfig cfg;
    cfg.clusters = clusters;
    cfg.rays_per_cluster = rays_per_cluster;
    cfg.angular_spread = angular_spread;
    cfg.per_cluster_power.resize(Eigen::Index(clusters));
    for (std::size_t c = 0; c < clusters; ++c)
        cfg.per_cluster_power(Eigen::Index(c)) = std::exp(-double(c));
    cfg.per_cluster_power /= cfg.per_cluster_power.sum();
    return cfg;
}

UePlacement sample_ue_placement(const ArrayGeometry& geom, RegionLabel region,
                                std::pair<double, double> radial_bounds, Rng& rng) {
    double const lo = radial_bounds.first;
    double const hi = radial_bounds.second;
    double const d_r = rayleigh_distance(geom);
    if (!(lo > 0.0))
        throw NonPositiveParameter("sample_ue_placement: lower radial bound must be > 0");
    if (lo > hi)
        throw InconsistentBounds("sample_ue_placement: lower bound above upper bound");
    // the boundary itself classifies as far field, so near bounds must stay
    // strictly inside
    if (region == RegionLabel::NearField && hi >= d_r)
        throw InconsistentBounds("sample_ue_placement: near-field bounds reach the Rayleigh distance");
    if (region == RegionLabel::FarField && lo < d_r)
        throw InconsistentBounds("sample_ue_placement: far-field bounds start inside the Rayleigh distance");

    // uniform solid angle on the z > 0 hemisphere
    double const uz = rng.uniform();
    double const phi = rng.uniform(0.0, 2.0 * pi);
    double const s = std::sqrt(std::max(0.0, 1.0 - uz * uz));
    Eigen::Vector3d const u(s * std::cos(phi), s * std::sin(phi), uz);
    double const r = rng.uniform(lo, hi);

    UePlacement ue;
    ue.position = r * u;
    ue.region = region;
    return ue;
}

cvec path_steering(const ArrayGeometry& geom, const PathComponent& path) {
    if (path.near_field && std::isfinite(path.distance))
        return spherical_steering(geom, path.azimuth, path.elevation, path.distance);
    return planar_steering(geom, path.azimuth, path.elevation);
}

ChannelRealization generate_channel(const ArrayGeometry& geom, const UePlacement& ue,
                                    const ClusterConfig& cfg, Rng& rng) {
    if (cfg.clusters == 0 || cfg.rays_per_cluster == 0)
        throw NonPositiveParameter("generate_channel: empty cluster config");
    if (cfg.per_cluster_power.size() != Eigen::Index(cfg.clusters))
        throw DimensionMismatch("generate_channel: per-cluster power length mismatch");
    double const wsum = cfg.per_cluster_power.sum();
    if (cfg.per_cluster_power.minCoeff() < 0.0 || std::abs(wsum - 1.0) > 1e-9)
        throw InconsistentBounds("generate_channel: cluster powers must be nonnegative and sum to 1");

    std::size_t const n = geom.size();
    double const d_r = rayleigh_distance(geom);
    bool const near = ue.region == RegionLabel::NearField;

    double const ue_r = ue.position.norm();
    double const ue_az = std::atan2(ue.position.x(), ue.position.z());
    double const ue_el = std::asin(std::clamp(ue.position.y() / (ue_r > 0.0 ? ue_r : 1.0), -1.0, 1.0));

    ChannelRealization out;
    out.ue = ue;
    out.h = cvec::Zero(Eigen::Index(n));
    out.paths.reserve(cfg.clusters * cfg.rays_per_cluster);

    double const root_n = std::sqrt(double(n));
    for (std::size_t c = 0; c < cfg.clusters; ++c) {
        double caz, cel, cr;
        if (c == 0) {
            caz = ue_az;
            cel = ue_el;
            cr = near ? ue_r : std::numeric_limits<double>::infinity();
        } else {
            // scatterer cluster on the same hemisphere, same regime as the UE
            double const uz = rng.uniform();
            double const ph = rng.uniform(0.0, 2.0 * pi);
            double const sx = std::sqrt(std::max(0.0, 1.0 - uz * uz));
            Eigen::Vector3d const u(sx * std::cos(ph), sx * std::sin(ph), uz);
            caz = std::atan2(u.x(), u.z());
            cel = std::asin(std::clamp(u.y(), -1.0, 1.0));
            cr = near ? rng.uniform(0.05, 1.0) * d_r : std::numeric_limits<double>::infinity();
        }
        double const ray_var = cfg.per_cluster_power(Eigen::Index(c)) / double(cfg.rays_per_cluster);
        for (std::size_t rray = 0; rray < cfg.rays_per_cluster; ++rray) {
            double const raz = wrap_angle(caz + rng.laplace(cfg.angular_spread));
            double const rel = std::clamp(cel + rng.laplace(cfg.angular_spread), -pi / 2.0, pi / 2.0);
            cx const g = rng.cgaussian(ray_var);

            PathComponent path;
            path.azimuth = raz;
            path.elevation = rel;
            path.distance = cr;
            path.near_field = near && std::isfinite(cr);
            path.gain = root_n * g;

            out.h += path.gain * path_steering(geom, path);
            out.paths.push_back(path);
        }
    }
    return out;
}

cvec reconstruct_from_paths(const ArrayGeometry& geom, const std::vector<PathComponent>& paths) {
    cvec h = cvec::Zero(Eigen::Index(geom.size()));
    for (const auto& p : paths) h += p.gain * path_steering(geom, p);
    return h;
}

cmat generate_multiuser_channels(const ArrayGeometry& geom,
                                 const std::vector<UePlacement>& placements,
                                 const ClusterConfig& cfg, Rng& rng,
                                 std::vector<ChannelRealization>* meta) {
    if (placements.empty())
        throw NonPositiveParameter("generate_multiuser_channels: need at least one UE");
    cmat h(placements.size(), geom.size());
    if (meta) meta->clear();
    for (std::size_t k = 0; k < placements.size(); ++k) {
        ChannelRealization ch = generate_channel(geom, placements[k], cfg, rng);
        h.row(Eigen::Index(k)) = ch.h.transpose();
        if (meta) meta->push_back(std::move(ch));
    }
    return h;
}

} // namespace unifield

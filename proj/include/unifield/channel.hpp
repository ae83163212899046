#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "unifield/geometry.hpp"
#include "unifield/rng.hpp"
#include "unifield/steering.hpp"
#include "unifield/types.hpp"

namespace unifield {

// One propagation ray. Near-field rays carry a concrete source distance and
// use spherical wavefronts; far-field rays are pure directions. The stored
// gain absorbs all scaling, so summing gain * steering over paths rebuilds
// the channel exactly.
struct PathComponent {
    cx gain;
    double azimuth;   // (-pi, pi]
    double elevation; // [-pi/2, pi/2]
    double distance;  // meters; meaningful only when near_field
    bool near_field;
};

struct ClusterConfig {
    std::size_t clusters = 4;
    std::size_t rays_per_cluster = 5;
    double angular_spread = 0.0873; // radians, ~5 degrees
    rvec per_cluster_power;         // nonnegative, sums to 1
};

// Exponentially decaying cluster powers, normalized.
ClusterConfig make_cluster_config(std::size_t clusters, std::size_t rays_per_cluster,
                                  double angular_spread);

struct UePlacement {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    RegionLabel region = RegionLabel::FarField;
};

struct ChannelRealization {
    cvec h;
    std::vector<PathComponent> paths;
    UePlacement ue;
};

// Uniform in solid angle over the broadside hemisphere, uniform in radius
// within radial_bounds. Throws InconsistentBounds when the bounds disagree
// with the requested region relative to the Rayleigh distance.
UePlacement sample_ue_placement(const ArrayGeometry& geom, RegionLabel region,
                                std::pair<double, double> radial_bounds, Rng& rng);

// Clustered multipath channel: the first cluster sits on the UE itself; the
// remaining clusters are hemisphere scatterers sharing the UE's near/far
// regime, each with one distance (near: uniform [0.05, 1] of the Rayleigh
// distance). Rays get Laplacian angle offsets and complex Gaussian gains
// weighted by per-cluster power; h is scaled so E||h||^2 = N.
ChannelRealization generate_channel(const ArrayGeometry& geom, const UePlacement& ue,
                                    const ClusterConfig& cfg, Rng& rng);

// Steering vector of one stored path.
cvec path_steering(const ArrayGeometry& geom, const PathComponent& path);

// sum of gain * steering over paths; equals ChannelRealization::h to round-off
cvec reconstruct_from_paths(const ArrayGeometry& geom, const std::vector<PathComponent>& paths);

// K x N, row k = channel of placements[k] (unconjugated h_k). Per-UE draws
// come from the shared rng in placement order.
cmat generate_multiuser_channels(const ArrayGeometry& geom,
                                 const std::vector<UePlacement>& placements,
                                 const ClusterConfig& cfg, Rng& rng,
                                 std::vector<ChannelRealization>* meta = nullptr);

} // namespace unifield

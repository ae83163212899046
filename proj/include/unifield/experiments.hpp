#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "unifield/config.hpp"
#include "unifield/dictionary.hpp"
#include "unifield/ksvd.hpp"
#include "unifield/precoding.hpp"
#include "unifield/types.hpp"

namespace unifield {

struct ScenarioConfig {
    std::string scenario_id = "custom";

    // geometry
    std::size_t rows = 32, cols = 32;
    double spacing_over_lambda = 0.5;
    double carrier_wavelength_m = 0.01;

    // users and channel
    std::size_t near_ues = 4, far_ues = 12;
    std::size_t clusters = 4, rays_per_cluster = 5;
    double angular_spread_deg = 5.0;
    double near_lo_frac = 0.05, near_hi_frac = 0.95; // placement radii / d_R
    double far_lo_frac = 1.5, far_hi_frac = 10.0;

    // sweep
    std::vector<double> snr_grid_db = {-10, -5, 0, 5, 10, 15, 20};
    std::size_t trials = 500;
    std::uint64_t seed = 1;
    std::vector<std::string> methods;

    // pipeline stage flags
    bool estimation_enabled = true; // hybrids use per-method CSI acquisition; off = genie
    bool projection_enabled = true; // constant-modulus projection of the learned codebook
    bool train_genie = false;       // learn from true channels instead of pilot estimates

    // pilot estimation
    std::size_t pilot_count = 1024;
    std::size_t omp_max_atoms = 40;
    double omp_noise_margin = 1.1; // residual floor = margin * expected noise energy
    double train_snr_db = 20.0;    // pilot SNR when training on estimates

    // codebooks
    std::size_t dft_oversampling = 1;
    std::size_t polar_rings = 3;
    double polar_min_distance_frac = 0.05; // of the Rayleigh distance
    bool wavenumber_evanescent = false;

    // learned codebook
    KsvdConfig ksvd;
    std::size_t training_channels = 2000;

    // precoding
    std::size_t sweep_L = 4;
    std::size_t n_rf = 16;
    double power_budget = 1.0;
    AnalogSelection analog_selection = AnalogSelection::PerUe;

    int workers = 1;
};

struct ResultRow {
    std::string scenario;
    std::string method;
    double snr_db = 0.0;
    std::string metric;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
};

struct ResultTable {
    std::vector<std::string> header_comments; // emitted as "# ..." lines
    std::vector<ResultRow> rows;              // sorted by (method, snr_db)
};

// Presets: fig2_nmse, fig4a_sweep, fig4b_hybrid, fig5a_near, fig5b_far.
// Throws UnknownPreset.
ScenarioConfig preset(const std::string& name);

// Scale a preset to desk size: 8x8 array, 4 UEs, 50 trials, smaller
// codebooks, single-ray channels, reduced SNR grids.
void apply_desk(ScenarioConfig& cfg);

// Apply one `key = value` override; throws ConfigError on unknown keys or
// unparsable values.
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);
void apply_overrides(ScenarioConfig& cfg, const ConfigMap& overrides);

// Resolved config as sorted `key = value` lines (the `info` output, also
// embedded in CSV header comments).
std::string describe(const ScenarioConfig& cfg);

// Train the scenario's learned codebook from an independent training split
// (genie channels or pilot estimates per cfg.train_genie). Returns the raw
// (unprojected) dictionary plus the training history.
LearnedCodebook train_regression_codebook(const ScenarioConfig& cfg);

ResultTable run_scenario(const ScenarioConfig& cfg);

std::string render_csv(const ResultTable& table);
void emit_csv(const ResultTable& table, const std::string& path); // IoFailure

} // namespace unifield

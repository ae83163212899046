#include "unifield/experiments.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unifield/channel.hpp"
#include "unifield/errors.hpp"
#include "unifield/geometry.hpp"
#include "unifield/omp.hpp"
#include "unifield/parallel.hpp"
#include "unifield/rng.hpp"

namespace unifield {

namespace {

// shortest decimal that round-trips; keeps CSV output byte-stable
std::string fmt(double v) {
    char buf[64];
    auto const res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += v[i];
    }
    return out;
}

enum class Arch { OmpNmse, Type1, Type2, Hybrid, CmMf, FullyDigital };
enum class Book { None, Dft, Polar, Wavenumber, Regression };

struct MethodPlan {
    std::string label;
    Arch arch = Arch::CmMf;
    Book book = Book::None;
};

MethodPlan plan_method(const std::string& label) {
    MethodPlan p;
    p.label = label;
    if (label == "omp_angular") {
        p.arch = Arch::OmpNmse;
        p.book = Book::Dft;
        return p;
    }
    if (label == "omp_wavenumber") {
        p.arch = Arch::OmpNmse;
        p.book = Book::Wavenumber;
        return p;
    }
    if (label == "cm_mf") {
        p.arch = Arch::CmMf;
        return p;
    }
    if (label == "fully_digital") {
        p.arch = Arch::FullyDigital;
        return p;
    }
    std::size_t const us = label.rfind('_');
    if (us != std::string::npos) {
        std::string const family = label.substr(0, us);
        std::string const arch = label.substr(us + 1);
        if (family == "dft")
            p.book = Book::Dft;
        else if (family == "polar")
            p.book = Book::Polar;
        else if (family == "regression")
            p.book = Book::Regression;
        else
            throw ConfigError("unknown method: " + label);
        if (arch == "type1")
            p.arch = Arch::Type1;
        else if (arch == "type2")
            p.arch = Arch::Type2;
        else if (arch == "hybrid")
            p.arch = Arch::Hybrid;
        else
            throw ConfigError("unknown method: " + label);
        return p;
    }
    throw ConfigError("unknown method: " + label);
}

double snr_db_to_sigma(double snr_db) { return std::pow(10.0, -snr_db / 20.0); }

// BS-side channel reconstruction from one UE's sweep feedback: least squares
// over the reported codewords with a small ridge for repeated beams
cvec ridge_reconstruct(const Dictionary& book, const FeedbackReport& rep, double ridge) {
    Eigen::Index const l = Eigen::Index(rep.codeword_indices.size());
    cmat s(book.atoms.rows(), l);
    cvec b(l);
    for (Eigen::Index i = 0; i < l; ++i) {
        s.col(i) = book.atoms.col(rep.codeword_indices[std::size_t(i)]);
        b(i) = std::conj(rep.amplitudes(i));
    }
    cmat const g = s.adjoint() * s + ridge * cmat::Identity(l, l);
    return s * g.ldlt().solve(b);
}

struct UeLayout {
    std::size_t near_ues = 0, far_ues = 0;
    double near_lo = 0.0, near_hi = 0.0, far_lo = 0.0, far_hi = 0.0;

    std::size_t total() const { return near_ues + far_ues; }
    RegionLabel region(std::size_t k) const {
        return k < near_ues ? RegionLabel::NearField : RegionLabel::FarField;
    }
    std::pair<double, double> bounds(std::size_t k) const {
        return k < near_ues ? std::make_pair(near_lo, near_hi) : std::make_pair(far_lo, far_hi);
    }
};

UeLayout make_layout(const ScenarioConfig& cfg, double d_r) {
    UeLayout l;
    l.near_ues = cfg.near_ues;
    l.far_ues = cfg.far_ues;
    l.near_lo = cfg.near_lo_frac * d_r;
    l.near_hi = cfg.near_hi_frac * d_r;
    l.far_lo = cfg.far_lo_frac * d_r;
    l.far_hi = cfg.far_hi_frac * d_r;
    return l;
}

ChannelRealization draw_ue(const ArrayGeometry& geom, const UeLayout& layout,
                           const ClusterConfig& ccfg, std::size_t k, Rng& rng) {
    auto const [lo, hi] = layout.bounds(k);
    UePlacement const place = sample_ue_placement(geom, layout.region(k), {lo, hi}, rng);
    return generate_channel(geom, place, ccfg, rng);
}

} // namespace

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig c;
    c.scenario_id = name;
    c.wavenumber_evanescent = true;
    if (name == "fig2_nmse") {
        c.methods = {"omp_angular", "omp_wavenumber"};
        c.trials = 100;
    } else if (name == "fig4a_sweep") {
        c.methods = {"dft_type2", "polar_type2", "regression_type2", "cm_mf"};
    } else if (name == "fig4b_hybrid") {
        c.methods = {"dft_hybrid", "polar_hybrid", "regression_hybrid", "fully_digital"};
    } else if (name == "fig5a_near") {
        c.methods = {"dft_hybrid", "polar_hybrid", "regression_hybrid", "fully_digital"};
        c.near_ues = 16;
        c.far_ues = 0;
    } else if (name == "fig5b_far") {
        c.methods = {"dft_hybrid", "polar_hybrid", "regression_hybrid", "fully_digital"};
        c.near_ues = 0;
        c.far_ues = 16;
    } else {
        throw UnknownPreset("unknown preset: " + name +
                            " (expected fig2_nmse, fig4a_sweep, fig4b_hybrid, fig5a_near, "
                            "fig5b_far)");
    }
    return c;
}

void apply_desk(ScenarioConfig& cfg) {
    cfg.rows = 8;
    cfg.cols = 8;
    cfg.trials = 50;
    if (cfg.near_ues > 0 && cfg.far_ues > 0) {
        cfg.near_ues = 2;
        cfg.far_ues = 2;
    } else if (cfg.near_ues > 0) {
        cfg.near_ues = 4;
        cfg.far_ues = 0;
    } else {
        cfg.near_ues = 0;
        cfg.far_ues = 4;
    }
    cfg.clusters = 1;
    cfg.rays_per_cluster = 1;
    cfg.n_rf = 4;
    cfg.pilot_count = 64;
    cfg.omp_max_atoms = 16;
    cfg.ksvd.atom_count = 512;
    cfg.ksvd.sparsity = 1;
    cfg.ksvd.max_iters = 20;
    cfg.training_channels = 2000;
    cfg.train_genie = true;
    if (cfg.scenario_id == "fig2_nmse")
        cfg.snr_grid_db = {-10, -5, 0, 5, 10, 15, 20};
    else if (cfg.scenario_id == "fig4a_sweep")
        cfg.snr_grid_db = {-20, -15, -10, -5};
    else
        cfg.snr_grid_db = {5, 10, 15, 20};
}

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "scenario_id")
        cfg.scenario_id = value;
    else if (key == "rows")
        cfg.rows = config_count(key, value);
    else if (key == "cols")
        cfg.cols = config_count(key, value);
    else if (key == "spacing_over_lambda")
        cfg.spacing_over_lambda = config_double(key, value);
    else if (key == "carrier_wavelength_m")
        cfg.carrier_wavelength_m = config_double(key, value);
    else if (key == "near_ues")
        cfg.near_ues = config_count(key, value);
    else if (key == "far_ues")
        cfg.far_ues = config_count(key, value);
    else if (key == "clusters")
        cfg.clusters = config_count(key, value);
    else if (key == "rays_per_cluster")
        cfg.rays_per_cluster = config_count(key, value);
    else if (key == "angular_spread_deg")
        cfg.angular_spread_deg = config_double(key, value);
    else if (key == "near_lo_frac")
        cfg.near_lo_frac = config_double(key, value);
    else if (key == "near_hi_frac")
        cfg.near_hi_frac = config_double(key, value);
    else if (key == "far_lo_frac")
        cfg.far_lo_frac = config_double(key, value);
    else if (key == "far_hi_frac")
        cfg.far_hi_frac = config_double(key, value);
    else if (key == "snr_grid_db")
        cfg.snr_grid_db = config_double_list(key, value);
    else if (key == "trials")
        cfg.trials = config_count(key, value);
    else if (key == "seed")
        cfg.seed = config_u64(key, value);
    else if (key == "methods")
        cfg.methods = config_string_list(key, value);
    else if (key == "estimation_enabled")
        cfg.estimation_enabled = config_bool(key, value);
    else if (key == "projection_enabled")
        cfg.projection_enabled = config_bool(key, value);
    else if (key == "train_genie")
        cfg.train_genie = config_bool(key, value);
    else if (key == "pilot_count")
        cfg.pilot_count = config_count(key, value);
    else if (key == "omp_max_atoms")
        cfg.omp_max_atoms = config_count(key, value);
    else if (key == "omp_noise_margin")
        cfg.omp_noise_margin = config_double(key, value);
    else if (key == "train_snr_db")
        cfg.train_snr_db = config_double(key, value);
    else if (key == "dft_oversampling")
        cfg.dft_oversampling = config_count(key, value);
    else if (key == "polar_rings")
        cfg.polar_rings = config_count(key, value);
    else if (key == "polar_min_distance_frac")
        cfg.polar_min_distance_frac = config_double(key, value);
    else if (key == "wavenumber_evanescent")
        cfg.wavenumber_evanescent = config_bool(key, value);
    else if (key == "ksvd_atom_count")
        cfg.ksvd.atom_count = config_count(key, value);
    else if (key == "ksvd_sparsity")
        cfg.ksvd.sparsity = config_count(key, value);
    else if (key == "ksvd_max_iters")
        cfg.ksvd.max_iters = config_count(key, value);
    else if (key == "ksvd_nmse_threshold")
        cfg.ksvd.nmse_threshold = config_double(key, value);
    else if (key == "training_channels")
        cfg.training_channels = config_count(key, value);
    else if (key == "sweep_L")
        cfg.sweep_L = config_count(key, value);
    else if (key == "n_rf")
        cfg.n_rf = config_count(key, value);
    else if (key == "power_budget")
        cfg.power_budget = config_double(key, value);
    else if (key == "analog_selection") {
        if (value == "global")
            cfg.analog_selection = AnalogSelection::Global;
        else if (value == "per_ue")
            cfg.analog_selection = AnalogSelection::PerUe;
        else
            throw ConfigError("analog_selection: expected global or per_ue, got '" + value + "'");
    } else if (key == "workers") {
        cfg.workers = int(config_count(key, value));
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

void apply_overrides(ScenarioConfig& cfg, const ConfigMap& overrides) {
    for (const auto& [key, value] : overrides) apply_override(cfg, key, value);
}

std::string describe(const ScenarioConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"scenario_id", cfg.scenario_id},
        {"rows", std::to_string(cfg.rows)},
        {"cols", std::to_string(cfg.cols)},
        {"spacing_over_lambda", fmt(cfg.spacing_over_lambda)},
        {"carrier_wavelength_m", fmt(cfg.carrier_wavelength_m)},
        {"near_ues", std::to_string(cfg.near_ues)},
        {"far_ues", std::to_string(cfg.far_ues)},
        {"clusters", std::to_string(cfg.clusters)},
        {"rays_per_cluster", std::to_string(cfg.rays_per_cluster)},
        {"angular_spread_deg", fmt(cfg.angular_spread_deg)},
        {"near_lo_frac", fmt(cfg.near_lo_frac)},
        {"near_hi_frac", fmt(cfg.near_hi_frac)},
        {"far_lo_frac", fmt(cfg.far_lo_frac)},
        {"far_hi_frac", fmt(cfg.far_hi_frac)},
        {"snr_grid_db", fmt_list(cfg.snr_grid_db)},
        {"trials", std::to_string(cfg.trials)},
        {"seed", std::to_string(cfg.seed)},
        {"methods", join(cfg.methods)},
        {"estimation_enabled", cfg.estimation_enabled ? "true" : "false"},
        {"projection_enabled", cfg.projection_enabled ? "true" : "false"},
        {"train_genie", cfg.train_genie ? "true" : "false"},
        {"pilot_count", std::to_string(cfg.pilot_count)},
        {"omp_max_atoms", std::to_string(cfg.omp_max_atoms)},
        {"omp_noise_margin", fmt(cfg.omp_noise_margin)},
        {"train_snr_db", fmt(cfg.train_snr_db)},
        {"dft_oversampling", std::to_string(cfg.dft_oversampling)},
        {"polar_rings", std::to_string(cfg.polar_rings)},
        {"polar_min_distance_frac", fmt(cfg.polar_min_distance_frac)},
        {"wavenumber_evanescent", cfg.wavenumber_evanescent ? "true" : "false"},
        {"ksvd_atom_count", std::to_string(cfg.ksvd.atom_count)},
        {"ksvd_sparsity", std::to_string(cfg.ksvd.sparsity)},
        {"ksvd_max_iters", std::to_string(cfg.ksvd.max_iters)},
        {"ksvd_nmse_threshold", fmt(cfg.ksvd.nmse_threshold)},
        {"training_channels", std::to_string(cfg.training_channels)},
        {"sweep_L", std::to_string(cfg.sweep_L)},
        {"n_rf", std::to_string(cfg.n_rf)},
        {"power_budget", fmt(cfg.power_budget)},
        {"analog_selection",
         cfg.analog_selection == AnalogSelection::Global ? "global" : "per_ue"},
    };
    // workers deliberately excluded: output must not depend on execution shape
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

LearnedCodebook train_regression_codebook(const ScenarioConfig& cfg) {
    if (cfg.training_channels == 0)
        throw ConfigError("training_channels must be >= 1");
    std::size_t const k_total = cfg.near_ues + cfg.far_ues;
    if (k_total == 0)
        throw ConfigError("need at least one UE region to define the training distribution");

    ArrayGeometry const geom =
        build_upa(cfg.rows, cfg.cols, cfg.spacing_over_lambda * cfg.carrier_wavelength_m,
                  cfg.carrier_wavelength_m);
    double const d_r = rayleigh_distance(geom);
    UeLayout const layout = make_layout(cfg, d_r);
    ClusterConfig const ccfg = make_cluster_config(cfg.clusters, cfg.rays_per_cluster,
                                                   cfg.angular_spread_deg * pi / 180.0);

    std::optional<Dictionary> wav;
    std::optional<MeasurementMatrix> meas;
    cmat sense_wav;
    if (!cfg.train_genie) {
        wav = wavenumber_dictionary(geom, cfg.wavenumber_evanescent);
        Rng prng(derive_seed(cfg.seed, 71));
        meas = build_measurement(geom, cfg.pilot_count, prng);
        sense_wav = meas->phi * wav->atoms;
    }

    Eigen::Index const n = Eigen::Index(geom.size());
    std::size_t const t_count = cfg.training_channels;
    cmat h_train(n, Eigen::Index(t_count));
    double const snr_lin = std::pow(10.0, cfg.train_snr_db / 10.0);

    parallel_for(t_count, cfg.workers, [&](std::size_t t) {
        Rng rng(derive_seed(cfg.seed, 1000000 + std::uint64_t(t)));
        ChannelRealization const ch = draw_ue(geom, layout, ccfg, t % k_total, rng);
        if (cfg.train_genie) {
            h_train.col(Eigen::Index(t)) = ch.h;
            return;
        }
        // pilot-domain estimate at the training SNR, mirroring deployment
        double const sig_energy = (meas->phi * ch.h).squaredNorm();
        double const sigma2 = sig_energy / (double(meas->pilot_count) * snr_lin);
        cvec const y = observe(*meas, ch.h, std::sqrt(sigma2), rng);
        double const yn = y.norm();
        OmpStopping stop;
        stop.max_atoms = cfg.omp_max_atoms;
        stop.residual_tol =
            yn > 0.0 ? std::sqrt(cfg.omp_noise_margin * double(meas->pilot_count) * sigma2) / yn
                     : 0.0;
        h_train.col(Eigen::Index(t)) = reconstruct(*wav, omp(y, sense_wav, stop));
    });

    KsvdConfig kcfg = cfg.ksvd;
    kcfg.seed = derive_seed(cfg.seed, 999);
    return ksvd_learn(h_train, kcfg, cfg.workers);
}

ResultTable run_scenario(const ScenarioConfig& cfg) {
    if (cfg.trials == 0) throw ConfigError("trials must be >= 1");
    if (cfg.snr_grid_db.empty()) throw ConfigError("snr_grid_db must be nonempty");
    if (cfg.methods.empty()) throw ConfigError("methods must be nonempty");
    if (cfg.near_ues + cfg.far_ues == 0) throw ConfigError("need at least one UE");
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");

    std::vector<MethodPlan> plans;
    plans.reserve(cfg.methods.size());
    for (const std::string& label : cfg.methods) plans.push_back(plan_method(label));

    ArrayGeometry const geom =
        build_upa(cfg.rows, cfg.cols, cfg.spacing_over_lambda * cfg.carrier_wavelength_m,
                  cfg.carrier_wavelength_m);
    double const d_r = rayleigh_distance(geom);
    UeLayout const layout = make_layout(cfg, d_r);
    std::size_t const k_total = layout.total();
    ClusterConfig const ccfg = make_cluster_config(cfg.clusters, cfg.rays_per_cluster,
                                                   cfg.angular_spread_deg * pi / 180.0);

    bool need_dft = false, need_polar = false, need_wav = false, need_reg = false,
         need_pilots = false;
    for (const MethodPlan& p : plans) {
        if (p.book == Book::Dft) need_dft = true;
        if (p.book == Book::Polar) need_polar = true;
        if (p.book == Book::Wavenumber) need_wav = true;
        if (p.book == Book::Regression) need_reg = true;
        if (p.arch == Arch::OmpNmse) need_pilots = true;
        if (p.arch == Arch::Hybrid && p.book == Book::Regression && cfg.estimation_enabled) {
            need_wav = true;
            need_pilots = true;
        }
    }

    std::optional<Dictionary> dft, polar, wav;
    if (need_dft) dft = dft_codebook(geom, cfg.dft_oversampling);
    if (need_polar)
        polar = polar_codebook(geom, cfg.polar_rings, cfg.polar_min_distance_frac * d_r);
    if (need_wav) wav = wavenumber_dictionary(geom, cfg.wavenumber_evanescent);

    Dictionary regression;
    if (need_reg) {
        LearnedCodebook lc = train_regression_codebook(cfg);
        regression = std::move(lc.dictionary);
        if (cfg.projection_enabled)
            regression.atoms = constant_modulus_project(regression.atoms);
    }

    std::optional<MeasurementMatrix> meas;
    cmat sense_dft, sense_wav;
    if (need_pilots) {
        Rng prng(derive_seed(cfg.seed, 71));
        meas = build_measurement(geom, cfg.pilot_count, prng);
        if (need_dft) sense_dft = meas->phi * dft->atoms;
        if (need_wav) sense_wav = meas->phi * wav->atoms;
    }

    auto book_for = [&](Book b) -> const Dictionary& {
        switch (b) {
            case Book::Dft: return *dft;
            case Book::Polar: return *polar;
            case Book::Wavenumber: return *wav;
            case Book::Regression: return regression;
            default: throw ConfigError("method has no codebook");
        }
    };

    std::size_t const s_count = cfg.snr_grid_db.size();
    std::size_t const m_count = plans.size();
    std::vector<double> values(cfg.trials * s_count * m_count, 0.0);
    Eigen::Index const n = Eigen::Index(geom.size());

    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        try {
            std::uint64_t const trial_seed = derive_seed(cfg.seed, std::uint64_t(t));

            std::vector<cvec> hs(k_total);
            cmat h_mat(Eigen::Index(k_total), n);
            for (std::size_t k = 0; k < k_total; ++k) {
                Rng rng(derive_seed(trial_seed, std::uint64_t(k)));
                ChannelRealization const ch = draw_ue(geom, layout, ccfg, k, rng);
                hs[k] = ch.h;
                h_mat.row(Eigen::Index(k)) = ch.h.transpose();
            }

            for (std::size_t si = 0; si < s_count; ++si) {
                double const snr_db = cfg.snr_grid_db[si];
                for (std::size_t mi = 0; mi < m_count; ++mi) {
                    const MethodPlan& plan = plans[mi];
                    Rng nrng(derive_seed(trial_seed, 10000 + std::uint64_t(si) * 64 +
                                                         std::uint64_t(mi)));
                    double value = 0.0;

                    if (plan.arch == Arch::OmpNmse) {
                        const Dictionary& dict = book_for(plan.book);
                        const cmat& sense = plan.book == Book::Dft ? sense_dft : sense_wav;
                        double const snr_lin = std::pow(10.0, snr_db / 10.0);
                        double acc = 0.0;
                        for (std::size_t k = 0; k < k_total; ++k) {
                            double const sig = (meas->phi * hs[k]).squaredNorm();
                            double const sigma2 =
                                sig / (double(meas->pilot_count) * snr_lin);
                            cvec const y = observe(*meas, hs[k], std::sqrt(sigma2), nrng);
                            double const yn = y.norm();
                            OmpStopping stop;
                            stop.max_atoms = cfg.omp_max_atoms;
                            stop.residual_tol =
                                yn > 0.0 ? std::sqrt(cfg.omp_noise_margin *
                                                     double(meas->pilot_count) * sigma2) /
                                               yn
                                         : 0.0;
                            acc += nmse(reconstruct(dict, omp(y, sense, stop)), hs[k]);
                        }
                        value = acc / double(k_total);
                    } else if (plan.arch == Arch::CmMf) {
                        double const sigma = snr_db_to_sigma(snr_db);
                        value = spectral_efficiency(
                                    h_mat, cm_mf_precoder(h_mat, cfg.power_budget).f, sigma)
                                    .sum;
                    } else if (plan.arch == Arch::FullyDigital) {
                        double const sigma = snr_db_to_sigma(snr_db);
                        value = spectral_efficiency(
                                    h_mat,
                                    fully_digital_zf(h_mat, cfg.power_budget, sigma).f, sigma)
                                    .sum;
                    } else {
                        double const sigma = snr_db_to_sigma(snr_db);
                        const Dictionary& book = book_for(plan.book);
                        std::vector<FeedbackReport> reports;
                        reports.reserve(k_total);
                        for (std::size_t k = 0; k < k_total; ++k)
                            reports.push_back(beam_sweep_report(book, hs[k], cfg.sweep_L,
                                                                sigma, nrng, int(k)));

                        cmat f;
                        if (plan.arch == Arch::Type1) {
                            f = type1_precoder(reports, book, cfg.power_budget).f;
                        } else if (plan.arch == Arch::Type2) {
                            f = type2_precoder(reports, book, cfg.power_budget).f;
                        } else {
                            cmat est(Eigen::Index(k_total), n);
                            if (!cfg.estimation_enabled) {
                                est = h_mat;
                            } else if (plan.book == Book::Regression) {
                                // pilot-domain CSI through the plane-wave
                                // dictionary; sweep feedback picks beams only
                                for (std::size_t k = 0; k < k_total; ++k) {
                                    cvec const y = observe(*meas, hs[k], sigma, nrng);
                                    double const yn = y.norm();
                                    OmpStopping stop;
                                    stop.max_atoms = cfg.omp_max_atoms;
                                    stop.residual_tol =
                                        yn > 0.0
                                            ? std::sqrt(cfg.omp_noise_margin *
                                                        double(meas->pilot_count) * sigma *
                                                        sigma) /
                                                  yn
                                            : 0.0;
                                    est.row(Eigen::Index(k)) =
                                        reconstruct(*wav, omp(y, sense_wav, stop))
                                            .transpose();
                                }
                            } else {
                                // noise-matched ridge: polar rings carry
                                // nearly collinear atoms, plain LS explodes
                                double const ridge = std::max(1e-9, sigma * sigma);
                                for (std::size_t k = 0; k < k_total; ++k)
                                    est.row(Eigen::Index(k)) =
                                        ridge_reconstruct(book, reports[k], ridge)
                                            .transpose();
                            }
                            f = hybrid_precoder(book, reports, est, cfg.n_rf,
                                                cfg.power_budget, cfg.analog_selection)
                                    .f();
                        }
                        value = spectral_efficiency(h_mat, f, sigma).sum;
                    }

                    values[(t * s_count + si) * m_count + mi] = value;
                }
            }
        } catch (const Error& e) {
            throw Error("trial " + std::to_string(t) + ": " + e.what());
        }
    });

    ResultTable table;
    bool const any_nmse =
        std::any_of(plans.begin(), plans.end(),
                    [](const MethodPlan& p) { return p.arch == Arch::OmpNmse; });
    bool const any_se =
        std::any_of(plans.begin(), plans.end(),
                    [](const MethodPlan& p) { return p.arch != Arch::OmpNmse; });
    if (any_nmse)
        table.header_comments.push_back(
            "snr_db is pilot SNR: per-UE noise variance = ||phi*h||^2 / (pilot_count * "
            "10^(snr_db/10))");
    if (any_se)
        table.header_comments.push_back(
            "snr_db sets data noise sigma = 10^(-snr_db/20) against the configured power "
            "budget, with E||h||^2 = N");
    {
        std::string const desc = describe(cfg);
        std::size_t start = 0;
        while (start < desc.size()) {
            std::size_t const nl = desc.find('\n', start);
            table.header_comments.push_back(desc.substr(start, nl - start));
            start = nl + 1;
        }
    }

    for (std::size_t mi = 0; mi < m_count; ++mi) {
        for (std::size_t si = 0; si < s_count; ++si) {
            double sum = 0.0;
            for (std::size_t t = 0; t < cfg.trials; ++t)
                sum += values[(t * s_count + si) * m_count + mi];
            double const mean = sum / double(cfg.trials);
            double stderr_ = 0.0;
            if (cfg.trials > 1) {
                double ss = 0.0;
                for (std::size_t t = 0; t < cfg.trials; ++t) {
                    double const d = values[(t * s_count + si) * m_count + mi] - mean;
                    ss += d * d;
                }
                stderr_ = std::sqrt(ss / double(cfg.trials - 1) / double(cfg.trials));
            }
            ResultRow row;
            row.scenario = cfg.scenario_id;
            row.method = plans[mi].label;
            row.snr_db = cfg.snr_grid_db[si];
            row.metric = plans[mi].arch == Arch::OmpNmse ? "nmse" : "sum_se";
            row.mean = mean;
            row.stderr_ = stderr_;
            row.trials = cfg.trials;
            table.rows.push_back(std::move(row));
        }
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const ResultRow& a, const ResultRow& b) {
                  if (a.method != b.method) return a.method < b.method;
                  if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
                  return a.metric < b.metric;
              });
    return table;
}

std::string render_csv(const ResultTable& table) {
    std::string out;
    for (const std::string& c : table.header_comments) out += "# " + c + "\n";
    out += "scenario,method,snr_db,metric,mean,stderr,trials\n";
    for (const ResultRow& r : table.rows) {
        out += r.scenario + "," + r.method + "," + fmt(r.snr_db) + "," + r.metric + "," +
               fmt(r.mean) + "," + fmt(r.stderr_) + "," + std::to_string(r.trials) + "\n";
    }
    return out;
}

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoFailure("cannot open for writing: " + path);
    std::string const body = render_csv(table);
    out.write(body.data(), std::streamsize(body.size()));
    if (!out)
        throw IoFailure("write failed: " + path);
}

} // namespace unifield

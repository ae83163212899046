#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "unifield/config.hpp"
#include "unifield/errors.hpp"
#include "unifield/experiments.hpp"

using namespace unifield;

namespace {

// desk-scale hybrid scenario trimmed to methods that need no codebook training
ScenarioConfig quick_config() {
    ScenarioConfig cfg = preset("fig4b_hybrid");
    apply_desk(cfg);
    cfg.methods = {"dft_type2", "cm_mf", "fully_digital", "dft_hybrid"};
    cfg.trials = 6;
    cfg.snr_grid_db = {0.0, 10.0};
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("a single trial produces one row per method and snr") {
    ScenarioConfig cfg = quick_config();
    cfg.methods = {"fully_digital"};
    cfg.trials = 1;
    cfg.snr_grid_db = {10.0};
    ResultTable const t = run_scenario(cfg);
    REQUIRE(t.rows.size() == 1);
    const ResultRow& r = t.rows[0];
    CHECK(r.scenario == "fig4b_hybrid");
    CHECK(r.method == "fully_digital");
    CHECK(r.snr_db == 10.0);
    CHECK(r.metric == "sum_se");
    CHECK(r.mean > 0.0);
    CHECK(r.stderr_ == 0.0);
    CHECK(r.trials == 1);
}

TEST_CASE("the same seed reproduces the table byte for byte") {
    ScenarioConfig const cfg = quick_config();
    std::string const a = render_csv(run_scenario(cfg));
    std::string const b = render_csv(run_scenario(cfg));
    CHECK(a == b);

    ScenarioConfig other = cfg;
    other.seed = 2;
    CHECK(render_csv(run_scenario(other)) != a);
}

TEST_CASE("worker count never changes the results") {
    ScenarioConfig cfg = quick_config();
    cfg.workers = 1;
    std::string const serial = render_csv(run_scenario(cfg));
    cfg.workers = 8;
    std::string const parallel = render_csv(run_scenario(cfg));
    CHECK(serial == parallel);
}

TEST_CASE("rows come out sorted by method then snr") {
    ResultTable const t = run_scenario(quick_config());
    REQUIRE(t.rows.size() == 8);
    std::vector<std::string> const want = {"cm_mf",         "cm_mf",       "dft_hybrid",
                                           "dft_hybrid",    "dft_type2",   "dft_type2",
                                           "fully_digital", "fully_digital"};
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.rows[i].method == want[i]);
        CHECK(t.rows[i].snr_db == (i % 2 == 0 ? 0.0 : 10.0));
        CHECK(t.rows[i].metric == "sum_se");
        CHECK(t.rows[i].stderr_ >= 0.0);
    }
}

TEST_CASE("estimation error nmse comes back finite and positive") {
    ScenarioConfig cfg = preset("fig2_nmse");
    apply_desk(cfg);
    cfg.trials = 2;
    cfg.snr_grid_db = {0.0};
    ResultTable const t = run_scenario(cfg);
    REQUIRE(t.rows.size() == 2);
    for (const ResultRow& r : t.rows) {
        CHECK(r.metric == "nmse");
        CHECK(r.mean > 0.0);
        CHECK(r.mean < 10.0);
    }
    bool pilot_comment = false;
    for (const std::string& c : t.header_comments)
        if (c.find("pilot") != std::string::npos) pilot_comment = true;
    CHECK(pilot_comment);
}

TEST_CASE("csv output is stable and parseable") {
    ResultTable const t = run_scenario(quick_config());
    std::string const body = render_csv(t);

    SUBCASE("re-rendering is byte-identical") { CHECK(render_csv(t) == body); }

    SUBCASE("the first non-comment line is the pinned header") {
        std::istringstream in(body);
        std::string line;
        while (std::getline(in, line) && !line.empty() && line[0] == '#') {
        }
        CHECK(line == "scenario,method,snr_db,metric,mean,stderr,trials");
        // one data line per row, each with seven comma-separated fields
        std::size_t data_lines = 0;
        while (std::getline(in, line)) {
            ++data_lines;
            std::size_t commas = 0;
            for (char ch : line)
                if (ch == ',') ++commas;
            CHECK(commas == 6);
        }
        CHECK(data_lines == t.rows.size());
    }

    SUBCASE("emitting twice gives byte-identical files") {
        std::string const p1 = "/tmp/unifield_emit_a.csv";
        std::string const p2 = "/tmp/unifield_emit_b.csv";
        emit_csv(t, p1);
        emit_csv(t, p2);
        CHECK(slurp(p1) == slurp(p2));
        CHECK(slurp(p1) == body);
        std::remove(p1.c_str());
        std::remove(p2.c_str());
    }

    SUBCASE("an empty table emits only the header") {
        std::string const p = "/tmp/unifield_emit_empty.csv";
        emit_csv(ResultTable{}, p);
        CHECK(slurp(p) == "scenario,method,snr_db,metric,mean,stderr,trials\n");
        std::remove(p.c_str());
    }

    SUBCASE("unwritable paths raise io errors") {
        CHECK_THROWS_AS(emit_csv(t, "/nonexistent_dir/out.csv"), IoFailure);
    }
}

TEST_CASE("presets pin the scenario families") {
    ScenarioConfig const f2 = preset("fig2_nmse");
    CHECK(f2.methods == std::vector<std::string>{"omp_angular", "omp_wavenumber"});
    CHECK(f2.trials == 100);
    CHECK(f2.near_ues == 4);
    CHECK(f2.far_ues == 12);

    ScenarioConfig const f4a = preset("fig4a_sweep");
    CHECK(f4a.methods == std::vector<std::string>{"dft_type2", "polar_type2",
                                                  "regression_type2", "cm_mf"});
    CHECK(f4a.near_ues == 4);
    CHECK(f4a.far_ues == 12);
    CHECK(f4a.rows == 32);
    CHECK(f4a.cols == 32);
    CHECK(f4a.clusters == 4);
    CHECK(f4a.rays_per_cluster == 5);
    CHECK(f4a.trials == 500);

    ScenarioConfig const f4b = preset("fig4b_hybrid");
    CHECK(f4b.methods == std::vector<std::string>{"dft_hybrid", "polar_hybrid",
                                                  "regression_hybrid", "fully_digital"});

    ScenarioConfig const f5a = preset("fig5a_near");
    CHECK(f5a.near_ues == 16);
    CHECK(f5a.far_ues == 0);

    ScenarioConfig const f5b = preset("fig5b_far");
    CHECK(f5b.near_ues == 0);
    CHECK(f5b.far_ues == 16);

    CHECK_THROWS_AS(preset("fig2"), UnknownPreset);
    CHECK_THROWS_AS(preset(""), UnknownPreset);
}

TEST_CASE("desk scaling shrinks every preset to laptop size") {
    ScenarioConfig mixed = preset("fig4b_hybrid");
    apply_desk(mixed);
    CHECK(mixed.rows == 8);
    CHECK(mixed.cols == 8);
    CHECK(mixed.trials == 50);
    CHECK(mixed.near_ues == 2);
    CHECK(mixed.far_ues == 2);
    CHECK(mixed.clusters == 1);
    CHECK(mixed.rays_per_cluster == 1);
    CHECK(mixed.n_rf == 4);
    CHECK(mixed.pilot_count == 64);
    CHECK(mixed.omp_max_atoms == 16);
    CHECK(mixed.ksvd.atom_count == 512);
    CHECK(mixed.ksvd.sparsity == 1);
    CHECK(mixed.ksvd.max_iters == 20);
    CHECK(mixed.training_channels == 2000);
    CHECK(mixed.train_genie);
    CHECK(mixed.snr_grid_db == std::vector<double>{5, 10, 15, 20});

    ScenarioConfig near_only = preset("fig5a_near");
    apply_desk(near_only);
    CHECK(near_only.near_ues == 4);
    CHECK(near_only.far_ues == 0);

    ScenarioConfig far_only = preset("fig5b_far");
    apply_desk(far_only);
    CHECK(far_only.near_ues == 0);
    CHECK(far_only.far_ues == 4);

    ScenarioConfig nmse = preset("fig2_nmse");
    apply_desk(nmse);
    CHECK(nmse.snr_grid_db == std::vector<double>{-10, -5, 0, 5, 10, 15, 20});

    ScenarioConfig sweep = preset("fig4a_sweep");
    apply_desk(sweep);
    CHECK(sweep.snr_grid_db == std::vector<double>{-20, -15, -10, -5});
}

TEST_CASE("overrides reach the config and reject nonsense") {
    ScenarioConfig cfg = preset("fig4b_hybrid");
    apply_override(cfg, "rows", "16");
    CHECK(cfg.rows == 16);
    apply_override(cfg, "methods", "cm_mf, fully_digital");
    CHECK(cfg.methods == std::vector<std::string>{"cm_mf", "fully_digital"});
    apply_override(cfg, "analog_selection", "per_ue");
    CHECK(cfg.analog_selection == AnalogSelection::PerUe);
    apply_override(cfg, "snr_grid_db", "-5, 0, 5");
    CHECK(cfg.snr_grid_db == std::vector<double>{-5, 0, 5});
    apply_override(cfg, "train_genie", "true");
    CHECK(cfg.train_genie);

    CHECK_THROWS_AS(apply_override(cfg, "no_such_key", "1"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "rows", "x"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "analog_selection", "sideways"), ConfigError);

    ConfigMap const m = parse_config_text("trials = 7\nseed = 9\n");
    apply_overrides(cfg, m);
    CHECK(cfg.trials == 7);
    CHECK(cfg.seed == 9);
}

TEST_CASE("the config description is execution-shape independent") {
    ScenarioConfig cfg = quick_config();
    cfg.workers = 1;
    std::string const one = describe(cfg);
    cfg.workers = 16;
    CHECK(describe(cfg) == one);
    CHECK(one.find("workers") == std::string::npos);
    CHECK(one.find("rows = 8") != std::string::npos);
    CHECK(one.find("scenario_id = fig4b_hybrid") != std::string::npos);
    CHECK((one.find("analog_selection = per_ue") != std::string::npos ||
           one.find("analog_selection = global") != std::string::npos));
}

TEST_CASE("invalid scenario configs are rejected up front") {
    ScenarioConfig ok = quick_config();

    ScenarioConfig bad = ok;
    bad.methods = {"bogus_method"};
    CHECK_THROWS_AS(run_scenario(bad), ConfigError);

    bad = ok;
    bad.trials = 0;
    CHECK_THROWS_AS(run_scenario(bad), ConfigError);

    bad = ok;
    bad.snr_grid_db.clear();
    CHECK_THROWS_AS(run_scenario(bad), ConfigError);

    bad = ok;
    bad.methods.clear();
    CHECK_THROWS_AS(run_scenario(bad), ConfigError);

    bad = ok;
    bad.near_ues = 0;
    bad.far_ues = 0;
    CHECK_THROWS_AS(run_scenario(bad), ConfigError);

    bad = ok;
    bad.workers = 0;
    CHECK_THROWS_AS(run_scenario(bad), ConfigError);
}

TEST_CASE("monte carlo means concentrate over many trials") {
    ScenarioConfig cfg = quick_config();
    cfg.methods = {"fully_digital"};
    cfg.trials = 300;
    cfg.snr_grid_db = {10.0};
    ResultTable const t = run_scenario(cfg);
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].mean > 0.0);
    CHECK(t.rows[0].stderr_ / t.rows[0].mean < 0.03);
}

#include "doctest.h"

#include "chemo/config.hpp"
#include "chemo/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chemo;

TEST_CASE("parse overrides on top of a preset") {
    const auto c = parse_config(
        "# comment\n"
        "n_alpha = 10   # trailing\n"
        "periodic = true\n"
        "dt = 1e-4\n"
        "interaction = hard\n"
        "scheduler = gillespie\n"
        "kernel = cic\n"
        "field_boundary = auto\n",
        preset("fig1"));
    CHECK(c.n_alpha == 10);
    CHECK(c.periodic);
    CHECK(*c.dt == 1e-4);
    CHECK(c.interaction == Interaction::HardSphere);
    CHECK(c.scheduler == Scheduler::GillespieAlpha);
    CHECK(c.kernel == KernelKind::CloudInCell);
    CHECK(!c.field_boundary);
}

TEST_CASE("parse errors") {
    CHECK_THROWS_AS(parse_config("bogus = 1\n", preset("fig1")), ConfigError);
    CHECK_THROWS_AS(parse_config("n_alpha 3\n", preset("fig1")), ConfigError);
    CHECK_THROWS_AS(parse_config("n_alpha = many\n", preset("fig1")), ConfigError);
    CHECK_THROWS_AS(parse_config("interaction = sticky\n", preset("fig1")), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.txt", preset("fig1")), std::ios_base::failure);
}

TEST_CASE("config entries round-trip through the parser") {
    auto c = resolve(preset("msd3"));
    std::ostringstream text;
    for (const auto& [k, v] : config_entries(c)) text << k << " = " << v << '\n';
    const auto back = parse_config(text.str(), preset("fig1"));
    CHECK(config_entries(back) == config_entries(c));
}

TEST_CASE("format_double keeps 17 significant digits") {
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::stod(format_double(5.29e-6)) == 5.29e-6);
}

TEST_CASE("written outputs read back exactly") {
    SimConfig c = preset("fig1");
    c.T_f = 30 * 5.29e-6;
    c.samples = 2;
    c.output_every = 7;
    c.n_c = 10;
    c.hist_bins = 5;
    const auto cfg = resolve(c);
    const auto obs = run_ensemble(cfg);

    const auto dir = std::filesystem::temp_directory_path() / "chemo_io_test";
    std::filesystem::remove_all(dir);
    RunManifest manifest;
    manifest.config = config_entries(cfg);
    manifest.sample_ids = obs.sample_ids;
    manifest.seeds = obs.seeds;
    write_outputs(obs, manifest, cfg, dir);

    const auto counts = read_series_csv(dir / "counts.csv");
    CHECK(counts.columns == std::vector<std::string>{"t", "n_alpha_mean", "n_alpha_se", "n_beta_mean", "n_beta_se"});
    REQUIRE(counts.rows.size() == obs.t.size());
    for (std::size_t k = 0; k < obs.t.size(); ++k) {
        CHECK(counts.rows[k][0] == obs.t[k]);
        CHECK(counts.rows[k][1] == obs.n_alpha_mean[k]);
        CHECK(counts.rows[k][2] == obs.n_alpha_se[k]);
    }
    const auto msd = read_series_csv(dir / "msd.csv");
    CHECK(msd.columns == std::vector<std::string>{"t", "msd_mean", "msd_se"});
    CHECK(msd.rows.back()[1] == obs.msd_mean.back());

    REQUIRE(obs.snapshots.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto ha = read_grid_csv(dir / ("hist_alpha_t" + std::to_string(k) + ".csv"));
        CHECK(ha.bins == 5);
        CHECK(ha.min == -0.5);
        CHECK(ha.max == 0.5);
        CHECK(ha.t == obs.snapshots[k].t);
        CHECK(ha.values == obs.snapshots[k].hist_alpha);
        CHECK(ha.values.sum() == doctest::Approx(1.0));
        const auto f = read_grid_csv(dir / ("field_t" + std::to_string(k) + ".csv"));
        CHECK(f.bins == 10);
        CHECK(f.values == obs.snapshots[k].field);
    }

    std::ifstream in(dir / "manifest.json");
    std::stringstream text;
    text << in.rdbuf();
    CHECK(text.str().find("\"seed\": 200") != std::string::npos);
    CHECK(text.str().find("\"version\": \"1.0.0\"") != std::string::npos);
    CHECK(manifest.files.size() == 2 + 12);
    std::filesystem::remove_all(dir);
}

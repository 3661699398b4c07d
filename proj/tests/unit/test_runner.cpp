#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsis/config.hpp"
#include "wsis/errors.hpp"
#include "wsis/farm.hpp"
#include "wsis/runner.hpp"
#include "wsis/textio.hpp"
#include "wsis/winddata.hpp"

using namespace wsis;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("wsis-runner-" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Two-window toy study: ten minutes of scripted wind, one seed, tiny nets.
config::RunConfig micro_config(const fs::path& out) {
    auto cfg = config::default_config();
    config::apply_json(cfg, R"({
        "method": "pama-ddpg",
        "seeds": [1],
        "episodes": 2,
        "env": {"episode_minutes": 10},
        "agents": {"hidden_sizes": [8, 8], "batch_size": 4, "warmup": 4,
                   "buffer_capacity": 1000},
        "wind": {"scenarios": [{"name": "probe", "generator": "fixed-sequence",
                                "duration_minutes": 10,
                                "sequence": [8.74, 7.32, 4.5, 10.39, 6.66,
                                             9.1, 7.7, 8.2, 6.4, 10.0]}]}
    })");
    cfg.output_dir = out.string();
    cfg.validate();
    return cfg;
}

bool same_series(const winddata::WindSeries& a, const winddata::WindSeries& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        if (a.samples[i].minute != b.samples[i].minute) return false;
        if (a.samples[i].speed_mps != b.samples[i].speed_mps) return false;
        if (a.samples[i].direction_rad != b.samples[i].direction_rad) return false;
    }
    return true;
}

std::size_t line_count(const fs::path& p) {
    const std::string text = textio::read_file(p);
    return textio::lines(text).size();
}

} // namespace

TEST_CASE("run directories nest method, scenario and seed") {
    CHECK(runner::run_dir("out", "mpc", "low", 3) == fs::path("out") / "mpc" / "low" / "3");
}

TEST_CASE("normalisation bounds derive from the configured hardware") {
    const auto cfg = config::default_config();
    const auto bounds = runner::bounds_for(cfg);
    CHECK(bounds.power_lo == -cfg.battery.p_discharge_max_mw);

    const auto layout = cfg.farm.build();
    double rated = 0.0;
    for (const auto& t : layout.turbines)
        rated += farm::turbine_power_mw(t, t.cut_out_mps, 1.0 / 3.0, layout.air_density,
                                        layout.power_scale);
    CHECK(bounds.power_hi == doctest::Approx(rated).epsilon(1e-12));
}

TEST_CASE("training wind is redrawn per episode unless pinned to the eval series") {
    auto cfg = config::default_config();
    const auto& scen = cfg.wind.scenarios[1]; // moderate, synthetic

    const auto ep0 = runner::training_series(cfg, scen, 0);
    const auto ep3 = runner::training_series(cfg, scen, 3);
    CHECK(same_series(ep0, winddata::synthesize(scen, 1)));
    CHECK(same_series(ep3, winddata::synthesize(scen, 4)));
    CHECK(!same_series(ep0, ep3));
    CHECK(!same_series(ep0, winddata::realize(scen)));

    cfg.wind.train_on_eval_series = true;
    CHECK(same_series(runner::training_series(cfg, scen, 0), winddata::realize(scen)));
    CHECK(same_series(runner::training_series(cfg, scen, 7), winddata::realize(scen)));
}

TEST_CASE("scripted scenarios always train on the same series") {
    TempDir tmp("fixed-series");
    const auto cfg = micro_config(tmp.path);
    const auto& scen = cfg.wind.scenarios[0];
    const auto eval = winddata::realize(scen);
    CHECK(same_series(runner::training_series(cfg, scen, 0), eval));
    CHECK(same_series(runner::training_series(cfg, scen, 1), eval));
    CHECK(eval.samples.size() == 10);
    CHECK(eval.samples[0].speed_mps == 8.74);
}

TEST_CASE("a short training command leaves a complete run directory") {
    TempDir tmp("train");
    const auto cfg = micro_config(tmp.path);
    CHECK(runner::cmd_train(cfg) == 0);

    // The echoed config reloads to an identical study description.
    const auto echoed = config::load_config(tmp.path / "config.json");
    CHECK(echoed == cfg);

    const fs::path dir = runner::run_dir(tmp.path, "pama-ddpg", "probe", 1);
    CHECK(line_count(dir / "log.csv") == 3); // header + one row per episode
    const std::string log = textio::read_file(dir / "log.csv");
    CHECK(log.rfind("episode,total_profit,fs,vo,critic_loss_mean,actor_obj_mean,pinn_loss_mean",
                    0) == 0);

    const fs::path ck = dir / "checkpoints";
    for (const char* stem : {"actor", "critic", "target_actor", "target_critic"}) {
        CHECK(fs::exists(ck / ("upper_" + std::string(stem) + ".txt")));
        CHECK(fs::exists(ck / ("lower_" + std::string(stem) + ".txt")));
    }
    const auto manifest = nlohmann::json::parse(textio::read_file(ck / "manifest.json"));
    CHECK(manifest["method"] == "pama-ddpg");
    CHECK(manifest["seed"] == 1);
    CHECK(manifest["episodes"] == 2);
    CHECK(manifest["config_hash"] == config::config_hash(cfg));
    CHECK(!fs::exists(dir / "INCOMPLETE"));
}

TEST_CASE("evaluation reloads checkpoints and writes summaries") {
    TempDir tmp("eval");
    const auto cfg = micro_config(tmp.path);
    REQUIRE(runner::cmd_train(cfg) == 0);
    CHECK(runner::cmd_evaluate(cfg) == 0);

    const fs::path dir = runner::run_dir(tmp.path, "pama-ddpg", "probe", 1);
    CHECK(line_count(dir / "trajectory.csv") == 11); // header + ten minutes

    const auto summary = nlohmann::json::parse(textio::read_file(dir / "summary.json"));
    CHECK(summary["method"] == "pama-ddpg");
    CHECK(summary["scenario"] == "probe");
    CHECK(summary["seed"] == 1);
    CHECK(summary["minutes"] == 10);
    CHECK(summary["total_profit"].is_number());
    CHECK(summary["total_profit"] ==
          doctest::Approx(summary["revenue"].get<double>() -
                          summary["degradation_total"].get<double>())
              .epsilon(1e-12));

    const auto method =
        nlohmann::json::parse(textio::read_file(tmp.path / "pama-ddpg" / "summary.json"));
    CHECK(method["method"] == "pama-ddpg");
    REQUIRE(method["scenarios"].size() == 1);
    CHECK(method["scenarios"][0]["scenario"] == "probe");
    CHECK(method["average"]["total_profit"] ==
          doctest::Approx(summary["total_profit"].get<double>()).epsilon(1e-12));

    // Re-evaluating the same checkpoints reproduces the trajectory bytes.
    const std::string first = textio::read_file(dir / "trajectory.csv");
    REQUIRE(runner::cmd_evaluate(cfg) == 0);
    CHECK(textio::read_file(dir / "trajectory.csv") == first);
}

TEST_CASE("training twice with one seed is bit-identical") {
    TempDir a("det-a");
    TempDir b("det-b");
    auto cfg_a = micro_config(a.path);
    auto cfg_b = micro_config(b.path);
    REQUIRE(runner::cmd_train(cfg_a) == 0);
    REQUIRE(runner::cmd_train(cfg_b) == 0);

    const fs::path da = runner::run_dir(a.path, "pama-ddpg", "probe", 1);
    const fs::path db = runner::run_dir(b.path, "pama-ddpg", "probe", 1);
    CHECK(textio::read_file(da / "log.csv") == textio::read_file(db / "log.csv"));
    for (const char* name : {"upper_actor.txt", "lower_actor.txt", "upper_critic.txt",
                             "lower_critic.txt"})
        CHECK(textio::read_file(da / "checkpoints" / name) ==
              textio::read_file(db / "checkpoints" / name));
}

TEST_CASE("evaluating before training points at the missing checkpoint") {
    TempDir tmp("missing");
    const auto cfg = micro_config(tmp.path);
    try {
        (void)runner::load_policies(cfg, tmp.path / "nowhere");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("run the train command first") != std::string::npos);
    }

    auto mpc_cfg = cfg;
    mpc_cfg.method = "mpc";
    const auto bundle = runner::load_policies(mpc_cfg, tmp.path / "nowhere");
    CHECK(bundle.method == "mpc");
    CHECK(!bundle.upper);
    CHECK(!bundle.joint);
}

TEST_CASE("the scheduling baseline evaluates without any training") {
    TempDir tmp("mpc-eval");
    auto cfg = micro_config(tmp.path);
    cfg.method = "mpc";

    const auto entries = runner::execute_runs(cfg);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].method == "mpc");
    CHECK(entries[0].scenario == "probe");
    CHECK(entries[0].summary.minutes == 10);

    const fs::path dir = runner::run_dir(tmp.path, "mpc", "probe", 1);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(!fs::exists(dir / "log.csv")); // nothing to train

    // Training the baseline is a configuration error, not a silent no-op.
    CHECK_THROWS_AS(runner::cmd_train(cfg), ConfigError);
}

TEST_CASE("comparisons insist on distinct methods and the baseline") {
    TempDir tmp("cmp-validate");
    auto base = micro_config(tmp.path);

    base.compare_methods = {"pama-ddpg"};
    CHECK_THROWS_AS(runner::cmd_compare({base}), ConfigError);

    base.compare_methods = {"mpc", "mpc"};
    CHECK_THROWS_AS(runner::cmd_compare({base}), ConfigError);

    base.compare_methods = {"ddpg", "pama-ddpg"};
    CHECK_THROWS_AS(runner::cmd_compare({base}), ConfigError); // baseline absent

    auto other = base;
    other.method = "mpc";
    other.seeds = {99};
    base.method = "pama-ddpg";
    CHECK_THROWS_AS(runner::cmd_compare({base, other}), ConfigError); // seeds differ

    CHECK_THROWS_AS(runner::cmd_compare({}), ConfigError);
}

TEST_CASE("a two-method comparison produces the relative report") {
    TempDir tmp("cmp");
    auto cfg = micro_config(tmp.path);
    cfg.compare_methods = {"mpc", "pama-ddpg"};
    CHECK(runner::cmd_compare({cfg}) == 0);

    CHECK(fs::exists(tmp.path / "mpc" / "summary.json"));
    CHECK(fs::exists(tmp.path / "pama-ddpg" / "summary.json"));
    CHECK(fs::exists(tmp.path / "pama-ddpg" / "probe" / "1" / "log.csv"));

    const std::string report = textio::read_file(tmp.path / "report.csv");
    const auto rows = textio::lines(report);
    REQUIRE(rows.size() == 3); // header + one row per method (single scenario)
    CHECK(rows[0] == "method,scenario,total_profit,fs,vo,rel_profit,rel_fs,rel_vo");
    CHECK(rows[1].substr(0, 10) == "mpc,probe,");
    CHECK(rows[2].substr(0, 16) == "pama-ddpg,probe,");
}

TEST_CASE("sweeps fan out over the listed values") {
    TempDir tmp("sweep");
    auto cfg = micro_config(tmp.path);
    cfg.method = "mpc"; // no training keeps the fan-out cheap
    cfg.sweep.parameter = "env.beta1";
    cfg.sweep.values = {0.0, 5.0};
    CHECK(runner::cmd_sweep(cfg) == 0);

    const std::string csv = textio::read_file(tmp.path / "sweep.csv");
    const auto rows = textio::lines(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "parameter,value,total_profit,fs,vo");
    CHECK(rows[1].substr(0, 12) == "env.beta1,0,");
    CHECK(rows[2].substr(0, 12) == "env.beta1,5,");

    for (const char* leg : {"env.beta1=0", "env.beta1=5"}) {
        CHECK(fs::exists(tmp.path / leg / "config.json"));
        CHECK(fs::exists(tmp.path / leg / "mpc" / "probe" / "1" / "summary.json"));
    }

    auto bad = micro_config(tmp.path);
    bad.sweep.parameter.clear();
    bad.sweep.values = {1.0};
    CHECK_THROWS_AS(runner::cmd_sweep(bad), ConfigError);
    bad.sweep.parameter = "env.beta1";
    bad.sweep.values.clear();
    CHECK_THROWS_AS(runner::cmd_sweep(bad), ConfigError);
}

TEST_CASE("wind synthesis writes one loadable file per scenario") {
    TempDir tmp("synth");
    auto cfg = micro_config(tmp.path);
    config::apply_json(cfg, R"({
        "wind": {"scenarios": [
            {"name": "probe", "generator": "fixed-sequence", "duration_minutes": 10,
             "sequence": [8.74, 7.32, 4.5, 10.39, 6.66, 9.1, 7.7, 8.2, 6.4, 10.0]},
            {"name": "gusty", "generator": "synthetic-moderate", "duration_minutes": 10,
             "seed": 7}
        ]}
    })");
    CHECK(runner::cmd_synth_wind(cfg) == 0);

    const auto probe = winddata::load_csv(tmp.path / "wind" / "probe.csv");
    REQUIRE(probe.samples.size() == 10);
    CHECK(probe.samples[0].speed_mps == 8.74);
    CHECK(probe.samples[3].speed_mps == 10.39);

    const auto gusty = winddata::load_csv(tmp.path / "wind" / "gusty.csv");
    CHECK(same_series(gusty, winddata::realize(cfg.wind.scenarios[1])));
}

TEST_CASE("hierarchical and joint bundles carry the right networks") {
    TempDir tmp("bundles");
    auto cfg = micro_config(tmp.path);

    const auto hier = runner::make_policies(cfg, 5);
    CHECK(hier.method == "pama-ddpg");
    REQUIRE(hier.upper);
    REQUIRE(hier.lower);
    CHECK(!hier.joint);
    CHECK(hier.upper->actor.layer_sizes.front() == 3);
    CHECK(hier.upper->actor.layer_sizes.back() ==
          static_cast<int>(cfg.farm.turbine_count));
    CHECK(hier.lower->actor.layer_sizes.front() == 6);
    CHECK(hier.lower->actor.layer_sizes.back() == 1);

    cfg.method = "ddpg";
    const auto joint = runner::make_policies(cfg, 5);
    REQUIRE(joint.joint);
    CHECK(!joint.upper);
    CHECK(joint.joint->actor.layer_sizes.front() == 6);
    CHECK(joint.joint->actor.layer_sizes.back() == cfg.farm.turbine_count + 1);

    cfg.method = "mpc";
    const auto none = runner::make_policies(cfg, 5);
    CHECK(!none.upper);
    CHECK(!none.lower);
    CHECK(!none.joint);
}

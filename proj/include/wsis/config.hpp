#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wsis/agents.hpp"
#include "wsis/bess.hpp"
#include "wsis/farm.hpp"
#include "wsis/mdp.hpp"
#include "wsis/mpc.hpp"
#include "wsis/winddata.hpp"

namespace wsis::config {

// Row of identical turbines facing the nominal wind direction.
struct FarmConfig {
    int turbine_count = 3;
    double spacing_diameters = 5.0;
    double rotor_diameter_m = 100.0;
    double yaw_deg = 0.0;
    double cut_in_mps = 3.0;
    double cut_out_mps = 25.0;
    double wake_expansion = 0.08;
    double air_density = 1.2;
    double power_scale = 0.95;

    farm::FarmLayout build() const;
};

struct AgentsConfig {
    std::vector<int> hidden_sizes = {64, 64};
    double actor_lr = 1e-4;
    double critic_lr = 1e-2;
    double tau = 0.001;
    int batch_size = 32;
    std::uint64_t buffer_capacity = 200000;
    std::uint64_t warmup = 1000; // buffer fill before updates; >= batch_size
    double noise_initial_frac = 0.2;
    double noise_decay = 0.9995;
    double noise_floor_frac = 0.01;
    double omega_u = 1.0; // policy-objective weight in the combined actor step
    double omega_f = 0.1; // physics-residual weight
    bool lower_critic_sees_upper_action = false;
};

struct WindConfig {
    // When set, training episodes reuse the evaluation series instead of
    // drawing a fresh series per episode from the scenario's generator.
    bool train_on_eval_series = false;
    std::vector<winddata::ScenarioSpec> scenarios;
};

struct SweepConfig {
    std::string parameter;      // dotted config path, e.g. "env.beta1"
    std::vector<double> values; // one full train+evaluate per value
};

struct RunConfig {
    std::string method = "pama-ddpg"; // mpc | ddpg | ma-ddpg | pama-ddpg
    std::vector<std::uint64_t> seeds = {1};
    int episodes = 1000;
    std::string output_dir = "runs";
    FarmConfig farm;
    bess::BatteryParams battery;
    mdp::EnvConfig env;
    AgentsConfig agents;
    WindConfig wind;
    mpc::MpcConfig mpc;
    std::vector<std::string> compare_methods = {"mpc", "ddpg", "ma-ddpg", "pama-ddpg"};
    SweepConfig sweep;

    void validate() const;
    agents::AgentHyper hyper() const; // discount mirrored from env.gamma
};

bool is_known_method(const std::string& method);

// Fully-populated defaults: full-day episodes on four synthetic scenarios.
RunConfig default_config();

// "desk" shrinks nets/episodes/scenario length for quick runs; "paper"
// restates the defaults. Unknown preset names raise ConfigError.
void apply_preset(RunConfig& cfg, const std::string& preset);

// Strict JSON overlay: every key must name a known field (errors carry the
// dotted path); absent keys keep their current values.
void apply_json(RunConfig& cfg, const std::string& json_text);

// Defaults overlaid with the file's contents.
RunConfig load_config(const std::filesystem::path& path);

// Canonical serialization of every resolved field; load_config on the dump
// reproduces the config exactly.
std::string to_json(const RunConfig& cfg);

std::uint64_t config_hash(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);
inline bool operator!=(const RunConfig& a, const RunConfig& b) { return !(a == b); }

// Copy of `base` with one dotted-path override (used by sweeps). Unknown
// paths raise ConfigError naming the key.
RunConfig with_value(const RunConfig& base, const std::string& dotted_path, double value);

} // namespace wsis::config

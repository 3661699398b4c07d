#include "wsis/config.hpp"

#include <cmath>
#include <initializer_list>
#include <set>
#include <string_view>

#include <json.hpp>

#include "wsis/errors.hpp"
#include "wsis/rng.hpp"
#include "wsis/textio.hpp"

namespace wsis::config {

namespace {

using nlohmann::json;

constexpr double kDegPerRad = 180.0 / 3.14159265358979323846;

[[noreturn]] void type_error(const std::string& path, const char* want) {
    throw ConfigError("config key " + path + " must be " + want);
}

double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) type_error(path, "a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    const double d = as_double(v, path);
    if (d != std::floor(d) || std::abs(d) > 2147483647.0) type_error(path, "an integer");
    return static_cast<int>(d);
}

std::uint64_t as_u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
        const auto i = v.get<std::int64_t>();
        if (i < 0) type_error(path, "a non-negative integer");
        return static_cast<std::uint64_t>(i);
    }
    const double d = as_double(v, path);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19) type_error(path, "a non-negative integer");
    return static_cast<std::uint64_t>(d);
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) type_error(path, "a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) type_error(path, "a string");
    return v.get<std::string>();
}

const json& as_object(const json& v, const std::string& path) {
    if (!v.is_object()) type_error(path, "an object");
    return v;
}

const json& as_array(const json& v, const std::string& path) {
    if (!v.is_array()) type_error(path, "an array");
    return v;
}

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (std::string_view k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) throw ConfigError("unknown config key: " + prefix + it.key());
    }
}

void parse_farm(const json& j, FarmConfig& f) {
    check_keys(j, "farm.",
               {"turbine_count", "spacing_diameters", "rotor_diameter_m", "yaw_deg",
                "cut_in_mps", "cut_out_mps", "wake_expansion", "air_density", "power_scale"});
    if (j.contains("turbine_count")) f.turbine_count = as_int(j["turbine_count"], "farm.turbine_count");
    if (j.contains("spacing_diameters"))
        f.spacing_diameters = as_double(j["spacing_diameters"], "farm.spacing_diameters");
    if (j.contains("rotor_diameter_m"))
        f.rotor_diameter_m = as_double(j["rotor_diameter_m"], "farm.rotor_diameter_m");
    if (j.contains("yaw_deg")) f.yaw_deg = as_double(j["yaw_deg"], "farm.yaw_deg");
    if (j.contains("cut_in_mps")) f.cut_in_mps = as_double(j["cut_in_mps"], "farm.cut_in_mps");
    if (j.contains("cut_out_mps")) f.cut_out_mps = as_double(j["cut_out_mps"], "farm.cut_out_mps");
    if (j.contains("wake_expansion"))
        f.wake_expansion = as_double(j["wake_expansion"], "farm.wake_expansion");
    if (j.contains("air_density")) f.air_density = as_double(j["air_density"], "farm.air_density");
    if (j.contains("power_scale")) f.power_scale = as_double(j["power_scale"], "farm.power_scale");
}

void parse_battery(const json& j, bess::BatteryParams& b) {
    check_keys(j, "battery.",
               {"capacity_mwh", "e_min_mwh", "e_max_mwh", "p_charge_max_mw", "p_discharge_max_mw",
                "eta", "eta_charge", "eta_discharge", "replacement_cost_usd",
                "lifetime_throughput_kwh", "roundtrip_sqrt", "k_deg_usd_per_kwh"});
    if (j.contains("capacity_mwh")) b.capacity_mwh = as_double(j["capacity_mwh"], "battery.capacity_mwh");
    if (j.contains("e_min_mwh")) b.e_min_mwh = as_double(j["e_min_mwh"], "battery.e_min_mwh");
    if (j.contains("e_max_mwh")) b.e_max_mwh = as_double(j["e_max_mwh"], "battery.e_max_mwh");
    if (j.contains("p_charge_max_mw"))
        b.p_charge_max_mw = as_double(j["p_charge_max_mw"], "battery.p_charge_max_mw");
    if (j.contains("p_discharge_max_mw"))
        b.p_discharge_max_mw = as_double(j["p_discharge_max_mw"], "battery.p_discharge_max_mw");
    if (j.contains("eta")) { // convenience alias for both conversion efficiencies
        const double eta = as_double(j["eta"], "battery.eta");
        b.eta_charge = eta;
        b.eta_discharge = eta;
    }
    if (j.contains("eta_charge")) b.eta_charge = as_double(j["eta_charge"], "battery.eta_charge");
    if (j.contains("eta_discharge"))
        b.eta_discharge = as_double(j["eta_discharge"], "battery.eta_discharge");
    if (j.contains("replacement_cost_usd"))
        b.replacement_cost_usd = as_double(j["replacement_cost_usd"], "battery.replacement_cost_usd");
    if (j.contains("lifetime_throughput_kwh"))
        b.lifetime_throughput_kwh =
            as_double(j["lifetime_throughput_kwh"], "battery.lifetime_throughput_kwh");
    if (j.contains("roundtrip_sqrt"))
        b.roundtrip_sqrt = as_double(j["roundtrip_sqrt"], "battery.roundtrip_sqrt");
    if (j.contains("k_deg_usd_per_kwh")) {
        if (j["k_deg_usd_per_kwh"].is_null())
            b.k_deg_usd_per_kwh.reset();
        else
            b.k_deg_usd_per_kwh = as_double(j["k_deg_usd_per_kwh"], "battery.k_deg_usd_per_kwh");
    }
}

void parse_env(const json& j, mdp::EnvConfig& e) {
    check_keys(j, "env.",
               {"control_period", "price", "fluct_threshold_mw", "kappa", "beta1", "beta2", "nu",
                "gamma", "episode_minutes", "include_soc_in_lower_state", "wake_enabled",
                "degradation_in_reward"});
    if (j.contains("control_period")) e.control_period = as_int(j["control_period"], "env.control_period");
    if (j.contains("price")) e.price = as_double(j["price"], "env.price");
    if (j.contains("fluct_threshold_mw"))
        e.fluct_threshold_mw = as_double(j["fluct_threshold_mw"], "env.fluct_threshold_mw");
    if (j.contains("kappa")) e.kappa = as_double(j["kappa"], "env.kappa");
    if (j.contains("beta1")) e.beta1 = as_double(j["beta1"], "env.beta1");
    if (j.contains("beta2")) e.beta2 = as_double(j["beta2"], "env.beta2");
    if (j.contains("nu")) e.nu = as_double(j["nu"], "env.nu");
    if (j.contains("gamma")) e.gamma = as_double(j["gamma"], "env.gamma");
    if (j.contains("episode_minutes"))
        e.episode_minutes = as_int(j["episode_minutes"], "env.episode_minutes");
    if (j.contains("include_soc_in_lower_state"))
        e.include_soc_in_lower_state =
            as_bool(j["include_soc_in_lower_state"], "env.include_soc_in_lower_state");
    if (j.contains("wake_enabled")) e.wake_enabled = as_bool(j["wake_enabled"], "env.wake_enabled");
    if (j.contains("degradation_in_reward"))
        e.degradation_in_reward = as_bool(j["degradation_in_reward"], "env.degradation_in_reward");
}

void parse_agents(const json& j, AgentsConfig& a) {
    check_keys(j, "agents.",
               {"hidden_sizes", "actor_lr", "critic_lr", "tau", "batch_size", "buffer_capacity",
                "warmup", "noise_initial_frac", "noise_decay", "noise_floor_frac", "omega_u",
                "omega_f", "lower_critic_sees_upper_action"});
    if (j.contains("hidden_sizes")) {
        const auto& arr = as_array(j["hidden_sizes"], "agents.hidden_sizes");
        a.hidden_sizes.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            a.hidden_sizes.push_back(
                as_int(arr[i], "agents.hidden_sizes[" + std::to_string(i) + "]"));
    }
    if (j.contains("actor_lr")) a.actor_lr = as_double(j["actor_lr"], "agents.actor_lr");
    if (j.contains("critic_lr")) a.critic_lr = as_double(j["critic_lr"], "agents.critic_lr");
    if (j.contains("tau")) a.tau = as_double(j["tau"], "agents.tau");
    if (j.contains("batch_size")) a.batch_size = as_int(j["batch_size"], "agents.batch_size");
    if (j.contains("buffer_capacity"))
        a.buffer_capacity = as_u64(j["buffer_capacity"], "agents.buffer_capacity");
    if (j.contains("warmup")) a.warmup = as_u64(j["warmup"], "agents.warmup");
    if (j.contains("noise_initial_frac"))
        a.noise_initial_frac = as_double(j["noise_initial_frac"], "agents.noise_initial_frac");
    if (j.contains("noise_decay")) a.noise_decay = as_double(j["noise_decay"], "agents.noise_decay");
    if (j.contains("noise_floor_frac"))
        a.noise_floor_frac = as_double(j["noise_floor_frac"], "agents.noise_floor_frac");
    if (j.contains("omega_u")) a.omega_u = as_double(j["omega_u"], "agents.omega_u");
    if (j.contains("omega_f")) a.omega_f = as_double(j["omega_f"], "agents.omega_f");
    if (j.contains("lower_critic_sees_upper_action"))
        a.lower_critic_sees_upper_action =
            as_bool(j["lower_critic_sees_upper_action"], "agents.lower_critic_sees_upper_action");
}

winddata::ScenarioSpec parse_scenario(const json& v, const std::string& path) {
    const json& j = as_object(v, path);
    check_keys(j, path + ".",
               {"name", "generator", "duration_minutes", "seed", "mean_mps", "volatility_mps",
                "sequence", "csv_path"});
    winddata::ScenarioSpec s;
    if (j.contains("name")) s.name = as_string(j["name"], path + ".name");
    if (j.contains("generator")) s.generator = as_string(j["generator"], path + ".generator");
    if (j.contains("duration_minutes"))
        s.duration_minutes = as_int(j["duration_minutes"], path + ".duration_minutes");
    if (j.contains("seed")) s.seed = as_u64(j["seed"], path + ".seed");
    if (j.contains("mean_mps")) s.mean_mps = as_double(j["mean_mps"], path + ".mean_mps");
    if (j.contains("volatility_mps"))
        s.volatility_mps = as_double(j["volatility_mps"], path + ".volatility_mps");
    if (j.contains("sequence")) {
        const auto& arr = as_array(j["sequence"], path + ".sequence");
        for (std::size_t i = 0; i < arr.size(); ++i)
            s.sequence.push_back(as_double(arr[i], path + ".sequence[" + std::to_string(i) + "]"));
    }
    if (j.contains("csv_path")) s.csv_path = as_string(j["csv_path"], path + ".csv_path");
    return s;
}

void parse_wind(const json& j, WindConfig& w) {
    check_keys(j, "wind.", {"train_on_eval_series", "scenarios"});
    if (j.contains("train_on_eval_series"))
        w.train_on_eval_series = as_bool(j["train_on_eval_series"], "wind.train_on_eval_series");
    if (j.contains("scenarios")) {
        const auto& arr = as_array(j["scenarios"], "wind.scenarios");
        w.scenarios.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            w.scenarios.push_back(
                parse_scenario(arr[i], "wind.scenarios[" + std::to_string(i) + "]"));
    }
}

void parse_mpc(const json& j, mpc::MpcConfig& m) {
    check_keys(j, "mpc.",
               {"horizon_minutes", "induction_grid_resolution", "battery_search_resolution"});
    if (j.contains("horizon_minutes"))
        m.horizon_minutes = as_int(j["horizon_minutes"], "mpc.horizon_minutes");
    if (j.contains("induction_grid_resolution"))
        m.induction_grid_resolution =
            as_double(j["induction_grid_resolution"], "mpc.induction_grid_resolution");
    if (j.contains("battery_search_resolution"))
        m.battery_search_resolution =
            as_double(j["battery_search_resolution"], "mpc.battery_search_resolution");
}

void parse_sweep(const json& j, SweepConfig& s) {
    check_keys(j, "sweep.", {"parameter", "values"});
    if (j.contains("parameter")) s.parameter = as_string(j["parameter"], "sweep.parameter");
    if (j.contains("values")) {
        const auto& arr = as_array(j["values"], "sweep.values");
        s.values.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            s.values.push_back(as_double(arr[i], "sweep.values[" + std::to_string(i) + "]"));
    }
}

json scenario_to_json(const winddata::ScenarioSpec& s) {
    json j;
    j["name"] = s.name;
    j["generator"] = s.generator;
    j["duration_minutes"] = s.duration_minutes;
    j["seed"] = s.seed;
    if (s.mean_mps) j["mean_mps"] = *s.mean_mps;
    if (s.volatility_mps) j["volatility_mps"] = *s.volatility_mps;
    if (!s.sequence.empty()) j["sequence"] = s.sequence;
    if (!s.csv_path.empty()) j["csv_path"] = s.csv_path;
    return j;
}

std::vector<winddata::ScenarioSpec> default_scenarios(int duration_minutes) {
    winddata::ScenarioSpec low;
    low.name = "low";
    low.generator = "synthetic-low";
    low.duration_minutes = duration_minutes;
    low.seed = 11;

    winddata::ScenarioSpec moderate;
    moderate.name = "moderate";
    moderate.generator = "synthetic-moderate";
    moderate.duration_minutes = duration_minutes;
    moderate.seed = 12;

    winddata::ScenarioSpec variable;
    variable.name = "variable";
    variable.generator = "synthetic-moderate";
    variable.duration_minutes = duration_minutes;
    variable.seed = 13;
    variable.mean_mps = 10.5;
    variable.volatility_mps = 2.5;

    winddata::ScenarioSpec high;
    high.name = "high";
    high.generator = "synthetic-high";
    high.duration_minutes = duration_minutes;
    high.seed = 14;

    return {low, moderate, variable, high};
}

} // namespace

farm::FarmLayout FarmConfig::build() const {
    if (turbine_count < 1) throw ConfigError("farm.turbine_count must be at least 1");
    if (!(spacing_diameters > 0.0)) throw ConfigError("farm.spacing_diameters must be positive");
    farm::TurbineSpec prototype;
    prototype.rotor_diameter_m = rotor_diameter_m;
    prototype.yaw_rad = yaw_deg / kDegPerRad;
    prototype.cut_in_mps = cut_in_mps;
    prototype.cut_out_mps = cut_out_mps;
    return farm::FarmLayout::linear_row(turbine_count, spacing_diameters, prototype,
                                        wake_expansion, air_density, power_scale);
}

bool is_known_method(const std::string& method) {
    return method == "mpc" || method == "ddpg" || method == "ma-ddpg" || method == "pama-ddpg";
}

void RunConfig::validate() const {
    if (!is_known_method(method))
        throw ConfigError("method must be one of mpc, ddpg, ma-ddpg, pama-ddpg (got \"" + method +
                          "\")");
    if (seeds.empty()) throw ConfigError("seeds must list at least one seed");
    if (episodes < 1) throw ConfigError("episodes must be at least 1");
    if (output_dir.empty()) throw ConfigError("output_dir must be non-empty");

    farm.build().validate();
    battery.validate();
    env.validate();

    if (agents.hidden_sizes.empty()) throw ConfigError("agents.hidden_sizes must be non-empty");
    for (int h : agents.hidden_sizes)
        if (h < 1) throw ConfigError("agents.hidden_sizes entries must be positive");
    if (!(agents.actor_lr > 0.0)) throw ConfigError("agents.actor_lr must be positive");
    if (!(agents.critic_lr > 0.0)) throw ConfigError("agents.critic_lr must be positive");
    if (!(agents.tau > 0.0 && agents.tau <= 1.0))
        throw ConfigError("agents.tau must lie in (0, 1]");
    if (agents.batch_size < 1) throw ConfigError("agents.batch_size must be at least 1");
    if (agents.warmup < static_cast<std::uint64_t>(agents.batch_size))
        throw ConfigError("agents.warmup must be at least agents.batch_size");
    if (agents.buffer_capacity < agents.warmup)
        throw ConfigError("agents.buffer_capacity must be at least agents.warmup");
    if (!(agents.noise_initial_frac >= 0.0))
        throw ConfigError("agents.noise_initial_frac must be non-negative");
    if (!(agents.noise_decay > 0.0 && agents.noise_decay <= 1.0))
        throw ConfigError("agents.noise_decay must lie in (0, 1]");
    if (!(agents.noise_floor_frac >= 0.0))
        throw ConfigError("agents.noise_floor_frac must be non-negative");
    if (!(agents.omega_u >= 0.0)) throw ConfigError("agents.omega_u must be non-negative");
    if (!(agents.omega_f >= 0.0)) throw ConfigError("agents.omega_f must be non-negative");

    if (wind.scenarios.empty()) throw ConfigError("wind.scenarios must list at least one scenario");
    std::set<std::string> names;
    for (const auto& s : wind.scenarios) {
        s.validate();
        if (s.name.empty()) throw ConfigError("scenario names must be non-empty");
        if (!names.insert(s.name).second)
            throw ConfigError("duplicate scenario name \"" + s.name + "\"");
        // File scenarios are length-checked when loaded; the others have a
        // length known right here.
        const int known_minutes = s.generator == "fixed-sequence"
                                      ? static_cast<int>(s.sequence.size())
                                      : s.generator == "file" ? env.episode_minutes
                                                              : s.duration_minutes;
        if (known_minutes < env.episode_minutes)
            throw ConfigError("scenario \"" + s.name + "\" is shorter than env.episode_minutes");
    }

    mpc.validate();
    for (const auto& m : compare_methods)
        if (!is_known_method(m))
            throw ConfigError("compare_methods contains unknown method \"" + m + "\"");
}

agents::AgentHyper RunConfig::hyper() const {
    agents::AgentHyper h;
    h.hidden_sizes = agents.hidden_sizes;
    h.actor_lr = agents.actor_lr;
    h.critic_lr = agents.critic_lr;
    h.gamma = env.gamma;
    h.tau = agents.tau;
    h.noise_initial_frac = agents.noise_initial_frac;
    h.noise_decay = agents.noise_decay;
    h.noise_floor_frac = agents.noise_floor_frac;
    return h;
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.wind.scenarios = default_scenarios(1440);
    return cfg;
}

void apply_preset(RunConfig& cfg, const std::string& preset) {
    if (preset == "paper") {
        cfg.episodes = 1000;
        cfg.env.episode_minutes = 1440;
        cfg.agents.hidden_sizes = {64, 64};
        cfg.agents.buffer_capacity = 200000;
        cfg.agents.warmup = 1000;
        cfg.wind.scenarios = default_scenarios(1440);
    } else if (preset == "desk") {
        cfg.episodes = 200;
        cfg.env.episode_minutes = 240;
        cfg.agents.hidden_sizes = {32, 32};
        cfg.agents.buffer_capacity = 50000;
        cfg.agents.warmup = 500;
        cfg.wind.scenarios = default_scenarios(240);
    } else {
        throw ConfigError("unknown preset \"" + preset + "\" (expected desk or paper)");
    }
}

void apply_json(RunConfig& cfg, const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    check_keys(j, "",
               {"method", "seeds", "episodes", "output_dir", "farm", "battery", "env", "agents",
                "wind", "mpc", "compare_methods", "sweep"});

    if (j.contains("method")) cfg.method = as_string(j["method"], "method");
    if (j.contains("seeds")) {
        const auto& arr = as_array(j["seeds"], "seeds");
        cfg.seeds.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.seeds.push_back(as_u64(arr[i], "seeds[" + std::to_string(i) + "]"));
    }
    if (j.contains("episodes")) cfg.episodes = as_int(j["episodes"], "episodes");
    if (j.contains("output_dir")) cfg.output_dir = as_string(j["output_dir"], "output_dir");
    if (j.contains("farm")) parse_farm(as_object(j["farm"], "farm"), cfg.farm);
    if (j.contains("battery")) parse_battery(as_object(j["battery"], "battery"), cfg.battery);
    if (j.contains("env")) parse_env(as_object(j["env"], "env"), cfg.env);
    if (j.contains("agents")) parse_agents(as_object(j["agents"], "agents"), cfg.agents);
    if (j.contains("wind")) parse_wind(as_object(j["wind"], "wind"), cfg.wind);
    if (j.contains("mpc")) parse_mpc(as_object(j["mpc"], "mpc"), cfg.mpc);
    if (j.contains("compare_methods")) {
        const auto& arr = as_array(j["compare_methods"], "compare_methods");
        cfg.compare_methods.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.compare_methods.push_back(
                as_string(arr[i], "compare_methods[" + std::to_string(i) + "]"));
    }
    if (j.contains("sweep")) parse_sweep(as_object(j["sweep"], "sweep"), cfg.sweep);
}

RunConfig load_config(const std::filesystem::path& path) {
    RunConfig cfg = default_config();
    apply_json(cfg, textio::read_file(path));
    return cfg;
}

std::string to_json(const RunConfig& cfg) {
    json j;
    j["method"] = cfg.method;
    j["seeds"] = cfg.seeds;
    j["episodes"] = cfg.episodes;
    j["output_dir"] = cfg.output_dir;

    j["farm"] = {{"turbine_count", cfg.farm.turbine_count},
                 {"spacing_diameters", cfg.farm.spacing_diameters},
                 {"rotor_diameter_m", cfg.farm.rotor_diameter_m},
                 {"yaw_deg", cfg.farm.yaw_deg},
                 {"cut_in_mps", cfg.farm.cut_in_mps},
                 {"cut_out_mps", cfg.farm.cut_out_mps},
                 {"wake_expansion", cfg.farm.wake_expansion},
                 {"air_density", cfg.farm.air_density},
                 {"power_scale", cfg.farm.power_scale}};

    j["battery"] = {{"capacity_mwh", cfg.battery.capacity_mwh},
                    {"e_min_mwh", cfg.battery.e_min_mwh},
                    {"e_max_mwh", cfg.battery.e_max_mwh},
                    {"p_charge_max_mw", cfg.battery.p_charge_max_mw},
                    {"p_discharge_max_mw", cfg.battery.p_discharge_max_mw},
                    {"eta_charge", cfg.battery.eta_charge},
                    {"eta_discharge", cfg.battery.eta_discharge},
                    {"replacement_cost_usd", cfg.battery.replacement_cost_usd},
                    {"lifetime_throughput_kwh", cfg.battery.lifetime_throughput_kwh},
                    {"roundtrip_sqrt", cfg.battery.roundtrip_sqrt}};
    if (cfg.battery.k_deg_usd_per_kwh)
        j["battery"]["k_deg_usd_per_kwh"] = *cfg.battery.k_deg_usd_per_kwh;

    j["env"] = {{"control_period", cfg.env.control_period},
                {"price", cfg.env.price},
                {"fluct_threshold_mw", cfg.env.fluct_threshold_mw},
                {"kappa", cfg.env.kappa},
                {"beta1", cfg.env.beta1},
                {"beta2", cfg.env.beta2},
                {"nu", cfg.env.nu},
                {"gamma", cfg.env.gamma},
                {"episode_minutes", cfg.env.episode_minutes},
                {"include_soc_in_lower_state", cfg.env.include_soc_in_lower_state},
                {"wake_enabled", cfg.env.wake_enabled},
                {"degradation_in_reward", cfg.env.degradation_in_reward}};

    j["agents"] = {{"hidden_sizes", cfg.agents.hidden_sizes},
                   {"actor_lr", cfg.agents.actor_lr},
                   {"critic_lr", cfg.agents.critic_lr},
                   {"tau", cfg.agents.tau},
                   {"batch_size", cfg.agents.batch_size},
                   {"buffer_capacity", cfg.agents.buffer_capacity},
                   {"warmup", cfg.agents.warmup},
                   {"noise_initial_frac", cfg.agents.noise_initial_frac},
                   {"noise_decay", cfg.agents.noise_decay},
                   {"noise_floor_frac", cfg.agents.noise_floor_frac},
                   {"omega_u", cfg.agents.omega_u},
                   {"omega_f", cfg.agents.omega_f},
                   {"lower_critic_sees_upper_action", cfg.agents.lower_critic_sees_upper_action}};

    j["wind"]["train_on_eval_series"] = cfg.wind.train_on_eval_series;
    j["wind"]["scenarios"] = json::array();
    for (const auto& s : cfg.wind.scenarios) j["wind"]["scenarios"].push_back(scenario_to_json(s));

    j["mpc"] = {{"horizon_minutes", cfg.mpc.horizon_minutes},
                {"induction_grid_resolution", cfg.mpc.induction_grid_resolution},
                {"battery_search_resolution", cfg.mpc.battery_search_resolution}};

    j["compare_methods"] = cfg.compare_methods;
    if (!cfg.sweep.parameter.empty() || !cfg.sweep.values.empty())
        j["sweep"] = {{"parameter", cfg.sweep.parameter}, {"values", cfg.sweep.values}};

    return j.dump(2) + "\n";
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(to_json(cfg)); }

bool operator==(const RunConfig& a, const RunConfig& b) { return to_json(a) == to_json(b); }

RunConfig with_value(const RunConfig& base, const std::string& dotted_path, double value) {
    if (dotted_path.empty()) throw ConfigError("sweep parameter path is empty");
    json overlay = json::object();
    json* cursor = &overlay;
    std::string rest = dotted_path;
    for (std::size_t dot = rest.find('.'); dot != std::string::npos; dot = rest.find('.')) {
        const std::string head = rest.substr(0, dot);
        if (head.empty()) throw ConfigError("malformed config path \"" + dotted_path + "\"");
        (*cursor)[head] = json::object();
        cursor = &(*cursor)[head];
        rest = rest.substr(dot + 1);
    }
    if (rest.empty()) throw ConfigError("malformed config path \"" + dotted_path + "\"");
    (*cursor)[rest] = value;

    RunConfig result = base;
    apply_json(result, overlay.dump());
    return result;
}

} // namespace wsis::config

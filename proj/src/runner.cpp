#include "wsis/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <utility>

#include <json.hpp>

#include "wsis/errors.hpp"
#include "wsis/mpc.hpp"
#include "wsis/rng.hpp"
#include "wsis/textio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wsis::runner {

namespace {

bool same_scenario(const winddata::ScenarioSpec& a, const winddata::ScenarioSpec& b) {
    return a.name == b.name && a.generator == b.generator &&
           a.duration_minutes == b.duration_minutes && a.seed == b.seed &&
           a.mean_mps == b.mean_mps && a.volatility_mps == b.volatility_mps &&
           a.sequence == b.sequence && a.csv_path == b.csv_path;
}

void write_run_summary(const fs::path& path, const std::string& method,
                       const std::string& scenario, std::uint64_t seed,
                       const metrics::EpisodeSummary& s) {
    json j;
    j["method"] = method;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["minutes"] = s.minutes;
    j["total_profit"] = s.total_profit;
    j["fs"] = s.fs;
    j["vo"] = s.vo;
    j["revenue"] = s.revenue;
    j["degradation_total"] = s.degradation_total;
    textio::write_file(path, j.dump(2) + "\n");
}

// Per-scenario seed means plus the cross-scenario average.
void write_method_summary(const fs::path& path, const config::RunConfig& cfg,
                          const std::vector<metrics::MethodScenarioSummary>& entries) {
    json scen_arr = json::array();
    double ap = 0.0, af = 0.0, av = 0.0, ar = 0.0, ad = 0.0;
    for (const auto& spec : cfg.wind.scenarios) {
        double p = 0.0, f = 0.0, v = 0.0, r = 0.0, d = 0.0;
        int n = 0;
        for (const auto& e : entries)
            if (e.scenario == spec.name) {
                p += e.summary.total_profit;
                f += e.summary.fs;
                v += e.summary.vo;
                r += e.summary.revenue;
                d += e.summary.degradation_total;
                ++n;
            }
        if (n == 0) continue;
        p /= n, f /= n, v /= n, r /= n, d /= n;
        scen_arr.push_back({{"scenario", spec.name},
                            {"total_profit", p},
                            {"fs", f},
                            {"vo", v},
                            {"revenue", r},
                            {"degradation_total", d}});
        ap += p, af += f, av += v, ar += r, ad += d;
    }
    const auto k = static_cast<double>(scen_arr.size());
    json j;
    j["method"] = cfg.method;
    j["scenarios"] = scen_arr;
    if (k > 0)
        j["average"] = {{"total_profit", ap / k},
                        {"fs", af / k},
                        {"vo", av / k},
                        {"revenue", ar / k},
                        {"degradation_total", ad / k}};
    textio::write_file(path, j.dump(2) + "\n");
}

nn::MlpNetwork load_checked(const fs::path& path, const nn::MlpNetwork& expected,
                            const char* role) {
    if (!fs::exists(path))
        throw ConfigError("checkpoint file missing: " + path.string() +
                          "; run the train command first");
    nn::MlpNetwork net = nn::load_network(path);
    if (net.layer_sizes != expected.layer_sizes)
        throw ConfigError(std::string("checkpoint ") + role + " at " + path.string() +
                          " does not match the configured architecture");
    return net;
}

void load_pair(agents::AgentPair& pair, const fs::path& dir, const std::string& prefix) {
    pair.actor = load_checked(dir / (prefix + "actor.txt"), pair.actor, "actor");
    pair.critic = load_checked(dir / (prefix + "critic.txt"), pair.critic, "critic");
    pair.target_actor =
        load_checked(dir / (prefix + "target_actor.txt"), pair.target_actor, "target actor");
    pair.target_critic =
        load_checked(dir / (prefix + "target_critic.txt"), pair.target_critic, "target critic");
}

void save_pair(const agents::AgentPair& pair, const fs::path& dir, const std::string& prefix) {
    nn::save_network(pair.actor, dir / (prefix + "actor.txt"));
    nn::save_network(pair.critic, dir / (prefix + "critic.txt"));
    nn::save_network(pair.target_actor, dir / (prefix + "target_actor.txt"));
    nn::save_network(pair.target_critic, dir / (prefix + "target_critic.txt"));
}

agents::TrainOptions train_options(const config::RunConfig& cfg) {
    agents::TrainOptions opt;
    opt.batch_size = cfg.agents.batch_size;
    opt.warmup = static_cast<std::size_t>(cfg.agents.warmup);
    opt.bounds = bounds_for(cfg);
    opt.lower_critic_sees_upper_action = cfg.agents.lower_critic_sees_upper_action;
    if (cfg.method == "pama-ddpg") {
        opt.pinn.enabled = true;
        opt.pinn.omega_u = cfg.agents.omega_u;
        opt.pinn.omega_f = cfg.agents.omega_f;
    }
    // One window of revenue at the farm's rated output defines the learner's
    // reward unit for window-level agents.
    const double window_revenue = cfg.env.price * cfg.env.dt_hours * opt.bounds.power_hi *
                                  static_cast<double>(cfg.env.control_period);
    opt.upper_reward_scale = 1.0 / std::max(1.0, window_revenue);
    return opt;
}

agents::TrainOptions eval_options(const config::RunConfig& cfg) {
    agents::TrainOptions opt;
    opt.explore = false;
    opt.learn = false;
    opt.bounds = bounds_for(cfg);
    return opt;
}

} // namespace

fs::path run_dir(const fs::path& out, const std::string& method, const std::string& scenario,
                 std::uint64_t seed) {
    return out / method / scenario / std::to_string(seed);
}

mdp::NormBounds bounds_for(const config::RunConfig& cfg) {
    return mdp::NormBounds::defaults(cfg.farm.build(), cfg.battery);
}

mdp::Environment make_env(const config::RunConfig& cfg, const winddata::ScenarioSpec& scenario) {
    return mdp::Environment(cfg.farm.build(), cfg.battery, cfg.env, winddata::realize(scenario));
}

PolicyBundle make_policies(const config::RunConfig& cfg, std::uint64_t seed) {
    PolicyBundle pb;
    pb.method = cfg.method;
    if (cfg.method == "mpc") return pb;

    const farm::FarmLayout layout = cfg.farm.build();
    const auto n = static_cast<Eigen::Index>(layout.turbines.size());
    const agents::AgentHyper hyper = cfg.hyper();

    if (cfg.method == "ddpg") {
        // Joint action: one induction entry per turbine plus the battery.
        Eigen::VectorXd lo(n + 1), hi(n + 1);
        lo.head(n).setZero();
        hi.head(n).setConstant(0.5);
        lo[n] = -cfg.battery.p_discharge_max_mw;
        hi[n] = cfg.battery.p_charge_max_mw;
        Rng init = Rng::stream(seed, "init-joint");
        pb.joint = agents::make_agent_pair(6, lo, hi, /*symmetric=*/false, hyper, init);
        return pb;
    }

    Rng init_u = Rng::stream(seed, "init-upper");
    pb.upper = agents::make_agent_pair(3, Eigen::VectorXd::Zero(n),
                                       Eigen::VectorXd::Constant(n, 0.5),
                                       /*symmetric=*/false, hyper, init_u);

    const int lower_dim = cfg.env.include_soc_in_lower_state ? 6 : 5;
    const int extra = cfg.agents.lower_critic_sees_upper_action ? static_cast<int>(n) : 0;
    Rng init_l = Rng::stream(seed, "init-lower");
    pb.lower = agents::make_agent_pair(
        lower_dim, Eigen::VectorXd::Constant(1, -cfg.battery.p_discharge_max_mw),
        Eigen::VectorXd::Constant(1, cfg.battery.p_charge_max_mw),
        /*symmetric=*/true, hyper, init_l, extra);
    return pb;
}

winddata::WindSeries training_series(const config::RunConfig& cfg,
                                     const winddata::ScenarioSpec& scenario, int episode) {
    if (cfg.wind.train_on_eval_series || scenario.generator == "file" ||
        scenario.generator == "fixed-sequence")
        return winddata::realize(scenario);
    return winddata::synthesize(scenario, static_cast<std::uint64_t>(episode) + 1);
}

TrainResult train_one(const config::RunConfig& cfg, const winddata::ScenarioSpec& scenario,
                      std::uint64_t seed) {
    if (cfg.method == "mpc")
        throw ConfigError("method mpc needs no training; run evaluate or compare instead");

    TrainResult result;
    result.policy = make_policies(cfg, seed);
    const agents::TrainOptions opt = train_options(cfg);
    Rng noise = Rng::stream(seed, "explore");

    mdp::Environment env = make_env(cfg, scenario);
    result.episode_log.reserve(static_cast<std::size_t>(cfg.episodes));

    if (cfg.method == "ddpg") {
        agents::ReplayBuffer buffer(static_cast<std::size_t>(cfg.agents.buffer_capacity),
                                    Rng::stream(seed, "replay-joint"));
        for (int e = 0; e < cfg.episodes; ++e) {
            env.reset(training_series(cfg, scenario, e));
            result.episode_log.push_back(
                agents::train_single_ddpg(env, *result.policy.joint, buffer, opt, noise));
        }
        return result;
    }

    agents::ReplayBuffer upper_buffer(static_cast<std::size_t>(cfg.agents.buffer_capacity),
                                      Rng::stream(seed, "replay-upper"));
    agents::ReplayBuffer lower_buffer(static_cast<std::size_t>(cfg.agents.buffer_capacity),
                                      Rng::stream(seed, "replay-lower"));
    for (int e = 0; e < cfg.episodes; ++e) {
        env.reset(training_series(cfg, scenario, e));
        result.episode_log.push_back(agents::train_episode(env, *result.policy.upper,
                                                           *result.policy.lower, upper_buffer,
                                                           lower_buffer, opt, noise));
    }
    return result;
}

metrics::EpisodeSummary evaluate_policy(const config::RunConfig& cfg,
                                        const winddata::ScenarioSpec& scenario,
                                        const PolicyBundle& policy, mdp::Trajectory* trajectory) {
    mdp::Environment env = make_env(cfg, scenario);
    if (policy.method == "mpc") {
        mpc::run_mpc_episode(env, cfg.mpc);
    } else if (policy.method == "ddpg") {
        if (!policy.joint) throw ContractError("joint policy missing from the bundle");
        agents::run_single_episode(env, *policy.joint, eval_options(cfg));
    } else {
        if (!policy.upper || !policy.lower)
            throw ContractError("hierarchical policy missing from the bundle");
        agents::run_hierarchical_episode(env, *policy.upper, *policy.lower, eval_options(cfg));
    }
    if (trajectory) *trajectory = env.trajectory();
    return metrics::summarize(env.trajectory().records, cfg.env.fluct_threshold_mw);
}

void save_policies(const PolicyBundle& policy, const config::RunConfig& cfg, std::uint64_t seed,
                   const std::filesystem::path& dir) {
    fs::create_directories(dir);
    if (policy.joint) save_pair(*policy.joint, dir, "");
    if (policy.upper) save_pair(*policy.upper, dir, "upper_");
    if (policy.lower) save_pair(*policy.lower, dir, "lower_");
    json manifest;
    manifest["method"] = policy.method;
    manifest["seed"] = seed;
    manifest["episodes"] = cfg.episodes;
    manifest["config_hash"] = config::config_hash(cfg);
    textio::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

PolicyBundle load_policies(const config::RunConfig& cfg, const std::filesystem::path& dir) {
    if (cfg.method == "mpc") return PolicyBundle{"mpc", {}, {}, {}};
    if (!fs::exists(dir / "manifest.json"))
        throw ConfigError("no checkpoint found at " + dir.string() +
                          "; run the train command first");
    PolicyBundle pb = make_policies(cfg, 0); // architecture donor; weights replaced
    if (pb.joint) load_pair(*pb.joint, dir, "");
    if (pb.upper) load_pair(*pb.upper, dir, "upper_");
    if (pb.lower) load_pair(*pb.lower, dir, "lower_");
    return pb;
}

void write_training_log(const std::vector<agents::EpisodeStats>& log,
                        const std::filesystem::path& path) {
    std::string csv = "episode,total_profit,fs,vo,critic_loss_mean,actor_obj_mean,pinn_loss_mean\n";
    for (std::size_t i = 0; i < log.size(); ++i) {
        const auto& s = log[i];
        csv += std::to_string(i + 1);
        csv += ',';
        csv += textio::format_double(s.total_profit);
        csv += ',';
        csv += textio::format_double(s.fs);
        csv += ',';
        csv += std::to_string(s.vo);
        csv += ',';
        csv += textio::format_double(s.critic_loss_mean);
        csv += ',';
        csv += textio::format_double(s.actor_obj_mean);
        csv += ',';
        csv += textio::format_double(s.pinn_loss_mean);
        csv += '\n';
    }
    textio::write_file(path, csv);
}

std::vector<metrics::MethodScenarioSummary> execute_runs(const config::RunConfig& cfg) {
    cfg.validate();
    const fs::path out = cfg.output_dir;
    std::vector<metrics::MethodScenarioSummary> entries;

    for (const auto& scenario : cfg.wind.scenarios) {
        for (std::uint64_t seed : cfg.seeds) {
            const fs::path dir = run_dir(out, cfg.method, scenario.name, seed);
            try {
                PolicyBundle policy;
                if (cfg.method == "mpc") {
                    policy.method = "mpc";
                } else {
                    TrainResult res = train_one(cfg, scenario, seed);
                    write_training_log(res.episode_log, dir / "log.csv");
                    save_policies(res.policy, cfg, seed, dir / "checkpoints");
                    policy = std::move(res.policy);
                }
                mdp::Trajectory traj;
                const auto summary = evaluate_policy(cfg, scenario, policy, &traj);
                mdp::write_trajectory_csv(traj, cfg.env.control_period, dir / "trajectory.csv");
                write_run_summary(dir / "summary.json", cfg.method, scenario.name, seed, summary);
                entries.push_back({cfg.method, scenario.name, summary});
            } catch (...) {
                textio::write_file(dir / "INCOMPLETE",
                                   "run aborted before all outputs were written\n");
                throw;
            }
        }
    }
    return entries;
}

int cmd_train(const config::RunConfig& cfg) {
    cfg.validate();
    if (cfg.method == "mpc")
        throw ConfigError("method mpc needs no training; run evaluate or compare instead");
    const fs::path out = cfg.output_dir;
    textio::write_file(out / "config.json", config::to_json(cfg));

    for (const auto& scenario : cfg.wind.scenarios) {
        for (std::uint64_t seed : cfg.seeds) {
            const fs::path dir = run_dir(out, cfg.method, scenario.name, seed);
            try {
                TrainResult res = train_one(cfg, scenario, seed);
                write_training_log(res.episode_log, dir / "log.csv");
                save_policies(res.policy, cfg, seed, dir / "checkpoints");
            } catch (...) {
                textio::write_file(dir / "INCOMPLETE",
                                   "training aborted before all outputs were written\n");
                throw;
            }
        }
    }
    return 0;
}

int cmd_evaluate(const config::RunConfig& cfg) {
    cfg.validate();
    const fs::path out = cfg.output_dir;
    textio::write_file(out / "config.json", config::to_json(cfg));

    std::vector<metrics::MethodScenarioSummary> entries;
    for (const auto& scenario : cfg.wind.scenarios) {
        for (std::uint64_t seed : cfg.seeds) {
            const fs::path dir = run_dir(out, cfg.method, scenario.name, seed);
            const PolicyBundle policy = load_policies(cfg, dir / "checkpoints");
            mdp::Trajectory traj;
            const auto summary = evaluate_policy(cfg, scenario, policy, &traj);
            mdp::write_trajectory_csv(traj, cfg.env.control_period, dir / "trajectory.csv");
            write_run_summary(dir / "summary.json", cfg.method, scenario.name, seed, summary);
            entries.push_back({cfg.method, scenario.name, summary});
        }
    }
    write_method_summary(out / cfg.method / "summary.json", cfg, entries);
    return 0;
}

int cmd_compare(const std::vector<config::RunConfig>& cfgs) {
    if (cfgs.empty()) throw ConfigError("compare needs at least one config");

    std::vector<config::RunConfig> methods;
    if (cfgs.size() == 1) {
        for (const auto& m : cfgs.front().compare_methods) {
            config::RunConfig c = cfgs.front();
            c.method = m;
            methods.push_back(std::move(c));
        }
    } else {
        methods = cfgs;
    }

    if (methods.size() < 2) throw ConfigError("compare needs at least two methods");
    bool has_mpc = false;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        methods[i].validate();
        if (methods[i].method == "mpc") has_mpc = true;
        for (std::size_t k = 0; k < i; ++k)
            if (methods[k].method == methods[i].method)
                throw ConfigError("compare lists method \"" + methods[i].method + "\" twice");
        if (methods[i].seeds != methods.front().seeds)
            throw ConfigError("compare configs disagree on seeds");
        const auto& a = methods[i].wind.scenarios;
        const auto& b = methods.front().wind.scenarios;
        if (a.size() != b.size())
            throw ConfigError("compare configs disagree on scenario lists");
        for (std::size_t k = 0; k < a.size(); ++k)
            if (!same_scenario(a[k], b[k]))
                throw ConfigError("compare configs disagree on scenario \"" + a[k].name + "\"");
    }
    if (!has_mpc) throw ConfigError("compare needs the mpc baseline among its methods");

    const fs::path out = methods.front().output_dir;
    std::vector<metrics::MethodScenarioSummary> entries;
    for (auto& cfg : methods) {
        cfg.output_dir = out.string();
        textio::write_file(out / cfg.method / "config.json", config::to_json(cfg));
        auto part = execute_runs(cfg);
        write_method_summary(out / cfg.method / "summary.json", cfg, part);
        entries.insert(entries.end(), part.begin(), part.end());
    }

    const auto report = metrics::relative_report(entries, "mpc");
    metrics::write_report_csv(report, out / "report.csv");
    return 0;
}

int cmd_sweep(const config::RunConfig& cfg) {
    cfg.validate();
    if (cfg.sweep.parameter.empty())
        throw ConfigError("sweep needs sweep.parameter (a dotted config path)");
    if (cfg.sweep.values.empty()) throw ConfigError("sweep needs at least one value");

    const fs::path out = cfg.output_dir;
    textio::write_file(out / "config.json", config::to_json(cfg));

    std::string csv = "parameter,value,total_profit,fs,vo\n";
    for (double value : cfg.sweep.values) {
        config::RunConfig sub = config::with_value(cfg, cfg.sweep.parameter, value);
        sub.sweep = config::SweepConfig{};
        sub.output_dir =
            (out / (cfg.sweep.parameter + "=" + textio::format_double(value))).string();
        textio::write_file(fs::path(sub.output_dir) / "config.json", config::to_json(sub));

        const auto entries = execute_runs(sub);
        double p = 0.0, f = 0.0, v = 0.0;
        for (const auto& e : entries) {
            p += e.summary.total_profit;
            f += e.summary.fs;
            v += e.summary.vo;
        }
        const auto n = static_cast<double>(entries.size());
        csv += cfg.sweep.parameter;
        csv += ',';
        csv += textio::format_double(value);
        csv += ',';
        csv += textio::format_double(p / n);
        csv += ',';
        csv += textio::format_double(f / n);
        csv += ',';
        csv += textio::format_double(v / n);
        csv += '\n';
    }
    textio::write_file(out / "sweep.csv", csv);
    return 0;
}

int cmd_synth_wind(const config::RunConfig& cfg) {
    cfg.validate();
    const fs::path out = cfg.output_dir;
    textio::write_file(out / "config.json", config::to_json(cfg));
    for (const auto& scenario : cfg.wind.scenarios)
        winddata::write_csv(winddata::realize(scenario), out / "wind" / (scenario.name + ".csv"));
    return 0;
}

} // namespace wsis::runner

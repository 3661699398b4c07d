#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wsis/agents.hpp"
#include "wsis/config.hpp"
#include "wsis/mdp.hpp"
#include "wsis/metrics.hpp"
#include "wsis/winddata.hpp"

namespace wsis::runner {

// Trained policies: hierarchical methods fill upper+lower, the flat joint
// method fills joint, mpc carries none.
struct PolicyBundle {
    std::string method;
    std::optional<agents::AgentPair> upper;
    std::optional<agents::AgentPair> lower;
    std::optional<agents::AgentPair> joint;
};

struct TrainResult {
    PolicyBundle policy;
    std::vector<agents::EpisodeStats> episode_log; // one entry per episode
};

// <out>/<method>/<scenario>/<seed>
std::filesystem::path run_dir(const std::filesystem::path& out, const std::string& method,
                              const std::string& scenario, std::uint64_t seed);

mdp::NormBounds bounds_for(const config::RunConfig& cfg);

// Environment on the scenario's canonical evaluation series.
mdp::Environment make_env(const config::RunConfig& cfg, const winddata::ScenarioSpec& scenario);

// Fresh, deterministically initialized policies for cfg.method.
PolicyBundle make_policies(const config::RunConfig& cfg, std::uint64_t seed);

// Wind for one training episode: a fresh draw from the scenario's generator
// per episode; replay-style scenarios (file, fixed-sequence) and the
// train_on_eval_series override reuse the evaluation series.
winddata::WindSeries training_series(const config::RunConfig& cfg,
                                     const winddata::ScenarioSpec& scenario, int episode);

TrainResult train_one(const config::RunConfig& cfg, const winddata::ScenarioSpec& scenario,
                      std::uint64_t seed);

// Greedy rollout on the canonical series; optionally hands back the full
// trajectory for CSV output.
metrics::EpisodeSummary evaluate_policy(const config::RunConfig& cfg,
                                        const winddata::ScenarioSpec& scenario,
                                        const PolicyBundle& policy,
                                        mdp::Trajectory* trajectory = nullptr);

// Checkpoints: per-network text files plus manifest.json (method, seed,
// config hash, episode count).
void save_policies(const PolicyBundle& policy, const config::RunConfig& cfg, std::uint64_t seed,
                   const std::filesystem::path& dir);
PolicyBundle load_policies(const config::RunConfig& cfg, const std::filesystem::path& dir);

void write_training_log(const std::vector<agents::EpisodeStats>& log,
                        const std::filesystem::path& path);

// Train (RL methods) and evaluate every (scenario, seed); writes logs,
// checkpoints, trajectories and per-run summaries under cfg.output_dir and
// returns one report entry per run.
std::vector<metrics::MethodScenarioSummary> execute_runs(const config::RunConfig& cfg);

// Command bodies behind the CLI verbs; all return a process exit code.
int cmd_train(const config::RunConfig& cfg);
int cmd_evaluate(const config::RunConfig& cfg);
int cmd_compare(const std::vector<config::RunConfig>& cfgs);
int cmd_sweep(const config::RunConfig& cfg);
int cmd_synth_wind(const config::RunConfig& cfg);

} // namespace wsis::runner

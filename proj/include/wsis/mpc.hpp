#pragma once

#include <vector>

#include "wsis/bess.hpp"
#include "wsis/farm.hpp"
#include "wsis/mdp.hpp"
#include "wsis/metrics.hpp"
#include "wsis/winddata.hpp"

namespace wsis::mpc {

// Model-predictive baseline: persistence wind forecast, wake-aware induction
// search, and exactly-solved one-step battery scheduling.
struct MpcConfig {
    int horizon_minutes = 1;                  // lookahead length per decision
    double induction_grid_resolution = 1e-3;  // alpha step for the farm search
    double battery_search_resolution = 0.25;  // MW step (multi-step path only)

    void validate() const;
};

// Repeats the current observation `horizon` times (the weakest defensible
// forecast; it keeps the baseline conservative).
std::vector<winddata::WindSample> persistence_forecast(const winddata::WindSample& current,
                                                       int horizon);

// Coordinate descent upstream-to-downstream, each turbine grid-searched to
// maximize the forecast-mean farm power; sweeps repeat until stationary.
// Ties break toward smaller alpha.
farm::InductionVector optimize_induction(const farm::FarmLayout& layout,
                                         const std::vector<winddata::WindSample>& forecast,
                                         double grid_resolution);

struct BatteryDecision {
    double p_b_mw = 0.0;
    bool infeasible_bounds = false; // energy outside its window; midpoint returned
};

// Minimizes degradation cost - grid revenue + fluctuation penalty for the
// current minute. The objective is piecewise linear in P_B, so the optimum is
// one of the breakpoints {bounds, 0, d, d +/- threshold} with d = P_W - P_G_prev;
// ties break toward smaller |P_B|. horizon > 1 switches to exhaustive search
// over a resolution-spaced candidate grid per step (cost grows as grid^horizon;
// intended for short horizons at coarse resolution) and returns the first move.
BatteryDecision schedule_battery(double p_w_mw, double p_g_prev_mw,
                                 const bess::BatteryState& state,
                                 const bess::BatteryParams& params, const mdp::EnvConfig& cfg,
                                 double resolution_mw, int horizon = 1);

// Full rollout: forecast + induction search at every decision minute, battery
// scheduling every minute. Deterministic; emits the same trajectory as RL runs.
metrics::EpisodeSummary run_mpc_episode(mdp::Environment& env, const MpcConfig& cfg);

} // namespace wsis::mpc

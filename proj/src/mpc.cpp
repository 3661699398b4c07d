#include "wsis/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "wsis/errors.hpp"

namespace wsis::mpc {

namespace {

constexpr int kMaxSweeps = 64;
constexpr int kMaxBatteryHorizon = 6; // exhaustive search depth guard

// Negated one-minute reward with in-bounds actions (no clip excess).
double step_objective(double p_b_mw, double p_w_mw, double p_g_prev_mw,
                      double degradation_cost_usd, const mdp::EnvConfig& cfg) {
    const double deg = cfg.degradation_in_reward ? degradation_cost_usd : 0.0;
    return -mdp::lower_reward(p_w_mw, p_b_mw, p_g_prev_mw, deg, 0.0, cfg);
}

std::vector<double> battery_breakpoints(double p_w_mw, double p_g_prev_mw,
                                        const bess::PowerBounds& bounds,
                                        const mdp::EnvConfig& cfg) {
    const double d = p_w_mw - p_g_prev_mw; // zero-fluctuation charge rate
    std::vector<double> pts{bounds.low_mw,
                            bounds.high_mw,
                            0.0,
                            d,
                            d - cfg.fluct_threshold_mw,
                            d + cfg.fluct_threshold_mw};
    for (double& p : pts) p = std::clamp(p, bounds.low_mw, bounds.high_mw);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// Smallest total objective achievable from `state` over `steps_left` minutes,
// assuming the wind-side power holds at p_w_mw (persistence + held induction).
double best_total_objective(const bess::BatteryState& state, double p_g_prev_mw,
                            double p_w_mw, const bess::BatteryParams& params,
                            const mdp::EnvConfig& cfg, double resolution_mw, int steps_left) {
    const auto bounds = bess::feasible_power_bounds(state, params, cfg.dt_hours);
    auto candidates = battery_breakpoints(p_w_mw, p_g_prev_mw, bounds, cfg);
    for (double p = bounds.low_mw + resolution_mw; p < bounds.high_mw; p += resolution_mw)
        candidates.push_back(p);

    double best = std::numeric_limits<double>::infinity();
    for (double p : candidates) {
        const auto sr = bess::step(state, params, p, cfg.dt_hours);
        double total = step_objective(p, p_w_mw, p_g_prev_mw, sr.degradation_cost_usd, cfg);
        if (steps_left > 1)
            total += best_total_objective(sr.state, p_w_mw - p, p_w_mw, params, cfg,
                                          resolution_mw, steps_left - 1);
        best = std::min(best, total);
    }
    return best;
}

} // namespace

void MpcConfig::validate() const {
    if (horizon_minutes < 1) throw ConfigError("forecast horizon must cover at least one minute");
    if (!(induction_grid_resolution > 0.0) || induction_grid_resolution > 0.5)
        throw ConfigError("induction grid resolution must lie in (0, 0.5]");
    if (!(battery_search_resolution > 0.0))
        throw ConfigError("battery search resolution must be positive");
}

std::vector<winddata::WindSample> persistence_forecast(const winddata::WindSample& current,
                                                       int horizon) {
    if (horizon < 1) throw ContractError("forecast horizon must cover at least one minute");
    std::vector<winddata::WindSample> out(static_cast<std::size_t>(horizon), current);
    for (int i = 0; i < horizon; ++i) out[static_cast<std::size_t>(i)].minute = current.minute + i;
    return out;
}

farm::InductionVector optimize_induction(const farm::FarmLayout& layout,
                                         const std::vector<winddata::WindSample>& forecast,
                                         double grid_resolution) {
    if (forecast.empty()) throw ContractError("induction search needs a non-empty forecast");
    if (!(grid_resolution > 0.0) || grid_resolution > 0.5)
        throw ConfigError("induction grid resolution must lie in (0, 0.5]");
    layout.validate();

    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double a = static_cast<double>(i) * grid_resolution;
        if (a >= 0.5) break;
        grid.push_back(a);
    }
    grid.push_back(0.5);

    const std::size_t n = layout.turbines.size();
    // Start from the no-wake optimum snapped onto the grid.
    const double start =
        grid[std::min(grid.size() - 1,
                      static_cast<std::size_t>(std::llround((1.0 / 3.0) / grid_resolution)))];
    farm::InductionVector induction{std::vector<double>(n, start)};

    auto mean_power = [&](const farm::InductionVector& ind) {
        double total = 0.0;
        for (const auto& s : forecast)
            total += farm::farm_step(layout, s.speed_mps, s.direction_rad, ind).total_power_mw;
        return total / static_cast<double>(forecast.size());
    };

    // Upstream-to-downstream sweep order under the first forecast direction.
    const double dir = forecast.front().direction_rad;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ta = layout.turbines[a];
        const auto& tb = layout.turbines[b];
        const double xa = ta.x_m * std::cos(dir) + ta.y_m * std::sin(dir);
        const double xb = tb.x_m * std::cos(dir) + tb.y_m * std::sin(dir);
        if (xa != xb) return xa < xb;
        return ta.id < tb.id;
    });

    double current = mean_power(induction);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool changed = false;
        for (std::size_t idx : order) {
            const double keep = induction.alphas[idx];
            double best_alpha = keep;
            double best_power = current;
            for (double a : grid) {
                induction.alphas[idx] = a;
                const double p = mean_power(induction);
                if (p > best_power || (p == best_power && a < best_alpha)) {
                    best_power = p;
                    best_alpha = a;
                }
            }
            induction.alphas[idx] = best_alpha;
            if (best_alpha != keep) {
                current = best_power;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return induction;
}

BatteryDecision schedule_battery(double p_w_mw, double p_g_prev_mw,
                                 const bess::BatteryState& state,
                                 const bess::BatteryParams& params, const mdp::EnvConfig& cfg,
                                 double resolution_mw, int horizon) {
    if (horizon < 1) throw ContractError("battery schedule needs at least one step");
    const auto bounds = bess::feasible_power_bounds(state, params, cfg.dt_hours);
    if (bounds.low_mw > bounds.high_mw)
        return {0.5 * (bounds.low_mw + bounds.high_mw), true};

    auto candidates = battery_breakpoints(p_w_mw, p_g_prev_mw, bounds, cfg);
    if (horizon > 1) {
        if (horizon > kMaxBatteryHorizon)
            throw ConfigError("multi-step battery search supports at most " +
                              std::to_string(kMaxBatteryHorizon) + " minutes");
        if (!(resolution_mw > 0.0)) throw ConfigError("battery search resolution must be positive");
        for (double p = bounds.low_mw + resolution_mw; p < bounds.high_mw; p += resolution_mw)
            candidates.push_back(p);
    }

    // Lexicographic (objective, |P_B|, P_B) keeps exact ties at the smallest move.
    auto best = std::make_tuple(std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity());
    double best_p = 0.0;
    for (double p : candidates) {
        const auto sr = bess::step(state, params, p, cfg.dt_hours);
        double total = step_objective(p, p_w_mw, p_g_prev_mw, sr.degradation_cost_usd, cfg);
        if (horizon > 1)
            total += best_total_objective(sr.state, p_w_mw - p, p_w_mw, params, cfg,
                                          resolution_mw, horizon - 1);
        const auto key = std::make_tuple(total, std::abs(p), p);
        if (key < best) {
            best = key;
            best_p = p;
        }
    }
    return {best_p, false};
}

metrics::EpisodeSummary run_mpc_episode(mdp::Environment& env, const MpcConfig& cfg) {
    cfg.validate();
    while (!env.done()) {
        if (env.upper_decision_due()) {
            const mdp::UpperState us = env.upper_state();
            const winddata::WindSample now{env.minute(), us.u_inf_mps, us.direction_rad};
            const auto forecast = persistence_forecast(now, cfg.horizon_minutes);
            const auto induction =
                optimize_induction(env.layout(), forecast, cfg.induction_grid_resolution);
            env.apply_upper(induction.alphas);
        }
        const mdp::LowerState& ls = env.lower_state();
        const auto decision =
            schedule_battery(ls.signal_mw, ls.prev_grid_power_mw, env.battery(),
                             env.battery_params(), env.config(), cfg.battery_search_resolution,
                             cfg.horizon_minutes);
        env.step(decision.p_b_mw);
    }
    return metrics::summarize(env.trajectory().records, env.config().fluct_threshold_mw);
}

} // namespace wsis::mpc

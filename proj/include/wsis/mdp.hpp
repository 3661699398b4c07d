#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wsis/bess.hpp"
#include "wsis/farm.hpp"
#include "wsis/winddata.hpp"

namespace wsis::mdp {

// Episode-level constants: cadences, economics and penalty shaping.
struct EnvConfig {
    int control_period = 5;       // minutes between induction decisions
    double dt_hours = 1.0 / 60.0; // hours per minute
    double price = 300.0;         // $/MWh feed-in tariff
    double fluct_threshold_mw = 3.0;
    double kappa = 10.0; // $ per unit of upper clip distance
    double beta1 = 5.0;  // $ per MW of violation penalty
    double beta2 = 10.0; // $ per MW of lower clip excess
    double nu = 10.0;    // above-threshold excess multiplier
    double gamma = 0.99;
    int episode_minutes = 1440;
    bool include_soc_in_lower_state = true;
    // Model ablations: drop wake deficits from the farm evaluation, or hide
    // the wear cost from the lower reward (real cost still accounted).
    bool wake_enabled = true;
    bool degradation_in_reward = true;

    void validate() const;
};

struct UpperState {
    double u_inf_mps = 0.0;
    double direction_rad = 0.0;
    double price = 0.0;
};

struct LowerState {
    UpperState upper;
    double prev_grid_power_mw = 0.0;
    double signal_mw = 0.0; // current-minute farm output P_W
    double soc = 0.0;       // normalized (E - E_min) / (E_max - E_min)
};

// One minute of bookkeeping.  p_g = p_w - p_b holds exactly; p_fg compares
// against the previous minute's grid power.
struct GridRecord {
    int minute = 0;
    double p_w_mw = 0.0;
    double p_b_mw = 0.0;
    double p_g_mw = 0.0;
    double p_fg_mw = 0.0;
    double p_vg_mw = 0.0;
    double degradation_cost = 0.0;
    double revenue = 0.0;
    double r_u = 0.0; // this minute's contribution to the window reward
    double r_l = 0.0;
};

struct Trajectory {
    std::vector<GridRecord> records;
    std::vector<double> wind_mps;
    std::vector<std::vector<double>> applied_alphas;
    std::vector<double> battery_energy_mwh; // post-step energy per minute
};

// Min-max scaling ranges for network inputs.
struct NormBounds {
    double speed_lo = 0.0, speed_hi = 30.0;
    double direction_lo = -3.15, direction_hi = 3.15;
    double price_lo = 0.0, price_hi = 600.0;
    double power_lo = -3.0, power_hi = 12.0;

    void validate() const;
    // Power range [-p_dis_max, n * single-turbine power at cut-out, alpha=1/3].
    static NormBounds defaults(const farm::FarmLayout& layout, const bess::BatteryParams& battery);
};

std::pair<farm::InductionVector, double> clip_upper_action(const std::vector<double>& raw,
                                                           std::size_t turbine_count);
std::pair<double, double> clip_lower_action(double raw_mw, const bess::BatteryState& state,
                                            const bess::BatteryParams& params, double dt_hours);
double violation_penalty(double p_fg_mw, const EnvConfig& cfg);

// r_L = -(C_deg + Pr*(P_B - P_W)*dt) - beta1*P_VG - beta2*G_L, in dollars.
double lower_reward(double p_w_mw, double p_b_mw, double p_g_prev_mw, double degradation_cost,
                    double g_l, const EnvConfig& cfg);
// r_U = sum over the window of Pr*P_W*dt, minus kappa * clip distance.
double upper_reward(const std::vector<GridRecord>& window_records, double g_u_distance,
                    const EnvConfig& cfg);

Eigen::VectorXd normalize_upper(const UpperState& s, const NormBounds& b);
Eigen::VectorXd normalize_lower(const LowerState& s, const NormBounds& b, bool include_soc);

// Result of completing one minute.
struct StepOutcome {
    GridRecord record;
    double g_l = 0.0;
    bool done = false;
    bool window_closed = false;  // an upper window ended on this minute
    double window_reward = 0.0;  // r_U for that window (valid when closed)
    UpperState next_upper;       // state at the next minute (last state if done)
    LowerState next_lower;       // bootstrap state built with the held induction
    double p_g_prev_used = 0.0;  // the P_G^{t-1} this minute was compared against
};

// Minute-resolution episode driver.  Call order per minute:
//   if upper_decision_due(): apply_upper(raw alphas)
//   lower_state()  -> builds the lower observation (computes farm output)
//   step(raw p_b)  -> completes the minute
// The induction vector is held between decision minutes.  P_G_prev is
// initialized on the first minute from an all-idle evaluation (P_B = 0) so
// minute 0 has zero fluctuation by construction.
class Environment {
public:
    Environment(farm::FarmLayout layout, bess::BatteryParams battery, EnvConfig cfg,
                winddata::WindSeries series, double initial_soc_frac = 0.5);

    UpperState reset();
    UpperState reset(winddata::WindSeries series); // swap wind, then reset

    bool done() const { return minute_ >= episode_length_; }
    int minute() const { return minute_; }
    int episode_length() const { return episode_length_; }
    bool upper_decision_due() const;

    // Consume a raw upper action (clipped inside); returns clip distance G_U.
    double apply_upper(const std::vector<double>& raw_alphas);
    const LowerState& lower_state();
    StepOutcome step(double raw_p_b_mw);

    UpperState upper_state() const;
    const farm::FarmLayout& layout() const { return layout_; }
    const bess::BatteryParams& battery_params() const { return battery_params_; }
    const bess::BatteryState& battery() const { return battery_; }
    const EnvConfig& config() const { return cfg_; }
    const Trajectory& trajectory() const { return trajectory_; }
    const farm::InductionVector& induction() const;

private:
    void ensure_lower_state();

    farm::FarmLayout layout_;
    bess::BatteryParams battery_params_;
    EnvConfig cfg_;
    winddata::WindSeries series_;
    double initial_soc_frac_;
    int episode_length_ = 0;

    int minute_ = 0;
    bess::BatteryState battery_;
    std::optional<farm::InductionVector> induction_;
    std::optional<double> p_g_prev_;
    bool lower_ready_ = false;
    LowerState lower_cache_;
    double window_g_u_ = 0.0;
    double window_r_u_accum_ = 0.0;
    int window_start_minute_ = 0;
    std::size_t window_first_record_ = 0;
    Trajectory trajectory_;
};

// Trajectory CSV: minute,wind_mps,alpha_0..alpha_{n-1},p_w_mw,p_b_mw,p_g_mw,
// p_fg_mw,e_b_mwh,deg_cost,r_l,r_u (r_u only on decision rows).
void write_trajectory_csv(const Trajectory& traj, int control_period,
                          const std::filesystem::path& path);

} // namespace wsis::mdp

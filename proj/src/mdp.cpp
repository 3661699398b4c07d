#include "wsis/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wsis/errors.hpp"
#include "wsis/textio.hpp"

namespace wsis::mdp {

namespace {

double scale01(double x, double lo, double hi) {
    return std::clamp((x - lo) / (hi - lo), 0.0, 1.0);
}

} // namespace

void EnvConfig::validate() const {
    if (control_period < 1) throw ConfigError("control period must be >= 1 minute");
    if (dt_hours <= 0.0) throw ConfigError("dt must be positive");
    if (price < 0.0) throw ConfigError("price must be non-negative");
    if (fluct_threshold_mw <= 0.0) throw ConfigError("fluctuation threshold must be positive");
    if (kappa < 0.0 || beta1 < 0.0 || beta2 < 0.0 || nu < 0.0)
        throw ConfigError("penalty coefficients must be non-negative");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    if (episode_minutes < 1) throw ConfigError("episode length must be positive");
}

void NormBounds::validate() const {
    if (!(speed_lo < speed_hi) || !(direction_lo < direction_hi) || !(price_lo < price_hi) ||
        !(power_lo < power_hi))
        throw ConfigError("normalization bounds must satisfy lo < hi");
}

NormBounds NormBounds::defaults(const farm::FarmLayout& layout,
                                const bess::BatteryParams& battery) {
    NormBounds b;
    b.direction_lo = -std::numbers::pi;
    b.direction_hi = std::numbers::pi;
    // The uncapped actuator-disk turbine peaks just below its cut-out speed,
    // so that is the per-turbine rating; the power axis must cover every
    // producible level or high-wind states alias under the [0,1] clamp.
    double rated_total = 0.0;
    for (const auto& t : layout.turbines)
        rated_total += farm::turbine_power_mw(t, t.cut_out_mps, 1.0 / 3.0, layout.air_density,
                                              layout.power_scale);
    b.power_lo = -battery.p_discharge_max_mw;
    b.power_hi = std::max(rated_total, b.power_lo + 1.0);
    b.validate();
    return b;
}

std::pair<farm::InductionVector, double> clip_upper_action(const std::vector<double>& raw,
                                                           std::size_t turbine_count) {
    if (raw.size() != turbine_count)
        throw ContractError("upper action length does not match turbine count");
    farm::InductionVector clipped;
    clipped.alphas.reserve(raw.size());
    double distance = 0.0;
    for (double a : raw) {
        const double c = std::clamp(a, 0.0, 0.5);
        distance += std::abs(a - c);
        clipped.alphas.push_back(c);
    }
    return {std::move(clipped), distance};
}

std::pair<double, double> clip_lower_action(double raw_mw, const bess::BatteryState& state,
                                            const bess::BatteryParams& params, double dt_hours) {
    const double g_l = std::abs(raw_mw + params.p_discharge_max_mw) +
                       std::abs(raw_mw - params.p_charge_max_mw) -
                       params.p_charge_max_mw - params.p_discharge_max_mw;
    const auto bounds = bess::feasible_power_bounds(state, params, dt_hours);
    const double rate_clipped =
        std::clamp(raw_mw, -params.p_discharge_max_mw, params.p_charge_max_mw);
    return {std::clamp(rate_clipped, bounds.low_mw, bounds.high_mw), g_l};
}

double violation_penalty(double p_fg_mw, const EnvConfig& cfg) {
    if (p_fg_mw < 0.0) throw ContractError("fluctuation magnitude must be non-negative");
    const double excess = p_fg_mw - cfg.fluct_threshold_mw;
    if (excess <= 0.0) return p_fg_mw;
    return cfg.fluct_threshold_mw + cfg.nu * excess;
}

double lower_reward(double p_w_mw, double p_b_mw, double p_g_prev_mw, double degradation_cost,
                    double g_l, const EnvConfig& cfg) {
    const double p_g = p_w_mw - p_b_mw;
    const double p_fg = std::abs(p_g_prev_mw - p_g);
    const double p_vg = violation_penalty(p_fg, cfg);
    return -(degradation_cost + cfg.price * (p_b_mw - p_w_mw) * cfg.dt_hours) -
           cfg.beta1 * p_vg - cfg.beta2 * g_l;
}

double upper_reward(const std::vector<GridRecord>& window_records, double g_u_distance,
                    const EnvConfig& cfg) {
    double total = 0.0;
    for (const auto& rec : window_records) total += cfg.price * rec.p_w_mw * cfg.dt_hours;
    return total - cfg.kappa * g_u_distance;
}

Eigen::VectorXd normalize_upper(const UpperState& s, const NormBounds& b) {
    b.validate();
    Eigen::VectorXd v(3);
    v << scale01(s.u_inf_mps, b.speed_lo, b.speed_hi),
        scale01(s.direction_rad, b.direction_lo, b.direction_hi),
        scale01(s.price, b.price_lo, b.price_hi);
    return v;
}

Eigen::VectorXd normalize_lower(const LowerState& s, const NormBounds& b, bool include_soc) {
    b.validate();
    Eigen::VectorXd v(include_soc ? 6 : 5);
    v.head(3) = normalize_upper(s.upper, b);
    v[3] = scale01(s.prev_grid_power_mw, b.power_lo, b.power_hi);
    v[4] = scale01(s.signal_mw, b.power_lo, b.power_hi);
    if (include_soc) v[5] = std::clamp(s.soc, 0.0, 1.0);
    return v;
}

Environment::Environment(farm::FarmLayout layout, bess::BatteryParams battery, EnvConfig cfg,
                         winddata::WindSeries series, double initial_soc_frac)
    : layout_(std::move(layout)),
      battery_params_(battery),
      cfg_(cfg),
      initial_soc_frac_(initial_soc_frac) {
    layout_.validate();
    battery_params_.validate();
    cfg_.validate();
    if (!(initial_soc_frac_ >= 0.0 && initial_soc_frac_ <= 1.0))
        throw ConfigError("initial SOC fraction must lie in [0, 1]");
    reset(std::move(series));
}

UpperState Environment::reset(winddata::WindSeries series) {
    series.validate();
    if (series.resolution_minutes != 1)
        throw IngestionError("environment needs a 1-minute wind series");
    if (static_cast<int>(series.samples.size()) < cfg_.episode_minutes)
        throw IngestionError("wind series shorter than the episode (" +
                             std::to_string(series.samples.size()) + " < " +
                             std::to_string(cfg_.episode_minutes) + " minutes)");
    for (std::size_t i = 0; i < series.samples.size(); ++i)
        if (series.samples[i].minute != series.samples[0].minute + static_cast<int>(i))
            throw IngestionError("wind series has minute gaps");
    series_ = std::move(series);
    return reset();
}

UpperState Environment::reset() {
    episode_length_ = cfg_.episode_minutes;
    minute_ = 0;
    battery_.minute = 0;
    battery_.energy_mwh = std::clamp(initial_soc_frac_ * battery_params_.capacity_mwh,
                                     battery_params_.e_min_mwh, battery_params_.e_max_mwh);
    induction_.reset();
    p_g_prev_.reset();
    lower_ready_ = false;
    window_g_u_ = 0.0;
    window_r_u_accum_ = 0.0;
    window_start_minute_ = 0;
    window_first_record_ = 0;
    trajectory_ = {};
    return upper_state();
}

bool Environment::upper_decision_due() const {
    return !done() && minute_ % cfg_.control_period == 0;
}

UpperState Environment::upper_state() const {
    const int idx = std::min(minute_, episode_length_ - 1);
    const auto& s = series_.samples[static_cast<std::size_t>(idx)];
    return {s.speed_mps, s.direction_rad, cfg_.price};
}

const farm::InductionVector& Environment::induction() const {
    if (!induction_) throw ContractError("no upper action has been applied yet");
    return *induction_;
}

double Environment::apply_upper(const std::vector<double>& raw_alphas) {
    if (!upper_decision_due())
        throw ContractError("upper action applied off-cadence at minute " +
                            std::to_string(minute_));
    if (lower_ready_)
        throw ContractError("upper action must be applied before reading the lower state");
    auto [clipped, distance] = clip_upper_action(raw_alphas, layout_.turbines.size());
    induction_ = std::move(clipped);
    window_g_u_ = distance;
    window_r_u_accum_ = 0.0;
    window_start_minute_ = minute_;
    window_first_record_ = trajectory_.records.size();
    return distance;
}

void Environment::ensure_lower_state() {
    if (lower_ready_) return;
    if (done()) throw ContractError("episode is over");
    if (!induction_ || (upper_decision_due() && window_start_minute_ != minute_))
        throw ContractError("an upper action is required at minute " + std::to_string(minute_));
    const auto& sample = series_.samples[static_cast<std::size_t>(minute_)];
    const auto farm_out = farm::farm_step(layout_, sample.speed_mps, sample.direction_rad,
                                          *induction_, cfg_.wake_enabled);
    if (!p_g_prev_) p_g_prev_ = farm_out.total_power_mw; // all-idle initialization
    lower_cache_.upper = upper_state();
    lower_cache_.prev_grid_power_mw = *p_g_prev_;
    lower_cache_.signal_mw = farm_out.total_power_mw;
    lower_cache_.soc = (battery_.energy_mwh - battery_params_.e_min_mwh) /
                       (battery_params_.e_max_mwh - battery_params_.e_min_mwh);
    lower_ready_ = true;
}

const LowerState& Environment::lower_state() {
    ensure_lower_state();
    return lower_cache_;
}

StepOutcome Environment::step(double raw_p_b_mw) {
    ensure_lower_state();
    const auto [p_b, g_l] =
        clip_lower_action(raw_p_b_mw, battery_, battery_params_, cfg_.dt_hours);
    const auto bstep = bess::step(battery_, battery_params_, p_b, cfg_.dt_hours);
    const double deg_in_reward = cfg_.degradation_in_reward ? bstep.degradation_cost_usd : 0.0;

    const double p_w = lower_cache_.signal_mw;
    const double p_g_prev = lower_cache_.prev_grid_power_mw;
    const double p_g = p_w - p_b;
    const double p_fg = std::abs(p_g_prev - p_g);

    StepOutcome out;
    out.g_l = g_l;
    out.p_g_prev_used = p_g_prev;
    GridRecord& rec = out.record;
    rec.minute = minute_;
    rec.p_w_mw = p_w;
    rec.p_b_mw = p_b;
    rec.p_g_mw = p_g;
    rec.p_fg_mw = p_fg;
    rec.p_vg_mw = violation_penalty(p_fg, cfg_);
    rec.degradation_cost = bstep.degradation_cost_usd;
    rec.revenue = cfg_.price * p_g * cfg_.dt_hours;
    rec.r_l = lower_reward(p_w, p_b, p_g_prev, deg_in_reward, g_l, cfg_);
    rec.r_u = cfg_.price * p_w * cfg_.dt_hours -
              (minute_ == window_start_minute_ ? cfg_.kappa * window_g_u_ : 0.0);
    window_r_u_accum_ += rec.r_u;

    trajectory_.records.push_back(rec);
    trajectory_.wind_mps.push_back(series_.samples[static_cast<std::size_t>(minute_)].speed_mps);
    trajectory_.applied_alphas.push_back(induction_->alphas);
    trajectory_.battery_energy_mwh.push_back(bstep.state.energy_mwh);

    battery_ = bstep.state;
    p_g_prev_ = p_g;
    minute_ += 1;
    lower_ready_ = false;

    out.done = done();
    out.window_closed = out.done || (minute_ % cfg_.control_period == 0);
    if (out.window_closed) out.window_reward = window_r_u_accum_;
    out.next_upper = upper_state();

    if (!out.done) {
        // Bootstrap preview of the next minute with the held induction; on
        // non-boundary minutes this doubles as the next lower observation.
        const auto& nxt = series_.samples[static_cast<std::size_t>(minute_)];
        const auto preview = farm::farm_step(layout_, nxt.speed_mps, nxt.direction_rad,
                                             *induction_, cfg_.wake_enabled);
        out.next_lower.upper = out.next_upper;
        out.next_lower.prev_grid_power_mw = p_g;
        out.next_lower.signal_mw = preview.total_power_mw;
        out.next_lower.soc = (battery_.energy_mwh - battery_params_.e_min_mwh) /
                             (battery_params_.e_max_mwh - battery_params_.e_min_mwh);
        if (!out.window_closed) {
            lower_cache_ = out.next_lower;
            lower_ready_ = true;
        }
    } else {
        out.next_lower = lower_cache_; // terminal: never bootstrapped from
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, int control_period,
                          const std::filesystem::path& path) {
    const std::size_t n_alpha = traj.applied_alphas.empty() ? 0 : traj.applied_alphas[0].size();
    std::string body = "minute,wind_mps";
    for (std::size_t i = 0; i < n_alpha; ++i) body += ",alpha_" + std::to_string(i);
    body += ",p_w_mw,p_b_mw,p_g_mw,p_fg_mw,e_b_mwh,deg_cost,r_l,r_u\n";

    for (std::size_t i = 0; i < traj.records.size(); ++i) {
        const GridRecord& rec = traj.records[i];
        body += std::to_string(rec.minute);
        body += ',' + textio::format_double(traj.wind_mps[i]);
        for (std::size_t a = 0; a < n_alpha; ++a)
            body += ',' + textio::format_double(traj.applied_alphas[i][a]);
        body += ',' + textio::format_double(rec.p_w_mw);
        body += ',' + textio::format_double(rec.p_b_mw);
        body += ',' + textio::format_double(rec.p_g_mw);
        body += ',' + textio::format_double(rec.p_fg_mw);
        body += ',' + textio::format_double(traj.battery_energy_mwh[i]);
        body += ',' + textio::format_double(rec.degradation_cost);
        body += ',' + textio::format_double(rec.r_l);
        body += ',';
        if (rec.minute % control_period == 0) {
            // Whole-window reward on its decision row.
            double window_total = 0.0;
            for (std::size_t j = i;
                 j < traj.records.size() && j < i + static_cast<std::size_t>(control_period); ++j)
                window_total += traj.records[j].r_u;
            body += textio::format_double(window_total);
        }
        body += '\n';
    }
    textio::write_file(path, body);
}

} // namespace wsis::mdp

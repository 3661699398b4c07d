#include "wsis/bess.hpp"

#include <algorithm>
#include <cmath>

#include "wsis/errors.hpp"

namespace wsis::bess {

void BatteryParams::validate() const {
    if (capacity_mwh <= 0.0) throw ConfigError("battery capacity must be positive");
    if (!(0.0 <= e_min_mwh && e_min_mwh < e_max_mwh && e_max_mwh <= capacity_mwh))
        throw ConfigError("battery energy window must satisfy 0 <= E_min < E_max <= capacity");
    if (p_charge_max_mw <= 0.0 || p_discharge_max_mw <= 0.0)
        throw ConfigError("battery power limits must be positive");
    if (eta_charge <= 0.0 || eta_charge > 1.0 || eta_discharge <= 0.0 || eta_discharge > 1.0)
        throw ConfigError("battery efficiencies must lie in (0, 1]");
    if (k_deg_usd_per_kwh && *k_deg_usd_per_kwh < 0.0)
        throw ConfigError("direct degradation rate must be non-negative");
    if (!k_deg_usd_per_kwh) {
        if (lifetime_throughput_kwh <= 0.0 || roundtrip_sqrt <= 0.0)
            throw ConfigError("degradation rate denominator must be positive");
        if (replacement_cost_usd < 0.0)
            throw ConfigError("replacement cost must be non-negative");
    }
}

double BatteryParams::degradation_rate() const {
    if (k_deg_usd_per_kwh) return *k_deg_usd_per_kwh;
    return degradation_coefficient(*this);
}

double degradation_coefficient(const BatteryParams& params) {
    const double denom = params.lifetime_throughput_kwh * params.roundtrip_sqrt;
    if (denom <= 0.0) throw ConfigError("degradation rate denominator must be positive");
    return params.replacement_cost_usd / denom;
}

double lifetime_throughput_kwh(const std::vector<std::pair<double, double>>& dod_cycles,
                               double e_max_mwh) {
    if (dod_cycles.empty()) throw ConfigError("depth-of-discharge table is empty");
    double sum = 0.0;
    for (const auto& [depth, cycles] : dod_cycles) {
        if (depth <= 0.0 || depth > 1.0) throw ConfigError("DOD fraction must lie in (0, 1]");
        if (cycles <= 0.0) throw ConfigError("cycles-to-failure must be positive");
        sum += e_max_mwh * 1000.0 * depth * cycles;
    }
    return sum / static_cast<double>(dod_cycles.size());
}

StepResult step(const BatteryState& state, const BatteryParams& params,
                double p_b_mw, double dt_hours) {
    if (p_b_mw < -params.p_discharge_max_mw || p_b_mw > params.p_charge_max_mw)
        throw ContractError("battery power outside rate limits; clip before stepping");
    const double charge_mw = std::max(p_b_mw, 0.0);
    const double discharge_mw = std::max(-p_b_mw, 0.0);
    const double energy = state.energy_mwh +
                          (charge_mw * params.eta_charge - discharge_mw / params.eta_discharge) * dt_hours;
    // Tolerate only float round-off at the window edges; anything more means
    // the caller skipped the feasibility clip.
    const double slack = 1e-9 * std::max(1.0, params.capacity_mwh);
    if (energy < params.e_min_mwh - slack || energy > params.e_max_mwh + slack)
        throw ContractError("battery step would leave the energy window; clip before stepping");
    StepResult result;
    result.state.energy_mwh = std::clamp(energy, params.e_min_mwh, params.e_max_mwh);
    result.state.minute = state.minute + 1;
    result.degradation_cost_usd = params.degradation_rate() * discharge_mw * dt_hours * 1000.0;
    return result;
}

PowerBounds feasible_power_bounds(const BatteryState& state, const BatteryParams& params,
                                  double dt_hours) {
    PowerBounds b;
    // No clamping: an out-of-window energy state yields low > high, which
    // callers treat as the infeasibility signal.
    const double headroom = params.e_max_mwh - state.energy_mwh;
    const double stored = state.energy_mwh - params.e_min_mwh;
    b.high_mw = std::min(params.p_charge_max_mw, headroom / (params.eta_charge * dt_hours));
    b.low_mw = -std::min(params.p_discharge_max_mw, stored * params.eta_discharge / dt_hours);
    return b;
}

} // namespace wsis::bess

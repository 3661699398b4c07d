#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace wsis::bess {

// Battery energy storage parameters.  Sign convention for power everywhere:
// positive = charging (absorbing from the farm), negative = discharging.
struct BatteryParams {
    double capacity_mwh = 6.0;
    double e_min_mwh = 0.6;
    double e_max_mwh = 5.4;
    double p_charge_max_mw = 3.0;    // magnitude
    double p_discharge_max_mw = 3.0; // magnitude
    double eta_charge = 0.98;
    double eta_discharge = 0.98;

    // Wear-cost inputs: replacement cost spread over lifetime throughput,
    // derated by round-trip efficiency.  A direct dollars-per-kWh figure, if
    // supplied, takes precedence over the computed one.
    double replacement_cost_usd = 900.0;
    double lifetime_throughput_kwh = 1344.0;
    double roundtrip_sqrt = 0.89;
    std::optional<double> k_deg_usd_per_kwh;

    void validate() const;
    double degradation_rate() const; // resolved $/kWh of discharged energy
};

struct BatteryState {
    double energy_mwh = 0.0;
    int minute = 0;
};

struct StepResult {
    BatteryState state;
    double degradation_cost_usd = 0.0;
};

// Inclusive feasible range for commanded power given rate and energy limits.
struct PowerBounds {
    double low_mw = 0.0;  // most negative allowed (discharge)
    double high_mw = 0.0; // most positive allowed (charge)
};

// Wear cost per kWh discharged: C_R / (L_T * RE).
double degradation_coefficient(const BatteryParams& params);

// Lifetime discharge throughput in kWh from a (depth-of-discharge fraction,
// cycles-to-failure) table: the mean over entries of e_max * depth * cycles.
double lifetime_throughput_kwh(const std::vector<std::pair<double, double>>& dod_cycles,
                               double e_max_mwh);

// Advance one interval: energy update with one-way efficiencies plus the
// wear cost charged on discharged energy.  p_b_mw must already be feasible.
StepResult step(const BatteryState& state, const BatteryParams& params,
                double p_b_mw, double dt_hours);

PowerBounds feasible_power_bounds(const BatteryState& state, const BatteryParams& params,
                                  double dt_hours);

} // namespace wsis::bess

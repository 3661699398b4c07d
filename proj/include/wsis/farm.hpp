#pragma once

#include <vector>

namespace wsis::farm {

// One turbine: position in plan coordinates (meters), rotor geometry and the
// operating envelope.  Yaw is a fixed misalignment against the incoming wind.
struct TurbineSpec {
    int id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    double rotor_diameter_m = 100.0;
    double yaw_rad = 0.0;
    double cut_in_mps = 3.0;
    double cut_out_mps = 25.0;

    void validate() const;
};

// Whole-farm description plus shared wake/air parameters.  power_scale is a
// dimensionless derating factor applied to every turbine's electrical output.
struct FarmLayout {
    std::vector<TurbineSpec> turbines;
    double wake_expansion = 0.08; // linear wake growth rate k
    double air_density = 1.2;     // kg/m^3
    double power_scale = 0.95;

    void validate() const;

    // n identical turbines on a line along +x, spaced in rotor diameters.
    static FarmLayout linear_row(int count, double spacing_diameters,
                                 const TurbineSpec& prototype,
                                 double wake_expansion, double air_density,
                                 double power_scale);
};

// Axial induction factor per turbine, aligned with FarmLayout::turbines.
struct InductionVector {
    std::vector<double> alphas;
};

// Per-turbine electrical power and rotor-incident speed after wake effects.
struct FarmOutput {
    std::vector<double> per_turbine_power_mw;
    std::vector<double> per_turbine_speed_mps;
    double total_power_mw = 0.0;
};

// Power coefficient 4a(cos(yaw) - a)^2; domain a in [0, 0.5], |yaw| < pi/2.
double power_coefficient(double alpha, double yaw_rad);

// Electrical power in MW for one turbine at the given rotor-incident speed.
// Returns 0 outside the [cut_in, cut_out] envelope.
double turbine_power_mw(const TurbineSpec& spec, double incident_speed_mps,
                        double alpha, double air_density, double power_scale);

// Fractional velocity deficit a wake source imposes at a point (dx, dy)
// relative to the source, dx measured downwind and dy crosswind.  Zero at or
// upwind of the source and outside the linearly expanding wake cone.
double wake_deficit(const TurbineSpec& upstream, double alpha,
                    double dx_m, double dy_m, double wake_expansion);

// One quasi-static farm evaluation: rotate positions into the wind frame,
// accumulate upstream deficits per turbine (root-sum-of-squares), then apply
// the power curve at each rotor's incident speed.  direction_rad is the
// direction the wind blows toward, in radians.  include_wake=false evaluates
// every rotor at free-stream speed (used for model-ablation studies).
FarmOutput farm_step(const FarmLayout& layout, double free_stream_mps,
                     double direction_rad, const InductionVector& induction,
                     bool include_wake = true);

} // namespace wsis::farm

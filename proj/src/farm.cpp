#include "wsis/farm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "wsis/errors.hpp"

namespace wsis::farm {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
    if (!ok) throw ContractError(what);
}

} // namespace

void TurbineSpec::validate() const {
    if (rotor_diameter_m <= 0.0)
        throw ConfigError("turbine " + std::to_string(id) + ": rotor diameter must be positive");
    if (cut_in_mps < 0.0 || cut_out_mps <= cut_in_mps)
        throw ConfigError("turbine " + std::to_string(id) + ": need 0 <= cut_in < cut_out");
    if (std::abs(yaw_rad) >= kPi / 2.0)
        throw ConfigError("turbine " + std::to_string(id) + ": |yaw| must be below pi/2");
}

void FarmLayout::validate() const {
    if (turbines.empty()) throw ConfigError("farm layout has no turbines");
    if (wake_expansion <= 0.0) throw ConfigError("wake expansion must be positive");
    if (air_density <= 0.0) throw ConfigError("air density must be positive");
    if (power_scale <= 0.0) throw ConfigError("power scale must be positive");
    std::set<int> ids;
    std::set<std::pair<double, double>> positions;
    for (const auto& t : turbines) {
        t.validate();
        if (!ids.insert(t.id).second)
            throw ConfigError("duplicate turbine id " + std::to_string(t.id));
        if (!positions.insert({t.x_m, t.y_m}).second)
            throw ConfigError("turbines share position (" + std::to_string(t.x_m) + ", " +
                              std::to_string(t.y_m) + ")");
    }
}

FarmLayout FarmLayout::linear_row(int count, double spacing_diameters,
                                  const TurbineSpec& prototype,
                                  double wake_expansion, double air_density,
                                  double power_scale) {
    if (count < 1) throw ConfigError("turbine count must be at least 1");
    if (spacing_diameters <= 0.0) throw ConfigError("turbine spacing must be positive");
    FarmLayout layout;
    layout.wake_expansion = wake_expansion;
    layout.air_density = air_density;
    layout.power_scale = power_scale;
    layout.turbines.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        TurbineSpec t = prototype;
        t.id = i;
        t.x_m = spacing_diameters * prototype.rotor_diameter_m * i;
        t.y_m = 0.0;
        layout.turbines.push_back(t);
    }
    layout.validate();
    return layout;
}

double power_coefficient(double alpha, double yaw_rad) {
    require(alpha >= 0.0 && alpha <= 0.5, "induction factor outside [0, 0.5]");
    require(std::abs(yaw_rad) < kPi / 2.0, "|yaw| must be below pi/2");
    const double d = std::cos(yaw_rad) - alpha;
    return 4.0 * alpha * d * d;
}

double turbine_power_mw(const TurbineSpec& spec, double incident_speed_mps,
                        double alpha, double air_density, double power_scale) {
    require(incident_speed_mps >= 0.0, "incident speed must be non-negative");
    if (incident_speed_mps < spec.cut_in_mps || incident_speed_mps > spec.cut_out_mps)
        return 0.0;
    const double radius = spec.rotor_diameter_m / 2.0;
    const double rotor_area = kPi * radius * radius;
    const double cp = power_coefficient(alpha, spec.yaw_rad);
    const double u = incident_speed_mps;
    const double watts = 0.5 * air_density * rotor_area * cp * u * u * u;
    return power_scale * watts * 1e-6;
}

double wake_deficit(const TurbineSpec& upstream, double alpha,
                    double dx_m, double dy_m, double wake_expansion) {
    require(alpha >= 0.0 && alpha <= 0.5, "induction factor outside [0, 0.5]");
    if (dx_m <= 0.0) return 0.0;
    const double d = upstream.rotor_diameter_m;
    const double radius_at_dx = (d + 2.0 * wake_expansion * dx_m) / 2.0;
    if (std::abs(dy_m) > radius_at_dx) return 0.0;
    const double growth = 1.0 + 2.0 * wake_expansion * dx_m / d;
    return 2.0 * alpha / (growth * growth);
}

FarmOutput farm_step(const FarmLayout& layout, double free_stream_mps,
                     double direction_rad, const InductionVector& induction,
                     bool include_wake) {
    const std::size_t n = layout.turbines.size();
    require(induction.alphas.size() == n, "induction vector length mismatch");
    require(free_stream_mps >= 0.0, "free-stream speed must be non-negative");

    // Wind-frame coordinates: xw downwind, yw crosswind.  Order of wake
    // accumulation is fixed by (xw, id) so results do not depend on the
    // order turbines were listed in.
    struct Placed {
        std::size_t index;
        double xw;
        double yw;
    };
    const double cs = std::cos(direction_rad);
    const double sn = std::sin(direction_rad);
    std::vector<Placed> placed(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = layout.turbines[i];
        placed[i] = {i, t.x_m * cs + t.y_m * sn, -t.x_m * sn + t.y_m * cs};
    }
    std::sort(placed.begin(), placed.end(), [&](const Placed& a, const Placed& b) {
        if (a.xw != b.xw) return a.xw < b.xw;
        return layout.turbines[a.index].id < layout.turbines[b.index].id;
    });

    FarmOutput out;
    out.per_turbine_power_mw.assign(n, 0.0);
    out.per_turbine_speed_mps.assign(n, 0.0);

    for (std::size_t j = 0; j < n; ++j) {
        double deficit_sq = 0.0;
        if (include_wake) {
            for (std::size_t i = 0; i < j; ++i) {
                const auto& up = placed[i];
                const double delta = wake_deficit(layout.turbines[up.index],
                                                  induction.alphas[up.index],
                                                  placed[j].xw - up.xw,
                                                  placed[j].yw - up.yw,
                                                  layout.wake_expansion);
                deficit_sq += delta * delta;
            }
        }
        const double deficit = std::min(std::sqrt(deficit_sq), 1.0);
        const std::size_t idx = placed[j].index;
        const double incident = free_stream_mps * (1.0 - deficit);
        out.per_turbine_speed_mps[idx] = incident;
        out.per_turbine_power_mw[idx] =
            turbine_power_mw(layout.turbines[idx], incident, induction.alphas[idx],
                             layout.air_density, layout.power_scale);
        out.total_power_mw += out.per_turbine_power_mw[idx];
    }
    return out;
}

} // namespace wsis::farm

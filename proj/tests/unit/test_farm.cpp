#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wsis/errors.hpp"
#include "wsis/farm.hpp"

using namespace wsis;

namespace {

farm::TurbineSpec prototype() {
    farm::TurbineSpec t;
    t.rotor_diameter_m = 100.0;
    t.cut_in_mps = 3.0;
    t.cut_out_mps = 25.0;
    return t;
}

farm::FarmLayout row(int count, double power_scale = 1.0) {
    return farm::FarmLayout::linear_row(count, 5.0, prototype(), 0.08, 1.2, power_scale);
}

} // namespace

TEST_CASE("power coefficient peaks at one third with zero yaw") {
    CHECK(farm::power_coefficient(1.0 / 3.0, 0.0) == doctest::Approx(16.0 / 27.0).epsilon(1e-12));
    CHECK(farm::power_coefficient(0.0, 0.0) == 0.0);
    CHECK(farm::power_coefficient(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("power coefficient at the yawed optimum matches the closed form") {
    for (const double yaw : {0.0, 0.1, 0.3, -0.25}) {
        const double c = std::cos(yaw);
        const double at_optimum = farm::power_coefficient(c / 3.0, yaw);
        CHECK(at_optimum == doctest::Approx(16.0 * c * c * c / 27.0).epsilon(1e-12));
        // Neighbouring grid points must not beat the analytic optimum.
        CHECK(farm::power_coefficient(c / 3.0 + 1e-4, yaw) <= at_optimum);
        CHECK(farm::power_coefficient(c / 3.0 - 1e-4, yaw) <= at_optimum);
    }
}

TEST_CASE("power coefficient rejects out-of-domain inputs") {
    CHECK_THROWS_AS(farm::power_coefficient(-0.01, 0.0), ContractError);
    CHECK_THROWS_AS(farm::power_coefficient(0.51, 0.0), ContractError);
    CHECK_THROWS_AS(farm::power_coefficient(0.3, std::numbers::pi / 2.0), ContractError);
}

TEST_CASE("turbine power matches the actuator-disk arithmetic") {
    // 0.5 * 1.2 * pi * 50^2 * (16/27) * 8^3 * 1e-6, no derating.
    const double expected = 0.5 * 1.2 * std::numbers::pi * 2500.0 * (16.0 / 27.0) * 512.0 * 1e-6;
    const double got = farm::turbine_power_mw(prototype(), 8.0, 1.0 / 3.0, 1.2, 1.0);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
    CHECK(got == doctest::Approx(1.4297737).epsilon(1e-6));

    // Derating scales linearly.
    CHECK(farm::turbine_power_mw(prototype(), 8.0, 1.0 / 3.0, 1.2, 0.95) ==
          doctest::Approx(0.95 * expected).epsilon(1e-12));
}

TEST_CASE("turbine power honours the operating envelope") {
    const auto t = prototype();
    CHECK(farm::turbine_power_mw(t, 2.999, 1.0 / 3.0, 1.2, 1.0) == 0.0);
    CHECK(farm::turbine_power_mw(t, 3.0, 1.0 / 3.0, 1.2, 1.0) > 0.0);
    CHECK(farm::turbine_power_mw(t, 25.0, 1.0 / 3.0, 1.2, 1.0) > 0.0);
    CHECK(farm::turbine_power_mw(t, 25.001, 1.0 / 3.0, 1.2, 1.0) == 0.0);
    CHECK_THROWS_AS(farm::turbine_power_mw(t, -1.0, 0.3, 1.2, 1.0), ContractError);
}

TEST_CASE("wake deficit matches the cone formula five diameters downstream") {
    const auto t = prototype();
    // 2a / (1 + 2 k dx / D)^2 with a=1/3, k=0.08, dx=500, D=100.
    const double expected = (2.0 / 3.0) / (1.8 * 1.8);
    CHECK(farm::wake_deficit(t, 1.0 / 3.0, 500.0, 0.0, 0.08) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(farm::wake_deficit(t, 1.0 / 3.0, 500.0, 0.0, 0.08) ==
          doctest::Approx(0.205761316872428).epsilon(1e-12));
}

TEST_CASE("wake deficit vanishes upwind and outside the cone") {
    const auto t = prototype();
    CHECK(farm::wake_deficit(t, 0.3, 0.0, 0.0, 0.08) == 0.0);
    CHECK(farm::wake_deficit(t, 0.3, -100.0, 0.0, 0.08) == 0.0);
    // Cone half-width at dx=500 is (100 + 2*0.08*500)/2 = 90 m, inclusive.
    CHECK(farm::wake_deficit(t, 0.3, 500.0, 90.0, 0.08) > 0.0);
    CHECK(farm::wake_deficit(t, 0.3, 500.0, -90.0, 0.08) > 0.0);
    CHECK(farm::wake_deficit(t, 0.3, 500.0, 90.0001, 0.08) == 0.0);
    CHECK(farm::wake_deficit(t, 0.0, 500.0, 0.0, 0.08) == 0.0);
}

TEST_CASE("linear_row spaces turbines along +x") {
    const auto layout = row(3);
    REQUIRE(layout.turbines.size() == 3);
    CHECK(layout.turbines[0].x_m == 0.0);
    CHECK(layout.turbines[1].x_m == 500.0);
    CHECK(layout.turbines[2].x_m == 1000.0);
    CHECK(layout.turbines[1].y_m == 0.0);
    CHECK(layout.turbines[2].id == 2);
    CHECK_NOTHROW(layout.validate());
}

TEST_CASE("layout validation rejects duplicates") {
    auto layout = row(2);
    layout.turbines[1].id = 0;
    CHECK_THROWS_AS(layout.validate(), ConfigError);
    auto layout2 = row(2);
    layout2.turbines[1].x_m = 0.0;
    CHECK_THROWS_AS(layout2.validate(), ConfigError);
}

TEST_CASE("aligned pair sees the single-wake incident speed downstream") {
    const auto layout = row(2);
    farm::InductionVector induction{{1.0 / 3.0, 1.0 / 3.0}};
    const auto out = farm::farm_step(layout, 8.0, 0.0, induction, true);
    REQUIRE(out.per_turbine_speed_mps.size() == 2);
    CHECK(out.per_turbine_speed_mps[0] == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(out.per_turbine_speed_mps[1] ==
          doctest::Approx(8.0 * (1.0 - 0.205761316872428)).epsilon(1e-12));
    CHECK(out.per_turbine_speed_mps[1] == doctest::Approx(6.3539094650206).epsilon(1e-10));

    const double p0 = farm::turbine_power_mw(layout.turbines[0], out.per_turbine_speed_mps[0],
                                             1.0 / 3.0, 1.2, 1.0);
    const double p1 = farm::turbine_power_mw(layout.turbines[1], out.per_turbine_speed_mps[1],
                                             1.0 / 3.0, 1.2, 1.0);
    CHECK(out.total_power_mw == doctest::Approx(p0 + p1).epsilon(1e-12));
}

TEST_CASE("multiple upstream wakes combine by root-sum-of-squares") {
    const auto layout = row(3);
    farm::InductionVector induction{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    const auto out = farm::farm_step(layout, 10.0, 0.0, induction, true);

    const double d_near = (2.0 / 3.0) / (1.8 * 1.8);                   // 500 m upstream
    const double d_far = (2.0 / 3.0) / (2.6 * 2.6);                    // 1000 m upstream
    const double expected_deficit = std::hypot(d_near, d_far);
    CHECK(out.per_turbine_speed_mps[2] ==
          doctest::Approx(10.0 * (1.0 - expected_deficit)).epsilon(1e-12));
}

TEST_CASE("farm output is invariant to turbine listing order") {
    auto layout = row(3);
    farm::InductionVector induction{{0.1, 0.25, 0.4}};
    const auto base = farm::farm_step(layout, 9.0, 0.4, induction, true);

    auto shuffled = layout;
    std::swap(shuffled.turbines[0], shuffled.turbines[2]);
    farm::InductionVector shuffled_induction{{0.4, 0.25, 0.1}};
    const auto got = farm::farm_step(shuffled, 9.0, 0.4, shuffled_induction, true);

    CHECK(got.total_power_mw == doctest::Approx(base.total_power_mw).epsilon(1e-12));
    CHECK(got.per_turbine_power_mw[0] ==
          doctest::Approx(base.per_turbine_power_mw[2]).epsilon(1e-12));
    CHECK(got.per_turbine_power_mw[2] ==
          doctest::Approx(base.per_turbine_power_mw[0]).epsilon(1e-12));
}

TEST_CASE("reversing the wind reverses the wake roles symmetrically") {
    const auto layout = row(2);
    farm::InductionVector induction{{0.3, 0.3}};
    const auto downwind = farm::farm_step(layout, 8.0, 0.0, induction, true);
    const auto upwind = farm::farm_step(layout, 8.0, std::numbers::pi, induction, true);
    CHECK(downwind.total_power_mw == doctest::Approx(upwind.total_power_mw).epsilon(1e-12));
    CHECK(downwind.per_turbine_power_mw[0] ==
          doctest::Approx(upwind.per_turbine_power_mw[1]).epsilon(1e-12));
}

TEST_CASE("crosswind rows do not shadow each other") {
    const auto layout = row(2);
    farm::InductionVector induction{{1.0 / 3.0, 1.0 / 3.0}};
    const auto out = farm::farm_step(layout, 8.0, std::numbers::pi / 2.0, induction, true);
    CHECK(out.per_turbine_speed_mps[0] == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(out.per_turbine_speed_mps[1] == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("disabling the wake evaluates every rotor at free stream") {
    const auto layout = row(3);
    farm::InductionVector induction{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    const auto out = farm::farm_step(layout, 8.0, 0.0, induction, false);
    for (const double s : out.per_turbine_speed_mps) CHECK(s == 8.0);
    const double single = farm::turbine_power_mw(layout.turbines[0], 8.0, 1.0 / 3.0, 1.2, 1.0);
    CHECK(out.total_power_mw == doctest::Approx(3.0 * single).epsilon(1e-12));
}

TEST_CASE("farm_step validates the induction vector length") {
    const auto layout = row(2);
    farm::InductionVector wrong{{0.3}};
    CHECK_THROWS_AS(farm::farm_step(layout, 8.0, 0.0, wrong, true), ContractError);
}

TEST_CASE("deep wake deficits are clamped before going negative") {
    // Many tightly packed rotors at maximum induction: the RSS sum exceeds 1
    // and must clamp, never producing a negative incident speed.
    auto proto = prototype();
    auto layout = farm::FarmLayout::linear_row(8, 0.5, proto, 0.08, 1.2, 1.0);
    farm::InductionVector induction{std::vector<double>(8, 0.5)};
    const auto out = farm::farm_step(layout, 10.0, 0.0, induction, true);
    for (const double s : out.per_turbine_speed_mps) CHECK(s >= 0.0);
}

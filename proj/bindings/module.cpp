#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wsis/agents.hpp"
#include "wsis/bess.hpp"
#include "wsis/config.hpp"
#include "wsis/errors.hpp"
#include "wsis/farm.hpp"
#include "wsis/mdp.hpp"
#include "wsis/metrics.hpp"
#include "wsis/mpc.hpp"
#include "wsis/rng.hpp"
#include "wsis/runner.hpp"
#include "wsis/winddata.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

PYBIND11_MODULE(_wsis, m) {
    m.doc() = "Wind-plus-storage system simulator with hierarchical learning control";

    py::register_exception<wsis::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<wsis::IngestionError>(m, "IngestionError", PyExc_ValueError);
    py::register_exception<wsis::ContractError>(m, "ContractError", PyExc_RuntimeError);

    // ---- farm ----
    py::class_<wsis::farm::TurbineSpec>(m, "TurbineSpec")
        .def(py::init<>())
        .def_readwrite("id", &wsis::farm::TurbineSpec::id)
        .def_readwrite("x_m", &wsis::farm::TurbineSpec::x_m)
        .def_readwrite("y_m", &wsis::farm::TurbineSpec::y_m)
        .def_readwrite("rotor_diameter_m", &wsis::farm::TurbineSpec::rotor_diameter_m)
        .def_readwrite("yaw_rad", &wsis::farm::TurbineSpec::yaw_rad)
        .def_readwrite("cut_in_mps", &wsis::farm::TurbineSpec::cut_in_mps)
        .def_readwrite("cut_out_mps", &wsis::farm::TurbineSpec::cut_out_mps);

    py::class_<wsis::farm::FarmLayout>(m, "FarmLayout")
        .def(py::init<>())
        .def_readwrite("turbines", &wsis::farm::FarmLayout::turbines)
        .def_readwrite("wake_expansion", &wsis::farm::FarmLayout::wake_expansion)
        .def_readwrite("air_density", &wsis::farm::FarmLayout::air_density)
        .def_readwrite("power_scale", &wsis::farm::FarmLayout::power_scale)
        .def_static("linear_row", &wsis::farm::FarmLayout::linear_row, "count"_a,
                    "spacing_diameters"_a, "prototype"_a = wsis::farm::TurbineSpec{},
                    "wake_expansion"_a = 0.08, "air_density"_a = 1.2, "power_scale"_a = 0.95);

    py::class_<wsis::farm::FarmOutput>(m, "FarmOutput")
        .def_readonly("per_turbine_power_mw", &wsis::farm::FarmOutput::per_turbine_power_mw)
        .def_readonly("per_turbine_speed_mps", &wsis::farm::FarmOutput::per_turbine_speed_mps)
        .def_readonly("total_power_mw", &wsis::farm::FarmOutput::total_power_mw);

    m.def("power_coefficient", &wsis::farm::power_coefficient, "alpha"_a, "yaw_rad"_a = 0.0);
    m.def("turbine_power_mw", &wsis::farm::turbine_power_mw, "spec"_a, "incident_speed_mps"_a,
          "alpha"_a, "air_density"_a = 1.2, "power_scale"_a = 0.95);
    m.def("wake_deficit", &wsis::farm::wake_deficit, "upstream"_a, "alpha"_a, "dx_m"_a, "dy_m"_a,
          "wake_expansion"_a = 0.08);
    m.def(
        "farm_step",
        [](const wsis::farm::FarmLayout& layout, double speed, double direction,
           const std::vector<double>& alphas, bool include_wake) {
            return wsis::farm::farm_step(layout, speed, direction,
                                         wsis::farm::InductionVector{alphas}, include_wake);
        },
        "layout"_a, "free_stream_mps"_a, "direction_rad"_a, "alphas"_a, "include_wake"_a = true);

    // ---- battery ----
    py::class_<wsis::bess::BatteryParams>(m, "BatteryParams")
        .def(py::init<>())
        .def_readwrite("capacity_mwh", &wsis::bess::BatteryParams::capacity_mwh)
        .def_readwrite("e_min_mwh", &wsis::bess::BatteryParams::e_min_mwh)
        .def_readwrite("e_max_mwh", &wsis::bess::BatteryParams::e_max_mwh)
        .def_readwrite("p_charge_max_mw", &wsis::bess::BatteryParams::p_charge_max_mw)
        .def_readwrite("p_discharge_max_mw", &wsis::bess::BatteryParams::p_discharge_max_mw)
        .def_readwrite("eta_charge", &wsis::bess::BatteryParams::eta_charge)
        .def_readwrite("eta_discharge", &wsis::bess::BatteryParams::eta_discharge)
        .def_readwrite("replacement_cost_usd", &wsis::bess::BatteryParams::replacement_cost_usd)
        .def_readwrite("lifetime_throughput_kwh",
                       &wsis::bess::BatteryParams::lifetime_throughput_kwh)
        .def_readwrite("roundtrip_sqrt", &wsis::bess::BatteryParams::roundtrip_sqrt)
        .def_readwrite("k_deg_usd_per_kwh", &wsis::bess::BatteryParams::k_deg_usd_per_kwh)
        .def("degradation_rate", &wsis::bess::BatteryParams::degradation_rate);

    py::class_<wsis::bess::BatteryState>(m, "BatteryState")
        .def(py::init<>())
        .def_readwrite("energy_mwh", &wsis::bess::BatteryState::energy_mwh)
        .def_readwrite("minute", &wsis::bess::BatteryState::minute);

    py::class_<wsis::bess::StepResult>(m, "BatteryStepResult")
        .def_readonly("state", &wsis::bess::StepResult::state)
        .def_readonly("degradation_cost_usd", &wsis::bess::StepResult::degradation_cost_usd);

    py::class_<wsis::bess::PowerBounds>(m, "PowerBounds")
        .def_readonly("low_mw", &wsis::bess::PowerBounds::low_mw)
        .def_readonly("high_mw", &wsis::bess::PowerBounds::high_mw);

    m.def("degradation_coefficient", &wsis::bess::degradation_coefficient, "params"_a);
    m.def("lifetime_throughput_kwh", &wsis::bess::lifetime_throughput_kwh, "dod_cycles"_a,
          "e_max_mwh"_a);
    m.def("battery_step", &wsis::bess::step, "state"_a, "params"_a, "p_b_mw"_a,
          "dt_hours"_a = 1.0 / 60.0);
    m.def("feasible_power_bounds", &wsis::bess::feasible_power_bounds, "state"_a, "params"_a,
          "dt_hours"_a = 1.0 / 60.0);

    // ---- wind ----
    py::class_<wsis::winddata::WindSample>(m, "WindSample")
        .def(py::init<>())
        .def_readwrite("minute", &wsis::winddata::WindSample::minute)
        .def_readwrite("speed_mps", &wsis::winddata::WindSample::speed_mps)
        .def_readwrite("direction_rad", &wsis::winddata::WindSample::direction_rad);

    py::class_<wsis::winddata::WindSeries>(m, "WindSeries")
        .def(py::init<>())
        .def_readwrite("samples", &wsis::winddata::WindSeries::samples)
        .def_readwrite("resolution_minutes", &wsis::winddata::WindSeries::resolution_minutes);

    py::class_<wsis::winddata::ScenarioSpec>(m, "ScenarioSpec")
        .def(py::init<>())
        .def_readwrite("name", &wsis::winddata::ScenarioSpec::name)
        .def_readwrite("duration_minutes", &wsis::winddata::ScenarioSpec::duration_minutes)
        .def_readwrite("generator", &wsis::winddata::ScenarioSpec::generator)
        .def_readwrite("seed", &wsis::winddata::ScenarioSpec::seed)
        .def_readwrite("mean_mps", &wsis::winddata::ScenarioSpec::mean_mps)
        .def_readwrite("volatility_mps", &wsis::winddata::ScenarioSpec::volatility_mps)
        .def_readwrite("sequence", &wsis::winddata::ScenarioSpec::sequence)
        .def_readwrite("csv_path", &wsis::winddata::ScenarioSpec::csv_path);

    m.def("interpolate_to_minutes", &wsis::winddata::interpolate_to_minutes, "series"_a);
    m.def("synthesize_wind", &wsis::winddata::synthesize, "spec"_a, "stream_index"_a = 0);
    m.def("realize_wind", &wsis::winddata::realize, "spec"_a);
    m.def("load_wind_csv", &wsis::winddata::load_csv, "path"_a);
    m.def("write_wind_csv", &wsis::winddata::write_csv, "series"_a, "path"_a);

    // ---- environment ----
    py::class_<wsis::mdp::EnvConfig>(m, "EnvConfig")
        .def(py::init<>())
        .def_readwrite("control_period", &wsis::mdp::EnvConfig::control_period)
        .def_readwrite("dt_hours", &wsis::mdp::EnvConfig::dt_hours)
        .def_readwrite("price", &wsis::mdp::EnvConfig::price)
        .def_readwrite("fluct_threshold_mw", &wsis::mdp::EnvConfig::fluct_threshold_mw)
        .def_readwrite("kappa", &wsis::mdp::EnvConfig::kappa)
        .def_readwrite("beta1", &wsis::mdp::EnvConfig::beta1)
        .def_readwrite("beta2", &wsis::mdp::EnvConfig::beta2)
        .def_readwrite("nu", &wsis::mdp::EnvConfig::nu)
        .def_readwrite("gamma", &wsis::mdp::EnvConfig::gamma)
        .def_readwrite("episode_minutes", &wsis::mdp::EnvConfig::episode_minutes)
        .def_readwrite("include_soc_in_lower_state",
                       &wsis::mdp::EnvConfig::include_soc_in_lower_state)
        .def_readwrite("wake_enabled", &wsis::mdp::EnvConfig::wake_enabled)
        .def_readwrite("degradation_in_reward", &wsis::mdp::EnvConfig::degradation_in_reward);

    py::class_<wsis::mdp::UpperState>(m, "UpperState")
        .def_readonly("u_inf_mps", &wsis::mdp::UpperState::u_inf_mps)
        .def_readonly("direction_rad", &wsis::mdp::UpperState::direction_rad)
        .def_readonly("price", &wsis::mdp::UpperState::price);

    py::class_<wsis::mdp::LowerState>(m, "LowerState")
        .def_readonly("upper", &wsis::mdp::LowerState::upper)
        .def_readonly("prev_grid_power_mw", &wsis::mdp::LowerState::prev_grid_power_mw)
        .def_readonly("signal_mw", &wsis::mdp::LowerState::signal_mw)
        .def_readonly("soc", &wsis::mdp::LowerState::soc);

    py::class_<wsis::mdp::GridRecord>(m, "GridRecord")
        .def_readonly("minute", &wsis::mdp::GridRecord::minute)
        .def_readonly("p_w_mw", &wsis::mdp::GridRecord::p_w_mw)
        .def_readonly("p_b_mw", &wsis::mdp::GridRecord::p_b_mw)
        .def_readonly("p_g_mw", &wsis::mdp::GridRecord::p_g_mw)
        .def_readonly("p_fg_mw", &wsis::mdp::GridRecord::p_fg_mw)
        .def_readonly("p_vg_mw", &wsis::mdp::GridRecord::p_vg_mw)
        .def_readonly("degradation_cost", &wsis::mdp::GridRecord::degradation_cost)
        .def_readonly("revenue", &wsis::mdp::GridRecord::revenue)
        .def_readonly("r_u", &wsis::mdp::GridRecord::r_u)
        .def_readonly("r_l", &wsis::mdp::GridRecord::r_l);

    py::class_<wsis::mdp::Trajectory>(m, "Trajectory")
        .def_readonly("records", &wsis::mdp::Trajectory::records)
        .def_readonly("wind_mps", &wsis::mdp::Trajectory::wind_mps)
        .def_readonly("applied_alphas", &wsis::mdp::Trajectory::applied_alphas)
        .def_readonly("battery_energy_mwh", &wsis::mdp::Trajectory::battery_energy_mwh);

    py::class_<wsis::mdp::StepOutcome>(m, "StepOutcome")
        .def_readonly("record", &wsis::mdp::StepOutcome::record)
        .def_readonly("g_l", &wsis::mdp::StepOutcome::g_l)
        .def_readonly("done", &wsis::mdp::StepOutcome::done)
        .def_readonly("window_closed", &wsis::mdp::StepOutcome::window_closed)
        .def_readonly("window_reward", &wsis::mdp::StepOutcome::window_reward)
        .def_readonly("next_upper", &wsis::mdp::StepOutcome::next_upper)
        .def_readonly("next_lower", &wsis::mdp::StepOutcome::next_lower)
        .def_readonly("p_g_prev_used", &wsis::mdp::StepOutcome::p_g_prev_used);

    py::class_<wsis::mdp::Environment>(m, "Environment")
        .def(py::init<wsis::farm::FarmLayout, wsis::bess::BatteryParams, wsis::mdp::EnvConfig,
                      wsis::winddata::WindSeries, double>(),
             "layout"_a, "battery"_a, "config"_a, "series"_a, "initial_soc_frac"_a = 0.5)
        .def("reset", py::overload_cast<>(&wsis::mdp::Environment::reset))
        .def("reset", py::overload_cast<wsis::winddata::WindSeries>(&wsis::mdp::Environment::reset),
             "series"_a)
        .def("done", &wsis::mdp::Environment::done)
        .def("minute", &wsis::mdp::Environment::minute)
        .def("episode_length", &wsis::mdp::Environment::episode_length)
        .def("upper_decision_due", &wsis::mdp::Environment::upper_decision_due)
        .def("apply_upper", &wsis::mdp::Environment::apply_upper, "raw_alphas"_a)
        .def("lower_state", &wsis::mdp::Environment::lower_state)
        .def("step", &wsis::mdp::Environment::step, "raw_p_b_mw"_a)
        .def("upper_state", &wsis::mdp::Environment::upper_state)
        .def("trajectory", &wsis::mdp::Environment::trajectory)
        .def("battery", &wsis::mdp::Environment::battery);

    m.def("write_trajectory_csv", &wsis::mdp::write_trajectory_csv, "trajectory"_a,
          "control_period"_a, "path"_a);

    // ---- metrics ----
    py::class_<wsis::metrics::EpisodeSummary>(m, "EpisodeSummary")
        .def_readonly("total_profit", &wsis::metrics::EpisodeSummary::total_profit)
        .def_readonly("fs", &wsis::metrics::EpisodeSummary::fs)
        .def_readonly("vo", &wsis::metrics::EpisodeSummary::vo)
        .def_readonly("revenue", &wsis::metrics::EpisodeSummary::revenue)
        .def_readonly("degradation_total", &wsis::metrics::EpisodeSummary::degradation_total)
        .def_readonly("minutes", &wsis::metrics::EpisodeSummary::minutes);

    m.def("total_profit", &wsis::metrics::total_profit, "records"_a);
    m.def("fluctuation_severity", &wsis::metrics::fluctuation_severity, "records"_a);
    m.def("violation_occurrence", &wsis::metrics::violation_occurrence, "records"_a,
          "threshold_mw"_a);
    m.def("summarize", &wsis::metrics::summarize, "records"_a, "threshold_mw"_a);

    // ---- model-predictive baseline ----
    py::class_<wsis::mpc::MpcConfig>(m, "MpcConfig")
        .def(py::init<>())
        .def_readwrite("horizon_minutes", &wsis::mpc::MpcConfig::horizon_minutes)
        .def_readwrite("induction_grid_resolution",
                       &wsis::mpc::MpcConfig::induction_grid_resolution)
        .def_readwrite("battery_search_resolution",
                       &wsis::mpc::MpcConfig::battery_search_resolution);

    m.def(
        "optimize_induction",
        [](const wsis::farm::FarmLayout& layout,
           const std::vector<wsis::winddata::WindSample>& forecast, double grid_resolution) {
            return wsis::mpc::optimize_induction(layout, forecast, grid_resolution).alphas;
        },
        "layout"_a, "forecast"_a, "grid_resolution"_a = 1e-3);
    m.def(
        "schedule_battery",
        [](double p_w, double p_g_prev, const wsis::bess::BatteryState& state,
           const wsis::bess::BatteryParams& params, const wsis::mdp::EnvConfig& cfg,
           double resolution, int horizon) {
            const auto d = wsis::mpc::schedule_battery(p_w, p_g_prev, state, params, cfg,
                                                       resolution, horizon);
            return py::make_tuple(d.p_b_mw, d.infeasible_bounds);
        },
        "p_w_mw"_a, "p_g_prev_mw"_a, "state"_a, "params"_a, "config"_a, "resolution_mw"_a = 0.25,
        "horizon"_a = 1);
    m.def("run_mpc_episode", &wsis::mpc::run_mpc_episode, "env"_a, "config"_a);

    // ---- configuration and experiment commands ----
    py::class_<wsis::config::RunConfig>(m, "RunConfig")
        .def(py::init(&wsis::config::default_config))
        .def_readwrite("method", &wsis::config::RunConfig::method)
        .def_readwrite("seeds", &wsis::config::RunConfig::seeds)
        .def_readwrite("episodes", &wsis::config::RunConfig::episodes)
        .def_readwrite("output_dir", &wsis::config::RunConfig::output_dir)
        .def("validate", &wsis::config::RunConfig::validate)
        .def("to_json", [](const wsis::config::RunConfig& c) { return wsis::config::to_json(c); })
        .def("apply_json",
             [](wsis::config::RunConfig& c, const std::string& text) {
                 wsis::config::apply_json(c, text);
             })
        .def("apply_preset", [](wsis::config::RunConfig& c, const std::string& preset) {
            wsis::config::apply_preset(c, preset);
        });

    m.def("default_config", &wsis::config::default_config);
    m.def("load_config", &wsis::config::load_config, "path"_a);
    m.def("config_hash", &wsis::config::config_hash, "config"_a);
    m.def("with_value", &wsis::config::with_value, "config"_a, "dotted_path"_a, "value"_a);

    m.def("cmd_train", &wsis::runner::cmd_train, "config"_a);
    m.def("cmd_evaluate", &wsis::runner::cmd_evaluate, "config"_a);
    m.def("cmd_compare", &wsis::runner::cmd_compare, "configs"_a);
    m.def("cmd_sweep", &wsis::runner::cmd_sweep, "config"_a);
    m.def("cmd_synth_wind", &wsis::runner::cmd_synth_wind, "config"_a);
}

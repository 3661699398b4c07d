#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wsis::winddata {

struct WindSample {
    int minute = 0;
    double speed_mps = 0.0;
    double direction_rad = 0.0;
};

struct WindSeries {
    std::vector<WindSample> samples;
    int resolution_minutes = 1;

    void validate() const; // strictly increasing minutes, non-negative speeds
};

// Named scenario: where the wind comes from and how long it runs.  Synthetic
// generators draw a mean-reverting random walk; fixed-sequence replays the
// literal `sequence`; file reads `csv_path`.
struct ScenarioSpec {
    std::string name = "scenario";
    int duration_minutes = 1440;
    std::string generator = "synthetic-moderate";
    std::uint64_t seed = 0;
    std::optional<double> mean_mps;       // generator default when unset
    std::optional<double> volatility_mps; // stationary std dev around the mean
    std::vector<double> sequence;         // fixed-sequence literal values
    std::string csv_path;                 // file generator

    void validate() const;
};

// Expand a coarse series to 1-minute resolution: linear in speed, shorter-arc
// linear in direction, original sample points preserved exactly.  A 1-minute
// series passes through unchanged.
WindSeries interpolate_to_minutes(const WindSeries& series);

// Deterministic series for a scenario.  Synthetic generators: start at the
// mean, then s' = clip(s + rate*(mean - s) + sigma*g, 0, 30) per minute with
// reversion rate 0.15 and sigma chosen so the stationary std dev equals the
// configured volatility.  An optional stream index selects an independent
// draw of the same scenario (used for per-episode training data).
WindSeries synthesize(const ScenarioSpec& spec, std::uint64_t stream_index = 0);

// Resolve a scenario to its evaluation series: file scenarios load (and
// interpolate if coarser than 1 minute), everything else synthesizes.
WindSeries realize(const ScenarioSpec& spec);

WindSeries load_csv(const std::filesystem::path& path);
void write_csv(const WindSeries& series, const std::filesystem::path& path);

} // namespace wsis::winddata

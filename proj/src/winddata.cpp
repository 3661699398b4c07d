#include "wsis/winddata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wsis/errors.hpp"
#include "wsis/rng.hpp"
#include "wsis/textio.hpp"

namespace wsis::winddata {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kSpeedCeiling = 30.0; // m/s, synthesis clip
constexpr double kReversionRate = 0.15; // per minute

// Wrap an angle difference onto (-pi, pi] so interpolation takes the
// shorter arc.
double wrap_angle(double x) {
    double w = std::remainder(x, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

struct GeneratorDefaults {
    double mean;
    double volatility;
};

GeneratorDefaults generator_defaults(const std::string& generator) {
    if (generator == "synthetic-low") return {4.2, 1.2};
    if (generator == "synthetic-moderate") return {9.0, 1.4};
    if (generator == "synthetic-high") return {14.0, 1.8};
    throw ConfigError("unknown wind generator '" + generator + "'");
}

} // namespace

void WindSeries::validate() const {
    if (resolution_minutes < 1) throw ConfigError("wind series resolution must be >= 1 minute");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].speed_mps < 0.0)
            throw ConfigError("wind speed must be non-negative at sample " + std::to_string(i));
        if (i > 0 && samples[i].minute <= samples[i - 1].minute)
            throw ConfigError("wind sample minutes must be strictly increasing at sample " +
                              std::to_string(i));
    }
}

void ScenarioSpec::validate() const {
    if (duration_minutes <= 0) throw ConfigError("scenario duration must be positive");
    if (generator == "fixed-sequence") {
        if (sequence.empty())
            throw ConfigError("fixed-sequence scenario '" + name + "' needs a sequence");
    } else if (generator == "file") {
        if (csv_path.empty())
            throw ConfigError("file scenario '" + name + "' needs csv_path");
    } else {
        (void)generator_defaults(generator); // throws on unknown names
    }
    if (volatility_mps && *volatility_mps < 0.0)
        throw ConfigError("scenario volatility must be non-negative");
    if (mean_mps && *mean_mps < 0.0) throw ConfigError("scenario mean speed must be non-negative");
}

WindSeries interpolate_to_minutes(const WindSeries& series) {
    series.validate();
    if (series.resolution_minutes == 1) return series;
    if (series.samples.size() < 2)
        throw IngestionError("need at least 2 samples to interpolate");

    WindSeries out;
    out.resolution_minutes = 1;
    for (std::size_t i = 0; i + 1 < series.samples.size(); ++i) {
        const WindSample& a = series.samples[i];
        const WindSample& b = series.samples[i + 1];
        const int span = b.minute - a.minute;
        const double dir_delta = wrap_angle(b.direction_rad - a.direction_rad);
        for (int m = a.minute; m < b.minute; ++m) {
            const double frac = static_cast<double>(m - a.minute) / span;
            out.samples.push_back({m,
                                   a.speed_mps + frac * (b.speed_mps - a.speed_mps),
                                   a.direction_rad + frac * dir_delta});
        }
    }
    out.samples.push_back(series.samples.back());
    return out;
}

WindSeries synthesize(const ScenarioSpec& spec, std::uint64_t stream_index) {
    spec.validate();
    WindSeries out;
    out.resolution_minutes = 1;

    if (spec.generator == "fixed-sequence") {
        out.samples.reserve(spec.sequence.size());
        for (std::size_t i = 0; i < spec.sequence.size(); ++i)
            out.samples.push_back({static_cast<int>(i), spec.sequence[i], 0.0});
        return out;
    }
    if (spec.generator == "file")
        throw ConfigError("file scenario '" + spec.name + "' cannot be synthesized");

    const GeneratorDefaults defs = generator_defaults(spec.generator);
    const double mean = spec.mean_mps.value_or(defs.mean);
    const double volatility = spec.volatility_mps.value_or(defs.volatility);
    // Innovation scaled so the stationary std dev of the walk equals the
    // configured volatility: var = sigma^2 / (rate * (2 - rate)).
    const double sigma = volatility * std::sqrt(kReversionRate * (2.0 - kReversionRate));

    Rng rng = Rng::stream(spec.seed, "wind-synth", stream_index);
    double speed = std::clamp(mean, 0.0, kSpeedCeiling);
    out.samples.reserve(static_cast<std::size_t>(spec.duration_minutes));
    for (int m = 0; m < spec.duration_minutes; ++m) {
        out.samples.push_back({m, speed, 0.0});
        speed = std::clamp(speed + kReversionRate * (mean - speed) + sigma * rng.gaussian(),
                           0.0, kSpeedCeiling);
    }
    return out;
}

WindSeries realize(const ScenarioSpec& spec) {
    spec.validate();
    if (spec.generator == "file") {
        WindSeries series = load_csv(spec.csv_path);
        if (series.resolution_minutes > 1) series = interpolate_to_minutes(series);
        return series;
    }
    return synthesize(spec, 0);
}

WindSeries load_csv(const std::filesystem::path& path) {
    const std::string content = textio::read_file(path);
    const auto all_lines = textio::lines(content);

    WindSeries out;
    std::size_t row_number = 0; // 1-based over data rows
    bool header_seen = false;
    for (std::size_t i = 0; i < all_lines.size(); ++i) {
        const auto line = all_lines[i];
        if (line.empty()) continue;
        if (i == 0 && line.rfind("minute", 0) == 0) {
            header_seen = true;
            const auto cols = textio::split(line, ',');
            if (cols.size() < 2 || cols[0] != "minute" || cols[1] != "speed_mps" ||
                (cols.size() == 3 && cols[2] != "direction_deg") || cols.size() > 3)
                throw IngestionError("bad wind CSV header in " + path.string());
            continue;
        }
        ++row_number;
        const auto cols = textio::split(line, ',');
        if (cols.size() < 2 || cols.size() > 3)
            throw IngestionError("row " + std::to_string(row_number) + ": expected 2-3 columns");
        try {
            WindSample s;
            s.minute = static_cast<int>(textio::parse_int(cols[0]));
            s.speed_mps = textio::parse_double(cols[1]);
            s.direction_rad = cols.size() == 3 ? textio::parse_double(cols[2]) * kDegToRad : 0.0;
            out.samples.push_back(s);
        } catch (const IngestionError& e) {
            throw IngestionError("row " + std::to_string(row_number) + ": " + e.what());
        }
        const std::size_t n = out.samples.size();
        if (n > 1 && out.samples[n - 1].minute <= out.samples[n - 2].minute)
            throw IngestionError("row " + std::to_string(row_number) +
                                 ": minute not strictly increasing");
    }
    (void)header_seen;
    if (out.samples.size() >= 2)
        out.resolution_minutes = out.samples[1].minute - out.samples[0].minute;
    out.validate();
    return out;
}

void write_csv(const WindSeries& series, const std::filesystem::path& path) {
    series.validate();
    const bool with_direction =
        std::any_of(series.samples.begin(), series.samples.end(),
                    [](const WindSample& s) { return s.direction_rad != 0.0; });
    std::string body = with_direction ? "minute,speed_mps,direction_deg\n" : "minute,speed_mps\n";
    for (const auto& s : series.samples) {
        body += std::to_string(s.minute);
        body += ',';
        body += textio::format_double(s.speed_mps);
        if (with_direction) {
            body += ',';
            // Divide by the loader's multiply constant so load(write(load(x)))
            // reproduces values exactly on round degree numbers.
            body += textio::format_double(s.direction_rad / kDegToRad);
        }
        body += '\n';
    }
    textio::write_file(path, body);
}

} // namespace wsis::winddata

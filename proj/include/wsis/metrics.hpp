#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wsis/mdp.hpp"

namespace wsis::metrics {

struct EpisodeSummary {
    double total_profit = 0.0;
    double fs = 0.0; // fluctuation severity, MW
    int vo = 0;      // threshold-violation count
    double revenue = 0.0;
    double degradation_total = 0.0;
    int minutes = 0;
};

// Sum of per-minute (revenue - degradation cost).
double total_profit(const std::vector<mdp::GridRecord>& records);

// Sum of |P_G^t - P_G^{t-1}| between consecutive records; the first record
// has no predecessor and contributes nothing.  Records are taken in minute
// order regardless of list order.
double fluctuation_severity(const std::vector<mdp::GridRecord>& records);

// Count of consecutive-record fluctuations strictly above the threshold
// (exact equality does not count).
int violation_occurrence(const std::vector<mdp::GridRecord>& records, double threshold_mw);

EpisodeSummary summarize(const std::vector<mdp::GridRecord>& records, double threshold_mw);

// One line of the comparison table.  Relative fields are candidate/baseline
// on the same scenario (or scenario average); absent when the baseline
// metric is zero.
struct ReportRow {
    std::string method;
    std::string scenario;
    double total_profit = 0.0;
    double fs = 0.0;
    double vo = 0.0; // mean across seeds, hence fractional
    std::optional<double> rel_profit, rel_fs, rel_vo;
    bool baseline_zero = false;
};

struct MethodScenarioSummary {
    std::string method;
    std::string scenario;
    EpisodeSummary summary;
};

// Mean per (method, scenario) across entries (seeds), relative columns
// against the baseline method's same scenario, plus one cross-scenario
// "average" row per method.  Methods and scenarios keep first-seen order.
std::vector<ReportRow> relative_report(const std::vector<MethodScenarioSummary>& entries,
                                       const std::string& baseline_method);

// CSV: method,scenario,total_profit,fs,vo,rel_profit,rel_fs,rel_vo
// (relative cells empty when the baseline metric is zero).
std::string report_csv(const std::vector<ReportRow>& rows);
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);

} // namespace wsis::metrics

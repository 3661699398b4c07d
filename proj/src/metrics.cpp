#include "wsis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wsis/errors.hpp"
#include "wsis/textio.hpp"

namespace wsis::metrics {

namespace {

std::vector<const mdp::GridRecord*> minute_ordered(const std::vector<mdp::GridRecord>& records) {
    std::vector<const mdp::GridRecord*> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(),
                     [](const mdp::GridRecord* a, const mdp::GridRecord* b) {
                         return a->minute < b->minute;
                     });
    return out;
}

} // namespace

double total_profit(const std::vector<mdp::GridRecord>& records) {
    double profit = 0.0;
    for (const auto& r : records) profit += r.revenue - r.degradation_cost;
    return profit;
}

double fluctuation_severity(const std::vector<mdp::GridRecord>& records) {
    const auto ordered = minute_ordered(records);
    double fs = 0.0;
    for (std::size_t i = 1; i < ordered.size(); ++i)
        fs += std::abs(ordered[i]->p_g_mw - ordered[i - 1]->p_g_mw);
    return fs;
}

int violation_occurrence(const std::vector<mdp::GridRecord>& records, double threshold_mw) {
    if (threshold_mw <= 0.0) throw ContractError("violation threshold must be positive");
    const auto ordered = minute_ordered(records);
    int count = 0;
    for (std::size_t i = 1; i < ordered.size(); ++i)
        if (std::abs(ordered[i]->p_g_mw - ordered[i - 1]->p_g_mw) > threshold_mw) ++count;
    return count;
}

EpisodeSummary summarize(const std::vector<mdp::GridRecord>& records, double threshold_mw) {
    EpisodeSummary s;
    s.total_profit = total_profit(records);
    s.fs = fluctuation_severity(records);
    s.vo = violation_occurrence(records, threshold_mw);
    for (const auto& r : records) {
        s.revenue += r.revenue;
        s.degradation_total += r.degradation_cost;
    }
    s.minutes = static_cast<int>(records.size());
    return s;
}

std::vector<ReportRow> relative_report(const std::vector<MethodScenarioSummary>& entries,
                                       const std::string& baseline_method) {
    std::vector<std::string> methods, scenarios;
    for (const auto& e : entries) {
        if (std::find(methods.begin(), methods.end(), e.method) == methods.end())
            methods.push_back(e.method);
        if (std::find(scenarios.begin(), scenarios.end(), e.scenario) == scenarios.end())
            scenarios.push_back(e.scenario);
    }
    if (std::find(methods.begin(), methods.end(), baseline_method) == methods.end())
        throw ContractError("baseline method '" + baseline_method + "' missing from entries");

    struct Mean {
        double profit = 0.0, fs = 0.0, vo = 0.0;
        int n = 0;
    };
    std::map<std::pair<std::string, std::string>, Mean> cells;
    for (const auto& e : entries) {
        Mean& m = cells[{e.method, e.scenario}];
        m.profit += e.summary.total_profit;
        m.fs += e.summary.fs;
        m.vo += e.summary.vo;
        m.n += 1;
    }
    for (auto& [key, m] : cells) {
        m.profit /= m.n;
        m.fs /= m.n;
        m.vo /= m.n;
    }

    auto ratio = [](double cand, double base) -> std::optional<double> {
        if (base == 0.0) return std::nullopt;
        return cand / base;
    };

    std::vector<ReportRow> rows;
    for (const auto& method : methods) {
        Mean avg;
        Mean base_avg;
        int scen_count = 0;
        for (const auto& scenario : scenarios) {
            const auto it = cells.find({method, scenario});
            if (it == cells.end()) continue;
            const auto base_it = cells.find({baseline_method, scenario});
            if (base_it == cells.end())
                throw ContractError("baseline missing scenario '" + scenario + "'");
            const Mean& m = it->second;
            const Mean& b = base_it->second;
            ReportRow row;
            row.method = method;
            row.scenario = scenario;
            row.total_profit = m.profit;
            row.fs = m.fs;
            row.vo = m.vo;
            row.rel_profit = ratio(m.profit, b.profit);
            row.rel_fs = ratio(m.fs, b.fs);
            row.rel_vo = ratio(m.vo, b.vo);
            row.baseline_zero = !row.rel_profit || !row.rel_fs || !row.rel_vo;
            rows.push_back(row);
            avg.profit += m.profit;
            avg.fs += m.fs;
            avg.vo += m.vo;
            base_avg.profit += b.profit;
            base_avg.fs += b.fs;
            base_avg.vo += b.vo;
            ++scen_count;
        }
        if (scen_count > 1) {
            ReportRow row;
            row.method = method;
            row.scenario = "average";
            row.total_profit = avg.profit / scen_count;
            row.fs = avg.fs / scen_count;
            row.vo = avg.vo / scen_count;
            row.rel_profit = ratio(avg.profit, base_avg.profit);
            row.rel_fs = ratio(avg.fs, base_avg.fs);
            row.rel_vo = ratio(avg.vo, base_avg.vo);
            row.baseline_zero = !row.rel_profit || !row.rel_fs || !row.rel_vo;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::string out = "method,scenario,total_profit,fs,vo,rel_profit,rel_fs,rel_vo\n";
    for (const auto& r : rows) {
        out += r.method + ',' + r.scenario;
        out += ',' + textio::format_double(r.total_profit);
        out += ',' + textio::format_double(r.fs);
        out += ',' + textio::format_double(r.vo);
        out += ',';
        if (r.rel_profit) out += textio::format_double(*r.rel_profit);
        out += ',';
        if (r.rel_fs) out += textio::format_double(*r.rel_fs);
        out += ',';
        if (r.rel_vo) out += textio::format_double(*r.rel_vo);
        out += '\n';
    }
    return out;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
    textio::write_file(path, report_csv(rows));
}

} // namespace wsis::metrics

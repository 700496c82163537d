#include "fastcharge/compare.hpp"

#include <thread>

#include "fastcharge/csv.hpp"
#include "fastcharge/errors.hpp"
#include "fastcharge/text_util.hpp"

namespace fastcharge {

const StrategyOutcome* ComparisonReport::find(const std::string& name) const
{
    for (const auto& o : outcomes)
        if (o.name == name) return &o;
    return nullptr;
}

ComparisonReport compare_strategies(const std::vector<std::unique_ptr<ChargingStrategy>>& strategies,
                                    const PlantFactory& plant, const ProtocolConfig& cfg,
                                    const ProtocolOptions& options)
{
    ComparisonReport report;
    report.outcomes.resize(strategies.size());
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < strategies.size(); ++k) {
        report.outcomes[k].name = strategies[k]->name();
        workers.emplace_back([&, k, s = strategies[k]->clone()] {
            StrategyOutcome& out = report.outcomes[k];
            try {
                Cell cell = plant();
                out.result = run_protocol(*s, cell, cfg, options);
                out.ok = true;
            } catch (const std::exception& e) {
                out.ok = false;
                out.error = e.what();
            }
        });
    }
    for (auto& w : workers) w.join();
    return report;
}

namespace {

std::string num(double v) { return format("%.6f", v); }

}  // namespace

void write_report(const ComparisonReport& report, const std::filesystem::path& dir, const std::string& reference)
{
    std::filesystem::create_directories(dir);

    CsvTable summary{{"strategy", "status", "max_efc", "average_charge_minutes", "cycles", "initial_capacity_ah",
                      "final_soh", "plating_loss_ah", "sei_loss_ah", "reached_end_of_life"},
                     {}};
    CsvTable soh{{"strategy", "cycle", "efc", "soh"}, {}};
    CsvTable times{{"strategy", "cycle", "soh", "charge_minutes"}, {}};
    CsvTable profiles{{"strategy", "cycle", "t_s", "I_A", "V_V", "SoC", "SoH", "eta_side_V", "L_sei_m", "c_dli"}, {}};

    for (const auto& o : report.outcomes) {
        if (!o.ok) {
            summary.rows.push_back({o.name, "failed", "", "", "", "", "", "", "", ""});
            continue;
        }
        const auto& r = o.result;
        const CycleMetrics last = r.cycles.empty() ? CycleMetrics{} : r.cycles.back();
        summary.rows.push_back({o.name, "ok", num(r.final_efc()), num(r.average_charge_minutes()),
                                std::to_string(r.cycles.size()), num(r.initial_capacity), num(last.soh_after),
                                num(last.capacity_loss_plating_ah), num(last.capacity_loss_sei_ah),
                                r.reached_end_of_life ? "1" : "0"});
        for (const auto& c : r.cycles) {
            soh.rows.push_back({o.name, std::to_string(c.cycle), num(c.efc_cumulative), num(c.soh_after)});
            times.rows.push_back({o.name, std::to_string(c.cycle), num(c.soh_at_cycle), num(c.charge_minutes)});
        }
        for (const auto& [cycle, trace] : r.snapshots)
            for (const auto& row : trace) {
                std::vector<std::string> cells{o.name, std::to_string(cycle)};
                for (auto f : split(format_trace_row(row), ',')) cells.emplace_back(f);
                profiles.rows.push_back(std::move(cells));
            }
    }
    write_csv(summary, dir / "summary.csv");
    if (!soh.rows.empty()) write_csv(soh, dir / "soh_vs_efc.csv");
    if (!times.rows.empty()) write_csv(times, dir / "charge_time_vs_soh.csv");
    if (!profiles.rows.empty()) write_csv(profiles, dir / "profiles.csv");

    // Relative plating-loss difference against the reference, cycle by cycle.
    const StrategyOutcome* ref = report.find(reference);
    if (!ref || !ref->ok) return;
    CsvTable diff{{"strategy", "cycle", "plating_loss_ah", "reference_plating_loss_ah", "relative_difference"}, {}};
    const auto& rc = ref->result.cycles;
    for (const auto& o : report.outcomes) {
        if (!o.ok || o.name == reference) continue;
        const auto& cs = o.result.cycles;
        for (std::size_t k = 0; k < cs.size() && k < rc.size(); ++k) {
            const double a = cs[k].capacity_loss_plating_ah;
            const double b = rc[k].capacity_loss_plating_ah;
            diff.rows.push_back({o.name, std::to_string(cs[k].cycle), num(a), num(b), b > 0 ? num((a - b) / b) : "nan"});
        }
    }
    if (!diff.rows.empty()) write_csv(diff, dir / "plating_loss_diff.csv");
}

}  // namespace fastcharge

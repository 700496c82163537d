#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fastcharge/controllers.hpp"
#include "fastcharge/lifecycle.hpp"

namespace fastcharge {

struct StrategyOutcome {
    std::string name;
    bool ok{};
    std::string error;  // set when !ok
    ProtocolResult result;
};

struct ComparisonReport {
    std::vector<StrategyOutcome> outcomes;  // in input order

    const StrategyOutcome* find(const std::string& name) const;
};

/// Runs the cycling protocol for every strategy on its own plant from the
/// factory, one thread per strategy. A failing strategy is reported, not
/// propagated.
ComparisonReport compare_strategies(const std::vector<std::unique_ptr<ChargingStrategy>>& strategies,
                                    const PlantFactory& plant, const ProtocolConfig& cfg,
                                    const ProtocolOptions& options = {});

/// Writes summary.csv, soh_vs_efc.csv, charge_time_vs_soh.csv, profiles.csv
/// and, when `reference` ran successfully, plating_loss_diff.csv into dir.
void write_report(const ComparisonReport& report, const std::filesystem::path& dir,
                  const std::string& reference = "Proposed");

}  // namespace fastcharge

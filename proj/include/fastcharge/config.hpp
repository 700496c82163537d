#pragma once

#include <filesystem>
#include <string>

#include "fastcharge/cell.hpp"
#include "fastcharge/controllers.hpp"
#include "fastcharge/environments.hpp"
#include "fastcharge/grid.hpp"
#include "fastcharge/lifecycle.hpp"
#include "fastcharge/reward.hpp"
#include "fastcharge/td3.hpp"
#include "fastcharge/trainer.hpp"

namespace fastcharge {

/// Everything a CLI run needs. Parsed from `key = value` lines; every key
/// has a default, unknown keys are rejected and every numeric value is range
/// checked.
struct RunConfig {
    std::filesystem::path parameter_file;
    GridResolution grid;
    StepConfig step;
    ProtocolConfig protocol;
    ControllerConfig cccv;      // CC-CV and CC-CV-V
    ControllerConfig cop_slow;  // CC-COP with a conservative reference
    ControllerConfig cop_fast;  // CC-COP with an aggressive reference
    MapBuildConfig map;
    Td3Config td3;
    RewardConfig reward;
    TrainerConfig train;
    AgingMode aging_mode{AgingMode::persistent};
    ObjectiveWeights objective;
    double accel{100.0};
    unsigned long long seed{1};
    std::filesystem::path output_dir{"out"};

    RunConfig();
    /// Cross-field and range checks; throws ConfigError naming the key.
    void validate() const;
};

RunConfig parse_config_text(std::string_view text, std::string_view origin = "<text>");
/// Loads a config file. A bare name without a path separator or extension
/// is looked up in the bundled configs directory (e.g. "paper_defaults").
RunConfig parse_config(const std::filesystem::path& path);
std::filesystem::path resolve_config_path(const std::filesystem::path& path);

/// Every key with its resolved value, one `key = value` line each, in a
/// fixed order; parse_config_text(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& cfg);
void write_resolved_config(const RunConfig& cfg, const std::filesystem::path& dir);

/// FASTCHARGE_OUTPUT_DIR when set, else the configured directory.
std::filesystem::path effective_output_dir(const RunConfig& cfg);

/// Plant factory for the configured parameters, grid, step and aging factor.
PlantFactory make_plant_factory(const RunConfig& cfg);

}  // namespace fastcharge

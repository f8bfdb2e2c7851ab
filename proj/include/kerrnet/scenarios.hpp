#pragma once

#include "kerrnet/config.hpp"
#include "kerrnet/csv.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kerrnet {

struct OutputTable {
    std::string name;  // file stem, e.g. "spectrum"
    CsvTable table;
    nlohmann::json units;  // column -> unit note
};

/// Tables and run summary of one subcommand. Writing them is left to write_outputs.
struct ScenarioResult {
    std::string subcommand;
    std::vector<OutputTable> tables;
    nlohmann::json summary;
};

ScenarioResult run_spectrum(const RunConfig& cfg);
ScenarioResult run_passage(const RunConfig& cfg);
ScenarioResult run_alpha_scan(const RunConfig& cfg);
ScenarioResult run_lossy_prep(const RunConfig& cfg);
ScenarioResult run_robustness(const RunConfig& cfg);

/// Dispatches by subcommand name; throws ContractError for unknown names.
ScenarioResult run_scenario(const std::string& subcommand, const RunConfig& cfg);
const std::vector<std::string>& scenario_names();

/// Sidecar document for one table: schema version, columns, units, summary and the resolved config.
nlohmann::json sidecar(const ScenarioResult& result, const OutputTable& table, const RunConfig& cfg);

/// Writes `<name>.csv` and `<name>.json` for every table; returns the written paths.
std::vector<std::filesystem::path> write_outputs(const ScenarioResult& result, const RunConfig& cfg,
                                                 const std::filesystem::path& dir);

/// Shipped presets (fig1 ... fig6).
std::vector<std::string> preset_names();
std::optional<std::string> preset_text(const std::string& name);

}  // namespace kerrnet

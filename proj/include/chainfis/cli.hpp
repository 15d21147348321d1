#pragma once

#include <string>
#include <vector>

#include "chainfis/simulator.hpp"

namespace chainfis::cli {

/// Exit contract: 0 success, 1 data/verification failure, 2 usage error.
struct CommandResult {
    int exit_code = 0;
    std::vector<std::string> report_paths;
    std::string summary;
};

/// Dispatches one invocation (argv excludes the program name).
/// Subcommands: cluster, train, forecast, simulate, ledger verify, report.
CommandResult run_command(const std::vector<std::string>& argv);

/// Files written by `simulate` into the output directory. `report` reads
/// them back; nothing else flows between the two commands.
struct SimulationFiles {
    std::string summary;     // summary.csv
    std::string economics;   // economics.csv
    std::string baseline;    // metrics_baseline.csv
    std::string anfis;       // metrics_anfis.csv
    std::string zt;          // zt_states.csv
    std::string chain;       // chain.jsonl
    std::string demand;      // demand.csv
};

SimulationFiles write_simulation_outputs(const sim::SimulationRun& run,
                                         const sim::Scenario& scenario,
                                         const std::string& directory);

/// Renders report.csv (table3/table4/table5 sections) from the files a
/// previous `simulate` left in `directory`.
std::string write_report(const std::string& directory,
                         const std::string& output_path);

}  // namespace chainfis::cli

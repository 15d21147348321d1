#include "chainfis/cli.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "chainfis/anfis.hpp"
#include "chainfis/fcm.hpp"
#include "chainfis/forecast.hpp"
#include "chainfis/indicators.hpp"
#include "chainfis/ledger.hpp"
#include "chainfis/numfmt.hpp"
#include "chainfis/scenario.hpp"

namespace chainfis::cli {

namespace {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return i;
        }
        throw std::runtime_error("csv: no column named '" + name + "'");
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    CsvTable table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream splitter(line);
        while (std::getline(splitter, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (line_number == 1) {
            table.columns = std::move(cells);
        } else {
            if (cells.size() != table.columns.size()) {
                throw std::runtime_error(path + ": line " +
                                         std::to_string(line_number) + " has " +
                                         std::to_string(cells.size()) +
                                         " cells, expected " +
                                         std::to_string(table.columns.size()));
            }
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.columns.empty()) {
        throw std::runtime_error(path + ": empty file");
    }
    if (table.rows.empty()) {
        throw std::runtime_error(path + ": no data rows");
    }
    return table;
}

double numeric_cell(const CsvTable& table, const std::string& path,
                    std::size_t row, std::size_t column) {
    const std::string& cell = table.rows[row][column];
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (cell.empty() || used != cell.size()) {
        throw std::runtime_error(path + ": non-numeric cell at line " +
                                 std::to_string(row + 2) + ", column " +
                                 std::to_string(column + 1) + " ('" +
                                 table.columns[column] + "')");
    }
    return value;
}

bool column_is_numeric(const CsvTable& table, std::size_t column) {
    for (const auto& row : table.rows) {
        const std::string& cell = row[column];
        std::size_t used = 0;
        try {
            std::stod(cell, &used);
        } catch (const std::exception&) {
            return false;
        }
        if (cell.empty() || used != cell.size()) return false;
    }
    return true;
}

std::vector<std::string> split_names(const std::string& list) {
    std::vector<std::string> names;
    std::string name;
    std::istringstream in(list);
    while (std::getline(in, name, ',')) {
        if (!name.empty()) names.push_back(name);
    }
    return names;
}

// deterministic 3:1 split; hand-rolled shuffle so the order is stable
// across standard libraries
void split_dataset(const anfis::Dataset& data, std::uint64_t seed,
                   anfis::Dataset& train, anfis::Dataset& test) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
    }
    const std::size_t train_count =
        std::max<std::size_t>(1, data.size() * 3 / 4);
    for (std::size_t i = 0; i < order.size(); ++i) {
        anfis::Dataset& slot = i < train_count ? train : test;
        slot.inputs.push_back(data.inputs[order[i]]);
        slot.targets.push_back(data.targets[order[i]]);
    }
}

std::string join_paths(const std::vector<std::string>& paths) {
    std::string joined;
    for (const std::string& p : paths) {
        if (!joined.empty()) joined += ", ";
        joined += p;
    }
    return joined;
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& argv) {
    CommandResult result;
    CLI::App app{"fuzzy-driven supply-chain toolkit"};
    app.name("chainfis");
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    CLI::Option* seed_option =
        app.add_option("--seed", seed, "seed for every random draw")
            ->envname("CHAINFIS_SEED");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "fuzzy c-means over a CSV");
    std::string cluster_input, cluster_output;
    int cluster_count = 2;
    double cluster_fuzzifier = 2.0, cluster_tolerance = 1e-6;
    int cluster_max_iterations = 300;
    cluster->add_option("--input", cluster_input, "numeric CSV with header")
        ->required();
    cluster->add_option("--clusters", cluster_count, "cluster count")
        ->required();
    cluster->add_option("--fuzzifier", cluster_fuzzifier, "fuzzifier m > 1");
    cluster->add_option("--tolerance", cluster_tolerance, "objective tolerance");
    cluster->add_option("--max-iterations", cluster_max_iterations,
                        "iteration cap");
    cluster->add_option("--output", cluster_output, "centers/objective file");

    // train
    auto* train_cmd = app.add_subcommand("train", "build and train a model");
    std::string train_input, train_targets, train_features, train_output,
        train_history;
    int train_clusters = 0, train_auto_max = 0, train_epochs = 50;
    train_cmd->add_option("--input", train_input, "numeric CSV with header")
        ->required();
    train_cmd->add_option("--targets", train_targets, "target column names")
        ->required();
    train_cmd->add_option("--features", train_features,
                          "feature columns (default: all other numeric)");
    train_cmd->add_option("--clusters", train_clusters, "rule count");
    train_cmd->add_option("--auto-clusters", train_auto_max,
                          "sweep 2..N for the best rule count");
    train_cmd->add_option("--epochs", train_epochs, "max training epochs");
    train_cmd->add_option("--output", train_output, "model file")->required();
    train_cmd->add_option("--history", train_history, "per-epoch RMSE file");

    // forecast
    auto* forecast_cmd =
        app.add_subcommand("forecast", "croston/sba over a demand series");
    std::string forecast_input, forecast_output, forecast_variant = "paper";
    double forecast_alpha = 0.1, forecast_safety = 0.0;
    int forecast_horizon = 1;
    std::optional<double> forecast_inventory;
    forecast_cmd->add_option("--input", forecast_input, "CSV with a demand column")
        ->required();
    forecast_cmd->add_option("--alpha", forecast_alpha, "smoothing constant");
    forecast_cmd
        ->add_option("--variant", forecast_variant, "sba form: paper|textbook")
        ->check(CLI::IsMember({"paper", "textbook"}));
    forecast_cmd->add_option("--horizon", forecast_horizon,
                             "reorder horizon in periods");
    forecast_cmd->add_option("--safety", forecast_safety, "safety stock");
    forecast_cmd->add_option("--inventory", forecast_inventory,
                             "on-hand inventory; evaluates the reorder contract");
    forecast_cmd->add_option("--output", forecast_output, "machine-readable file");

    // simulate
    auto* simulate =
        app.add_subcommand("simulate", "run both policies on a scenario");
    std::string simulate_scenario, simulate_output;
    std::optional<int> simulate_replications;
    simulate->add_option("--scenario", simulate_scenario, "scenario file")
        ->required();
    simulate->add_option("--output", simulate_output, "output directory")
        ->required();
    simulate->add_option("--replications", simulate_replications,
                         "override scenario replications");

    // ledger verify
    auto* ledger_cmd = app.add_subcommand("ledger", "chain maintenance");
    ledger_cmd->require_subcommand(1);
    auto* verify =
        ledger_cmd->add_subcommand("verify", "check a chain file end to end");
    std::string verify_file;
    verify->add_option("file", verify_file, "chain JSONL file")->required();

    // report
    auto* report = app.add_subcommand("report", "render tables from a run");
    std::string report_input, report_output;
    report->add_option("--input", report_input, "directory written by simulate")
        ->required();
    report->add_option("--output", report_output, "report path");

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            result.summary = app.help();
            return result;
        }
        result.exit_code = 2;
        result.summary = std::string(e.what()) + "\n" + app.help();
        return result;
    }

    try {
        if (app.got_subcommand(cluster)) {
            const CsvTable table = read_csv(cluster_input);
            std::vector<std::string> used;
            std::vector<std::size_t> numeric;
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (column_is_numeric(table, c)) {
                    numeric.push_back(c);
                    used.push_back(table.columns[c]);
                }
            }
            if (numeric.empty()) {
                throw std::runtime_error(cluster_input + ": no numeric columns");
            }
            std::vector<fcm::DataPoint> data;
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                fcm::DataPoint point;
                for (std::size_t c : numeric) {
                    point.push_back(numeric_cell(table, cluster_input, r, c));
                }
                data.push_back(std::move(point));
            }
            fcm::FcmConfig config;
            config.fuzzifier = cluster_fuzzifier;
            config.tolerance = cluster_tolerance;
            config.max_iterations = cluster_max_iterations;
            config.seed = seed;
            const fcm::FcmResult fit =
                fcm::run_fcm(data, static_cast<std::size_t>(cluster_count), config);

            std::ostringstream summary;
            summary << "clustered " << data.size() << " points ("
                    << used.size() << " numeric columns) into "
                    << cluster_count << " clusters; objective "
                    << format_brief(fit.clusters.objective) << " after "
                    << fit.objective_trace.size() << " iterations";
            if (!cluster_output.empty()) {
                std::ofstream out(cluster_output, std::ios::binary);
                if (!out) {
                    throw std::runtime_error("cannot write " + cluster_output);
                }
                out << "chainfis-clusters 1\n";
                out << "clusters " << cluster_count << "\n";
                out << "fuzzifier " << format_full(cluster_fuzzifier) << "\n";
                out << "objective " << format_full(fit.clusters.objective)
                    << "\n";
                for (const auto& center : fit.clusters.centers) {
                    out << "center";
                    for (double v : center) out << " " << format_full(v);
                    out << "\n";
                }
                out << "trace";
                for (double j : fit.objective_trace) {
                    out << " " << format_full(j);
                }
                out << "\n";
                result.report_paths.push_back(cluster_output);
            }
            result.summary = summary.str();
        } else if (app.got_subcommand(train_cmd)) {
            const CsvTable table = read_csv(train_input);
            const std::vector<std::string> target_names =
                split_names(train_targets);
            if (target_names.empty()) {
                throw std::runtime_error("train: --targets names no columns");
            }
            std::vector<std::size_t> target_cols;
            for (const std::string& name : target_names) {
                target_cols.push_back(table.column_index(name));
            }
            std::vector<std::size_t> feature_cols;
            if (!train_features.empty()) {
                for (const std::string& name : split_names(train_features)) {
                    feature_cols.push_back(table.column_index(name));
                }
            } else {
                for (std::size_t c = 0; c < table.columns.size(); ++c) {
                    if (std::find(target_cols.begin(), target_cols.end(), c) !=
                        target_cols.end()) {
                        continue;
                    }
                    if (column_is_numeric(table, c)) feature_cols.push_back(c);
                }
            }
            if (feature_cols.empty()) {
                throw std::runtime_error("train: no feature columns");
            }

            anfis::Dataset data;
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                std::vector<double> input, target;
                for (std::size_t c : feature_cols) {
                    input.push_back(numeric_cell(table, train_input, r, c));
                }
                for (std::size_t c : target_cols) {
                    target.push_back(numeric_cell(table, train_input, r, c));
                }
                data.inputs.push_back(std::move(input));
                data.targets.push_back(std::move(target));
            }

            anfis::TrainingConfig config;
            config.max_epochs = train_epochs;
            config.seed = seed;

            int clusters = train_clusters;
            if (train_auto_max > 0) {
                clusters = anfis::select_cluster_count(data, train_auto_max, config);
            }
            if (clusters < 1) {
                throw std::runtime_error(
                    "train: give --clusters or --auto-clusters");
            }

            anfis::Dataset train_split, test_split;
            split_dataset(data, seed, train_split, test_split);
            fcm::FcmConfig fcm_config;
            fcm_config.seed = seed;
            const fcm::FcmResult fit = fcm::run_fcm(
                train_split.inputs, static_cast<std::size_t>(clusters), fcm_config);
            anfis::FuzzyInferenceModel model = anfis::build_from_clusters(
                fit.clusters, fit.memberships, train_split);
            const anfis::TrainingResult trained =
                anfis::train_hybrid(model, train_split, test_split, config);

            std::ofstream out(train_output, std::ios::binary);
            if (!out) {
                throw std::runtime_error("cannot write " + train_output);
            }
            anfis::save_model(trained.model, out);
            result.report_paths.push_back(train_output);

            if (!train_history.empty()) {
                std::ofstream history(train_history, std::ios::binary);
                if (!history) {
                    throw std::runtime_error("cannot write " + train_history);
                }
                history << "epoch,train_rmse,test_rmse\n";
                for (std::size_t e = 0; e < trained.history.size(); ++e) {
                    history << (e + 1) << ","
                            << format_full(trained.history[e].train_rmse) << ","
                            << format_full(trained.history[e].test_rmse) << "\n";
                }
                result.report_paths.push_back(train_history);
            }

            std::ostringstream summary;
            summary << "trained " << clusters << " rules over "
                    << feature_cols.size() << " features; train RMSE "
                    << format_brief(trained.history.back().train_rmse);
            if (!test_split.inputs.empty()) {
                summary << ", test RMSE "
                        << format_brief(trained.history.back().test_rmse);
            }
            for (const std::string& warning : trained.warnings) {
                summary << "\nwarning: " << warning;
            }
            result.summary = summary.str();
        } else if (app.got_subcommand(forecast_cmd)) {
            const CsvTable table = read_csv(forecast_input);
            std::size_t column = 0;
            bool named = false;
            for (std::size_t c = 0; c < table.columns.size(); ++c) {
                if (table.columns[c] == "demand") {
                    column = c;
                    named = true;
                    break;
                }
            }
            if (!named && table.columns.size() != 1) {
                throw std::runtime_error(
                    forecast_input +
                    ": need a 'demand' column or a single-column file");
            }
            forecast::DemandForecastState state;
            state.alpha = forecast_alpha;
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const double demand =
                    numeric_cell(table, forecast_input, r, column);
                state = forecast::croston_update(
                    state, demand, static_cast<std::int64_t>(r) + 1);
            }
            if (!state.initialized) {
                throw std::runtime_error(forecast_input +
                                         ": series has no nonzero demand");
            }
            const auto variant = forecast_variant == "paper"
                                     ? forecast::SbaVariant::paper
                                     : forecast::SbaVariant::textbook;
            const double rate = forecast::croston_rate(state);
            const double sba = forecast::sba_forecast(state, variant);

            std::optional<long long> reorder_quantity;
            if (forecast_inventory.has_value()) {
                ledger::ReorderParams params;
                params.safety_stock = forecast_safety;
                params.horizon_periods = forecast_horizon;
                params.variant = variant;
                const auto event = ledger::evaluate_reorder_contract(
                    *forecast_inventory, state, params);
                if (event) {
                    reorder_quantity = std::stoll(event->payload.at("quantity"));
                }
            }

            std::ostringstream summary;
            summary << "size estimate " << format_brief(state.size_estimate)
                    << ", interval estimate "
                    << format_brief(state.interval_estimate) << ", croston rate "
                    << format_brief(rate) << ", sba forecast "
                    << format_brief(sba);
            if (forecast_inventory.has_value()) {
                summary << ", reorder "
                        << (reorder_quantity
                                ? std::to_string(*reorder_quantity) + " units"
                                : std::string("not needed"));
            }
            if (!forecast_output.empty()) {
                std::ofstream out(forecast_output, std::ios::binary);
                if (!out) {
                    throw std::runtime_error("cannot write " + forecast_output);
                }
                out << "key,value\n";
                out << "size_estimate," << format_full(state.size_estimate)
                    << "\n";
                out << "interval_estimate,"
                    << format_full(state.interval_estimate) << "\n";
                out << "croston_rate," << format_full(rate) << "\n";
                out << "sba_forecast," << format_full(sba) << "\n";
                if (reorder_quantity) {
                    out << "reorder_quantity," << *reorder_quantity << "\n";
                }
                result.report_paths.push_back(forecast_output);
            }
            result.summary = summary.str();
        } else if (app.got_subcommand(simulate)) {
            sim::Scenario scenario = sim::load_scenario_file(simulate_scenario);
            if (!seed_option->empty()) scenario.seed = seed;
            if (simulate_replications.has_value()) {
                scenario.replications = *simulate_replications;
            }
            const sim::SimulationRun run = sim::run_simulation(scenario);
            const SimulationFiles files =
                write_simulation_outputs(run, scenario, simulate_output);
            for (const std::string& path :
                 {files.summary, files.economics, files.baseline, files.anfis,
                  files.zt, files.chain, files.demand}) {
                result.report_paths.push_back(path);
            }
            std::ostringstream summary;
            summary << "simulated " << scenario.horizon_days << " days x "
                    << scenario.replications << " replications (seed "
                    << scenario.seed << ")\n";
            summary << "  delivery minutes: anfis "
                    << format_brief(run.anfis.avg_delivery_time_minutes)
                    << " vs baseline "
                    << format_brief(run.baseline.avg_delivery_time_minutes)
                    << "\n";
            summary << "  reorder interval: anfis "
                    << format_brief(run.anfis.avg_reorder_interval_days)
                    << " vs baseline "
                    << format_brief(run.baseline.avg_reorder_interval_days)
                    << " days\n";
            summary << "  order quantity: anfis "
                    << format_brief(run.anfis.avg_order_quantity)
                    << " vs baseline "
                    << format_brief(run.baseline.avg_order_quantity) << "\n";
            summary << "  chain: " << run.chain.blocks().size()
                    << " blocks, verified ok\n";
            summary << "  wrote " << join_paths(result.report_paths);
            result.summary = summary.str();
        } else if (app.got_subcommand(ledger_cmd)) {
            std::ifstream in(verify_file, std::ios::binary);
            if (!in) {
                throw std::runtime_error("cannot open " + verify_file);
            }
            const ledger::LedgerChain chain = ledger::import_chain(in);
            const ledger::VerifyReport report = ledger::verify_chain(chain);
            if (report.ok) {
                result.summary = "ok";
            } else {
                result.exit_code = 1;
                result.summary = "bad height " +
                                 std::to_string(report.bad_height) + ": " +
                                 report.reason;
            }
        } else if (app.got_subcommand(report)) {
            std::string output = report_output;
            if (output.empty()) {
                output = (std::filesystem::path(report_input) / "report.csv")
                             .string();
            }
            result.summary = write_report(report_input, output);
            result.report_paths.push_back(output);
        }
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.summary = e.what();
    }
    return result;
}

}  // namespace chainfis::cli

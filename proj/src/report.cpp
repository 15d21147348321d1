#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "chainfis/cli.hpp"
#include "chainfis/ledger.hpp"
#include "chainfis/numfmt.hpp"

namespace chainfis::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path +
                                 " (run `simulate` first)");
    }
    return in;
}

void write_daily_series(const std::string& path,
                        const std::vector<sim::IndicatorRecord>& daily) {
    std::ofstream out = open_out(path);
    out << "day,quality_p1,material_p2,logistic_p3,purchase_p4,order_plan_l1,"
           "order_speed_l2,delivery_c1,volume_c2,node_satisfaction_c4,"
           "outbound_error_s1,damage_s2,turnover_s3,zero_inventory,"
           "delivery_error_c3\n";
    for (const sim::IndicatorRecord& r : daily) {
        out << r.stage;
        for (double v :
             {r.quality_p1, r.material_p2, r.logistic_p3, r.purchase_p4,
              r.order_plan_l1, r.order_speed_l2, r.delivery_c1, r.volume_c2,
              r.node_satisfaction_c4, r.outbound_error_s1, r.damage_s2,
              r.turnover_s3, r.zero_inventory, r.delivery_error_c3}) {
            out << "," << format_full(v);
        }
        out << "\n";
    }
}

std::string one_hot_text(const std::array<int, 4>& bits) {
    std::ostringstream text;
    text << "(" << bits[0] << "," << bits[1] << "," << bits[2] << ","
         << bits[3] << ")";
    return text.str();
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
        } else if (ch == ',' && !quoted) {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    cells.push_back(cell);
    return cells;
}

// summary.csv parsed into metric -> (baseline, anfis)
std::map<std::string, std::pair<std::string, std::string>> read_summary(
    const std::string& path) {
    std::ifstream in = open_in(path);
    std::map<std::string, std::pair<std::string, std::string>> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != 3) {
            throw std::runtime_error("malformed summary row: " + line);
        }
        rows[cells[0]] = {cells[1], cells[2]};
    }
    if (rows.empty()) {
        throw std::runtime_error("summary file has no rows: " + path);
    }
    return rows;
}

// last data row of a daily metrics file, keyed by column name
std::map<std::string, std::string> read_last_row(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("empty metrics file: " + path);
    }
    const auto names = split_line(header);
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    if (last.empty()) {
        throw std::runtime_error("metrics file has no data rows: " + path);
    }
    const auto cells = split_line(last);
    if (cells.size() != names.size()) {
        throw std::runtime_error("ragged metrics row in " + path);
    }
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < names.size(); ++i) row[names[i]] = cells[i];
    return row;
}

}  // namespace

SimulationFiles write_simulation_outputs(const sim::SimulationRun& run,
                                         const sim::Scenario& scenario,
                                         const std::string& directory) {
    fs::create_directories(directory);
    SimulationFiles files;
    const fs::path dir(directory);

    files.summary = (dir / "summary.csv").string();
    {
        std::ofstream out = open_out(files.summary);
        out << "metric,baseline,anfis\n";
        auto row = [&out](const char* name, double b, double a) {
            out << name << "," << format_full(b) << "," << format_full(a)
                << "\n";
        };
        row("avg_delivery_time_minutes", run.baseline.avg_delivery_time_minutes,
            run.anfis.avg_delivery_time_minutes);
        row("avg_reorder_interval_days", run.baseline.avg_reorder_interval_days,
            run.anfis.avg_reorder_interval_days);
        row("avg_order_quantity", run.baseline.avg_order_quantity,
            run.anfis.avg_order_quantity);
        row("fill_rate", run.baseline.fill_rate, run.anfis.fill_rate);
        row("on_time_rate", run.baseline.on_time_rate, run.anfis.on_time_rate);
        row("stockout_day_fraction", run.baseline.stockout_day_fraction,
            run.anfis.stockout_day_fraction);
        row("orders_placed", run.baseline.orders_placed,
            run.anfis.orders_placed);
        row("deliveries", run.baseline.deliveries, run.anfis.deliveries);
        const char* score_names[] = {"score_perfect", "score_good",
                                     "score_medium", "score_poor"};
        for (int i = 0; i < 4; ++i) {
            row(score_names[i], run.baseline.efficiency_scores[i],
                run.anfis.efficiency_scores[i]);
        }
        out << "efficiency_label," << run.baseline.efficiency.label << ","
            << run.anfis.efficiency.label << "\n";
        out << "efficiency_one_hot,\""
            << one_hot_text(run.baseline.efficiency.one_hot) << "\",\""
            << one_hot_text(run.anfis.efficiency.one_hot) << "\"\n";
    }

    files.economics = (dir / "economics.csv").string();
    {
        std::ofstream out = open_out(files.economics);
        out << "key,value\n";
        out << "p0," << format_full(run.economics.p0) << "\n";
        out << "q0," << format_full(run.economics.q0) << "\n";
        out << "a0," << format_full(run.economics.a0) << "\n";
        out << "supplier_profit," << format_full(run.economics.supplier_profit)
            << "\n";
        out << "retailer_profit," << format_full(run.economics.retailer_profit)
            << "\n";
    }

    files.baseline = (dir / "metrics_baseline.csv").string();
    write_daily_series(files.baseline, run.baseline.daily);
    files.anfis = (dir / "metrics_anfis.csv").string();
    write_daily_series(files.anfis, run.anfis.daily);

    files.zt = (dir / "zt_states.csv").string();
    {
        std::ofstream out = open_out(files.zt);
        out << "state,description,metric_1,metric_2,metric_3,metric_4\n";
        for (const sim::ZtState& state : run.zt_states) {
            out << state.name << "," << state.description;
            for (double v : state.metrics) out << "," << format_full(v);
            out << "\n";
        }
    }

    files.chain = (dir / "chain.jsonl").string();
    {
        std::ofstream out = open_out(files.chain);
        ledger::export_chain(run.chain, out);
    }

    files.demand = (dir / "demand.csv").string();
    {
        std::ofstream out = open_out(files.demand);
        out << "day,demand\n";
        for (std::size_t day = 0; day < run.demand_log.size(); ++day) {
            out << day << "," << format_full(run.demand_log[day]) << "\n";
        }
    }
    return files;
}

std::string write_report(const std::string& directory,
                         const std::string& output_path) {
    const fs::path dir(directory);
    const auto summary = read_summary((dir / "summary.csv").string());
    const auto baseline_last =
        read_last_row((dir / "metrics_baseline.csv").string());
    const auto anfis_last = read_last_row((dir / "metrics_anfis.csv").string());

    std::ofstream out = open_out(output_path);
    out << "# table3 indicator outcomes (final day of the first replication)\n";
    out << "indicator,baseline,anfis\n";
    const std::pair<const char*, const char*> rows[] = {
        {"Quality P1 (%)", "quality_p1"},
        {"Material P2 (%)", "material_p2"},
        {"Logistic P3 (%)", "logistic_p3"},
        {"Completed Purchase P4 (%)", "purchase_p4"},
        {"Order Planning L1 (%)", "order_plan_l1"},
        {"Order Speed L2 (days)", "order_speed_l2"},
        {"Delivery on Time C1 (%)", "delivery_c1"},
        {"Volume C2 (%)", "volume_c2"},
        {"Delivery Error C3 (%)", "delivery_error_c3"},
        {"Node satisfaction C4 (score)", "node_satisfaction_c4"},
        {"Output Error S1 (%)", "outbound_error_s1"},
        {"Damage Rate S2 (%)", "damage_s2"},
        {"Loads in Circulation S3 (times)", "turnover_s3"},
        {"Zero inventory S4 (times)", "zero_inventory"},
    };
    for (const auto& [label, key] : rows) {
        out << label << "," << baseline_last.at(key) << ","
            << anfis_last.at(key) << "\n";
    }
    out << "Supply Management Assessment," << summary.at("efficiency_label").first
        << "," << summary.at("efficiency_label").second << "\n";
    out << "Efficiency,\"" << summary.at("efficiency_one_hot").first << "\",\""
        << summary.at("efficiency_one_hot").second << "\"\n";

    out << "# table4 perturbed-state metric vectors\n";
    {
        std::ifstream zt = open_in((dir / "zt_states.csv").string());
        std::string line;
        while (std::getline(zt, line)) {
            if (!line.empty()) out << line << "\n";
        }
    }

    out << "# table5 policy comparison\n";
    out << "parameter,anfis,baseline,ratio\n";
    const std::pair<const char*, const char*> comparisons[] = {
        {"Average delivery time to retailers (minutes)",
         "avg_delivery_time_minutes"},
        {"Reorder interval (days)", "avg_reorder_interval_days"},
        {"Products requested per order", "avg_order_quantity"},
    };
    std::string human = "policy comparison:\n";
    for (const auto& [label, key] : comparisons) {
        const auto& [baseline_text, anfis_text] = summary.at(key);
        const double baseline_value = std::stod(baseline_text);
        const double anfis_value = std::stod(anfis_text);
        const double ratio =
            baseline_value != 0.0 ? anfis_value / baseline_value : 0.0;
        out << label << "," << anfis_text << "," << baseline_text << ","
            << format_full(ratio) << "\n";
        human += std::string("  ") + label + ": anfis " +
                 format_brief(anfis_value) + " vs baseline " +
                 format_brief(baseline_value) + " (ratio " +
                 format_brief(ratio) + ")\n";
    }
    return human;
}

}  // namespace chainfis::cli

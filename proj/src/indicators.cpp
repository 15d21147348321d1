#include "chainfis/indicators.hpp"

#include <istream>
#include <sstream>
#include <stdexcept>

namespace chainfis::sim {

namespace {

constexpr const char* kHeader =
    "stage,quality_p1,material_p2,logistic_p3,purchase_p4,order_plan_l1,"
    "order_speed_l2,delivery_c1,volume_c2,node_satisfaction_c4,"
    "outbound_error_s1,damage_s2,turnover_s3,zero_inventory";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line, std::size_t column) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != cell.size() || cell.empty()) {
        throw std::runtime_error("indicator csv: non-numeric cell at line " +
                                 std::to_string(line) + ", column " +
                                 std::to_string(column));
    }
    return value;
}

}  // namespace

const char* indicator_csv_header() { return kHeader; }

std::vector<IndicatorRecord> load_dataset(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("indicator csv: empty file");
    }
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const std::vector<std::string> expected = split_csv_line(kHeader);
    const std::vector<std::string> found = split_csv_line(header);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= found.size() || found[i] != expected[i]) {
            throw std::runtime_error("indicator csv: missing column '" +
                                     expected[i] + "' at position " +
                                     std::to_string(i + 1));
        }
    }

    std::vector<IndicatorRecord> records;
    std::string line;
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() < expected.size()) {
            throw std::runtime_error("indicator csv: line " +
                                     std::to_string(line_number) + " has " +
                                     std::to_string(cells.size()) +
                                     " cells, expected " +
                                     std::to_string(expected.size()));
        }
        IndicatorRecord r;
        r.stage = cells[0];
        std::size_t col = 1;
        double* fields[] = {&r.quality_p1,   &r.material_p2,
                            &r.logistic_p3,  &r.purchase_p4,
                            &r.order_plan_l1, &r.order_speed_l2,
                            &r.delivery_c1,  &r.volume_c2,
                            &r.node_satisfaction_c4, &r.outbound_error_s1,
                            &r.damage_s2,    &r.turnover_s3,
                            &r.zero_inventory};
        for (double* field : fields) {
            *field = parse_cell(cells[col], line_number, col + 1);
            ++col;
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) {
        throw std::runtime_error("indicator csv: no data rows");
    }
    return records;
}

}  // namespace chainfis::sim

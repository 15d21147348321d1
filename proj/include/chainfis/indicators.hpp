#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chainfis::sim {

/// One stage (or one simulated day) of the fourteen supply-chain
/// indicators. The input CSV carries the first thirteen; the delivery
/// error is an output-side indicator and defaults to zero on ingestion.
struct IndicatorRecord {
    std::string stage;
    double quality_p1 = 0.0;          // %
    double material_p2 = 0.0;         // %, negative = drawdown
    double logistic_p3 = 0.0;         // %
    double purchase_p4 = 0.0;         // %
    double order_plan_l1 = 0.0;       // %
    double order_speed_l2 = 0.0;      // days
    double delivery_c1 = 0.0;         // %
    double volume_c2 = 0.0;           // %
    double node_satisfaction_c4 = 0.0; // score
    double outbound_error_s1 = 0.0;   // %
    double damage_s2 = 0.0;           // %
    double turnover_s3 = 0.0;         // times
    double zero_inventory = 0.0;      // times
    double delivery_error_c3 = 0.0;   // %
};

/// Header of the indicator CSV, in ingestion column order.
const char* indicator_csv_header();

/// Parses the documented CSV schema (header + one row per stage).
/// Diagnostics name the offending line and column. An empty file is an
/// error, not an empty list.
std::vector<IndicatorRecord> load_dataset(std::istream& in);

}  // namespace chainfis::sim

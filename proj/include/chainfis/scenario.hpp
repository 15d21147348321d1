#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "chainfis/economics.hpp"
#include "chainfis/forecast.hpp"

namespace chainfis::sim {

/// Simulation scenario, read from a `key = value` text file (# comments).
/// Every field has a default so a scenario file only states what differs.
struct Scenario {
    int horizon_days = 30;
    std::uint64_t seed = 42;
    int replications = 1;
    int lead_time_days = 4;
    std::int64_t epoch_seconds = 0;  // base of all chain timestamps

    struct Demand {
        double probability = 0.8;  // chance a transaction happens on a day
        double size_mu = 1.0;      // lognormal location of the size draw
        double size_sigma = 0.35;  // lognormal scale
    } demand;

    struct Baseline {
        int review_days = 5;
        double quantity = 6.0;
    } baseline;

    struct Anfis {
        double alpha = 0.1;
        int horizon_periods = 6;
        double safety_stock = 8.0;
        double initial_size_estimate = 3.0;
        double initial_interval_estimate = 1.2;
        forecast::SbaVariant variant = forecast::SbaVariant::paper;
    } anfis;

    struct Ledger {
        int n = 4;  // registered signers
        int k = 3;  // required signatures
    } ledger;

    struct Delivery {
        double base_minutes = 36.0;
        double congestion_per_unit = 0.6;  // minutes per recently unmet unit
        double on_time_minutes = 40.0;
    } delivery;

    struct Inventory {
        double retailer = 12.0;
        double distributor = 400.0;
        double producer = 400.0;
        double supplier = 400.0;
    } initial_inventory;

    struct Upstream {
        double supplier_production_per_day = 30.0;
        double distributor_reorder_point = 150.0;
        double distributor_reorder_quantity = 120.0;
        int distributor_lead_days = 2;
        double producer_reorder_point = 150.0;
        double producer_reorder_quantity = 120.0;
        int producer_lead_days = 2;
    } upstream;

    double damage_probability = 0.0002;  // per shipped unit, in transit

    EconomicParams economics;
    DecisionBounds economics_bounds;
};

/// Throws std::runtime_error naming the offending line for unknown keys or
/// unparsable values.
Scenario load_scenario(std::istream& in);
Scenario load_scenario_file(const std::string& path);

}  // namespace chainfis::sim

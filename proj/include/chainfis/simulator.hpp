#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "chainfis/anfis.hpp"
#include "chainfis/economics.hpp"
#include "chainfis/forecast.hpp"
#include "chainfis/indicators.hpp"
#include "chainfis/ledger.hpp"
#include "chainfis/scenario.hpp"

namespace chainfis::sim {

enum class Policy { baseline, anfis };

struct PipelineOrder {
    double quantity = 0.0;
    int arrival_day = 0;
};

struct NodeState {
    ledger::Role role = ledger::Role::supplier;
    double inventory = 0.0;
    std::vector<PipelineOrder> pipeline;
    double service_level = 1.0;
};

struct DayOutcome {
    int day = 0;
    double demand = 0.0;
    double served = 0.0;
    double lost = 0.0;
    double reorder_quantity = 0.0;  // zero when no order was placed
    bool reorder_committed = false;
    std::vector<double> delivery_minutes;  // retailer arrivals today
    IndicatorRecord indicators;
};

/// Day-stepped four-node chain (supplier, producer, distributor,
/// retailer). Both policies consume a pre-generated demand stream so runs
/// are comparable; the anfis policy routes every reorder through the
/// multi-signature ledger before committing inventory.
class SupplyChainEngine {
  public:
    SupplyChainEngine(const Scenario& scenario, Policy policy,
                      std::vector<double> demand_stream,
                      std::uint64_t noise_seed);

    DayOutcome step_day(int day);
    void run();  // steps every day of the horizon

    const std::array<NodeState, 4>& nodes() const { return nodes_; }
    const ledger::LedgerChain& chain() const { return chain_; }
    const std::vector<DayOutcome>& outcomes() const { return outcomes_; }
    const std::vector<double>& demand_log() const { return demand_log_; }

    // flow balance across every link; throws on violation
    void check_conservation() const;

  private:
    struct LinkFlow {
        double shipped = 0.0;
        double received = 0.0;
        double damaged = 0.0;
    };

    void receive_arrivals(int day, DayOutcome& outcome);
    void upstream_replenishment(int day);
    void retailer_policy(int day, DayOutcome& outcome);
    void place_retailer_order(int day, double quantity);
    double ship(std::size_t from, std::size_t to, double quantity, int arrival);
    double draw_damage(double quantity);
    IndicatorRecord day_indicators(int day, const DayOutcome& outcome) const;

    Scenario scenario_;
    Policy policy_;
    std::vector<double> demand_stream_;
    std::mt19937_64 noise_rng_;

    std::array<NodeState, 4> nodes_;  // supplier, producer, distributor, retailer
    std::array<LinkFlow, 3> links_;   // s->p, p->d, d->r
    std::deque<double> recent_lost_;  // lost sales over the last lead window
    double recent_lost_sum_ = 0.0;

    forecast::DemandForecastState forecast_state_;
    ledger::LedgerChain chain_;
    std::vector<std::string> signer_ids_;

    std::vector<DayOutcome> outcomes_;
    std::vector<double> demand_log_;

    // cumulative tallies feeding the indicators
    double total_demand_ = 0.0;
    double total_served_ = 0.0;
    double inventory_integral_ = 0.0;
    int stockout_days_ = 0;
    int orders_placed_ = 0;
    int orders_committed_ = 0;
    int proposals_ = 0;
    int deliveries_ = 0;
    int on_time_deliveries_ = 0;
    double shipped_to_retailer_ = 0.0;
    double damaged_to_retailer_ = 0.0;
    std::deque<std::pair<double, double>> window_demand_;  // (demand, served)
};

struct PolicyMetrics {
    double avg_delivery_time_minutes = 0.0;
    double avg_reorder_interval_days = 0.0;
    double avg_order_quantity = 0.0;
    double fill_rate = 1.0;
    double on_time_rate = 1.0;
    double stockout_day_fraction = 0.0;
    int orders_placed = 0;
    int deliveries = 0;
    std::vector<IndicatorRecord> daily;  // first replication
    std::array<double, 4> efficiency_scores{};
    anfis::EfficiencyClass efficiency;
};

struct ZtState {
    std::string name;
    std::string description;
    std::array<double, 4> metrics;
};

struct SimulationRun {
    PolicyMetrics baseline;
    PolicyMetrics anfis;
    ledger::LedgerChain chain;       // anfis chain of the first replication
    std::vector<double> demand_log;  // shared stream of the first replication
    DecisionResult economics;
    std::vector<ZtState> zt_states;
};

/// Bernoulli(transaction) x discretized lognormal(size) stream for one
/// replication; replications derive distinct deterministic seeds.
std::vector<double> generate_demand(const Scenario& scenario, int replication);

/// Fuzzy band memberships of a composite service score, ordered
/// (Perfect, Good, Medium, Poor); also the Table-style metric vector.
std::array<double, 4> efficiency_scores(double composite);

/// Runs both policies on identical demand streams for every replication,
/// pools the metrics, optimizes the economic decisions, and emits the
/// eight perturbed-state metric vectors. The returned chain verifies.
SimulationRun run_simulation(const Scenario& scenario);

}  // namespace chainfis::sim

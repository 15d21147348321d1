#include "chainfis/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "chainfis/numfmt.hpp"

namespace chainfis::sim {

namespace {

constexpr std::size_t kSupplier = 0;
constexpr std::size_t kProducer = 1;
constexpr std::size_t kDistributor = 2;
constexpr std::size_t kRetailer = 3;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

// uniform [0,1) from the top 53 bits; portable across standard libraries
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller, spelled out so the stream does not depend on the stdlib
double draw_normal(std::mt19937_64& rng, double mu, double sigma) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
    return mu + sigma * radius * std::cos(2.0 * M_PI * u2);
}

ledger::Role signer_role(int index) {
    static const ledger::Role roles[] = {
        ledger::Role::supplier, ledger::Role::producer,
        ledger::Role::distributor, ledger::Role::retailer,
        ledger::Role::auditor};
    return roles[index % 5];
}

}  // namespace

std::vector<double> generate_demand(const Scenario& scenario, int replication) {
    std::mt19937_64 rng(mix_seed(scenario.seed, 0xDE000000ULL + replication));
    std::vector<double> stream(static_cast<std::size_t>(scenario.horizon_days));
    for (double& z : stream) {
        if (uniform01(rng) >= scenario.demand.probability) {
            z = 0.0;
            continue;
        }
        const double size = std::exp(
            draw_normal(rng, scenario.demand.size_mu, scenario.demand.size_sigma));
        z = std::max(1.0, std::round(size));
    }
    return stream;
}

std::array<double, 4> efficiency_scores(double composite) {
    using anfis::MembershipFunction;
    static const MembershipFunction bands[4] = {
        MembershipFunction::triangular(0.70, 1.00, 1.30),   // Perfect
        MembershipFunction::triangular(0.50, 0.75, 1.00),   // Good
        MembershipFunction::triangular(0.25, 0.50, 0.75),   // Medium
        MembershipFunction::triangular(-0.30, 0.20, 0.55),  // Poor
    };
    std::array<double, 4> scores{};
    for (std::size_t i = 0; i < 4; ++i) {
        scores[i] = bands[i].evaluate(composite);
    }
    return scores;
}

SupplyChainEngine::SupplyChainEngine(const Scenario& scenario, Policy policy,
                                     std::vector<double> demand_stream,
                                     std::uint64_t noise_seed)
    : scenario_(scenario),
      policy_(policy),
      demand_stream_(std::move(demand_stream)),
      noise_rng_(noise_seed) {
    if (demand_stream_.size() <
        static_cast<std::size_t>(scenario_.horizon_days)) {
        throw std::invalid_argument("simulator: demand stream shorter than horizon");
    }
    nodes_[kSupplier] = {ledger::Role::supplier,
                         scenario_.initial_inventory.supplier, {}, 1.0};
    nodes_[kProducer] = {ledger::Role::producer,
                         scenario_.initial_inventory.producer, {}, 1.0};
    nodes_[kDistributor] = {ledger::Role::distributor,
                            scenario_.initial_inventory.distributor, {}, 1.0};
    nodes_[kRetailer] = {ledger::Role::retailer,
                         scenario_.initial_inventory.retailer, {}, 1.0};

    forecast_state_.alpha = scenario_.anfis.alpha;
    forecast_state_.size_estimate = scenario_.anfis.initial_size_estimate;
    forecast_state_.interval_estimate = scenario_.anfis.initial_interval_estimate;
    forecast_state_.initialized = true;

    if (policy_ == Policy::anfis) {
        for (int i = 0; i < scenario_.ledger.n; ++i) {
            ledger::Stakeholder signer;
            signer.id = std::string(ledger::role_name(signer_role(i))) + "-" +
                        std::to_string(i);
            signer.role = signer_role(i);
            const std::string key_material =
                "chainfis-key/" + signer.id + "/" +
                std::to_string(scenario_.seed);
            const ledger::Hash key = ledger::sha256(
                ledger::Bytes(key_material.begin(), key_material.end()));
            signer.key.assign(key.begin(), key.end());
            signer_ids_.push_back(signer.id);
            chain_ = ledger::register_signer(chain_, std::move(signer),
                                             scenario_.epoch_seconds);
        }
    }
}

double SupplyChainEngine::draw_damage(double quantity) {
    if (scenario_.damage_probability <= 0.0) return 0.0;
    const auto units = static_cast<long long>(std::llround(quantity));
    double damaged = 0.0;
    for (long long u = 0; u < units; ++u) {
        if (uniform01(noise_rng_) < scenario_.damage_probability) damaged += 1.0;
    }
    return damaged;
}

double SupplyChainEngine::ship(std::size_t from, std::size_t to,
                               double quantity, int arrival) {
    const double shipped = std::min(quantity, nodes_[from].inventory);
    if (shipped <= 0.0) return 0.0;
    nodes_[from].inventory -= shipped;
    nodes_[to].pipeline.push_back({shipped, arrival});
    links_[to - 1].shipped += shipped;
    return shipped;
}

void SupplyChainEngine::receive_arrivals(int day, DayOutcome& outcome) {
    for (std::size_t node = kProducer; node <= kRetailer; ++node) {
        auto& pipeline = nodes_[node].pipeline;
        for (auto it = pipeline.begin(); it != pipeline.end();) {
            if (it->arrival_day != day) {
                ++it;
                continue;
            }
            const double damaged = draw_damage(it->quantity);
            const double received = it->quantity - damaged;
            nodes_[node].inventory += received;
            links_[node - 1].received += received;
            links_[node - 1].damaged += damaged;
            if (node == kRetailer) {
                const double minutes =
                    scenario_.delivery.base_minutes +
                    scenario_.delivery.congestion_per_unit * recent_lost_sum_;
                outcome.delivery_minutes.push_back(minutes);
                ++deliveries_;
                if (minutes <= scenario_.delivery.on_time_minutes) {
                    ++on_time_deliveries_;
                }
                shipped_to_retailer_ += it->quantity;
                damaged_to_retailer_ += damaged;
            }
            it = pipeline.erase(it);
        }
    }
}

void SupplyChainEngine::upstream_replenishment(int day) {
    nodes_[kSupplier].inventory += scenario_.upstream.supplier_production_per_day;

    auto replenish = [&](std::size_t node, double point, double quantity,
                         int lead, std::size_t source) {
        if (nodes_[node].inventory < point && nodes_[node].pipeline.empty()) {
            ship(source, node, quantity, day + lead);
        }
    };
    replenish(kProducer, scenario_.upstream.producer_reorder_point,
              scenario_.upstream.producer_reorder_quantity,
              scenario_.upstream.producer_lead_days, kSupplier);
    replenish(kDistributor, scenario_.upstream.distributor_reorder_point,
              scenario_.upstream.distributor_reorder_quantity,
              scenario_.upstream.distributor_lead_days, kProducer);
}

void SupplyChainEngine::place_retailer_order(int day, double quantity) {
    ++orders_placed_;
    ++orders_committed_;
    ship(kDistributor, kRetailer, quantity, day + scenario_.lead_time_days);
}

void SupplyChainEngine::retailer_policy(int day, DayOutcome& outcome) {
    if (policy_ == Policy::baseline) {
        if (day % scenario_.baseline.review_days == 0) {
            ++proposals_;
            outcome.reorder_quantity = scenario_.baseline.quantity;
            outcome.reorder_committed = true;
            place_retailer_order(day, scenario_.baseline.quantity);
        }
        return;
    }

    // anfis policy: evaluate the contract only when nothing is in flight,
    // then route the proposal through k-of-n signing before committing
    if (!nodes_[kRetailer].pipeline.empty()) return;

    ledger::ReorderParams params;
    params.safety_stock = scenario_.anfis.safety_stock;
    params.horizon_periods = scenario_.anfis.horizon_periods;
    params.timestamp = scenario_.epoch_seconds + static_cast<std::int64_t>(day) * 86400;
    params.variant = scenario_.anfis.variant;

    const auto proposal = ledger::evaluate_reorder_contract(
        nodes_[kRetailer].inventory, forecast_state_, params);
    if (!proposal) return;
    ++proposals_;

    ledger::SupplyChainEvent measurement;
    measurement.kind = ledger::EventKind::Measurement;
    measurement.payload["period"] = std::to_string(day);
    measurement.payload["inventory"] = format_full(nodes_[kRetailer].inventory);
    measurement.payload["location"] = "retailer";
    measurement.timestamp = params.timestamp;

    const std::set<std::string> required(signer_ids_.begin(), signer_ids_.end());
    auto tx = ledger::propose_transaction(chain_, {measurement, *proposal},
                                          required, scenario_.ledger.k);
    for (int i = 0; i < scenario_.ledger.k; ++i) {
        tx = ledger::add_signature(tx, *chain_.find_signer(signer_ids_[i]));
    }
    try {
        chain_ = ledger::seal_block(chain_, {tx}, params.timestamp);
    } catch (const std::runtime_error&) {
        return;  // under-signed proposal never touches inventory
    }
    const double quantity = std::stod(proposal->payload.at("quantity"));
    outcome.reorder_quantity = quantity;
    outcome.reorder_committed = true;
    place_retailer_order(day, quantity);
}

IndicatorRecord SupplyChainEngine::day_indicators(int day,
                                                  const DayOutcome& outcome) const {
    IndicatorRecord r;
    r.stage = std::to_string(day + 1);

    const double fill =
        total_demand_ > 0.0 ? total_served_ / total_demand_ : 1.0;
    double in_transit = 0.0;
    for (const PipelineOrder& order : nodes_[kRetailer].pipeline) {
        in_transit += order.quantity;
    }
    const double on_time_rate =
        deliveries_ > 0 ? static_cast<double>(on_time_deliveries_) / deliveries_
                        : 1.0;
    double window_demand = 0.0, window_served = 0.0;
    for (const auto& [demand, served] : window_demand_) {
        window_demand += demand;
        window_served += served;
    }

    r.quality_p1 = 100.0 * fill;
    const double available =
        nodes_[kRetailer].inventory + outcome.served + in_transit;
    r.material_p2 = available > 0.0 ? -100.0 * outcome.served / available : 0.0;
    r.logistic_p3 =
        (nodes_[kRetailer].inventory + in_transit) > 0.0
            ? 100.0 * in_transit / (nodes_[kRetailer].inventory + in_transit)
            : 0.0;
    r.purchase_p4 = orders_placed_ > 0
                        ? 100.0 * std::min(1.0, static_cast<double>(deliveries_) /
                                                    orders_placed_)
                        : 100.0;
    r.order_plan_l1 =
        proposals_ > 0
            ? 100.0 * static_cast<double>(orders_committed_) / proposals_
            : 100.0;
    r.order_speed_l2 = static_cast<double>(scenario_.lead_time_days);
    r.delivery_c1 = 100.0 * on_time_rate;
    r.volume_c2 =
        window_demand > 0.0 ? 100.0 * window_served / window_demand : 100.0;
    r.node_satisfaction_c4 = 5.0 * fill;
    r.outbound_error_s1 = 100.0 * (1.0 - fill);
    r.damage_s2 = shipped_to_retailer_ > 0.0
                      ? 100.0 * damaged_to_retailer_ / shipped_to_retailer_
                      : 0.0;
    const double mean_inventory = inventory_integral_ / (day + 1);
    r.turnover_s3 = mean_inventory > 0.0 ? total_served_ / mean_inventory : 0.0;
    r.zero_inventory = static_cast<double>(stockout_days_);
    r.delivery_error_c3 = 100.0 * (1.0 - on_time_rate);
    return r;
}

DayOutcome SupplyChainEngine::step_day(int day) {
    DayOutcome outcome;
    outcome.day = day;

    receive_arrivals(day, outcome);
    upstream_replenishment(day);
    retailer_policy(day, outcome);

    const double demand = demand_stream_[static_cast<std::size_t>(day)];
    const double served = std::min(demand, nodes_[kRetailer].inventory);
    nodes_[kRetailer].inventory -= served;
    outcome.demand = demand;
    outcome.served = served;
    outcome.lost = demand - served;
    demand_log_.push_back(demand);

    total_demand_ += demand;
    total_served_ += served;
    if (outcome.lost > 0.0) ++stockout_days_;
    inventory_integral_ += nodes_[kRetailer].inventory;

    recent_lost_.push_back(outcome.lost);
    recent_lost_sum_ += outcome.lost;
    while (recent_lost_.size() >
           static_cast<std::size_t>(scenario_.lead_time_days)) {
        recent_lost_sum_ -= recent_lost_.front();
        recent_lost_.pop_front();
    }
    window_demand_.emplace_back(demand, served);
    while (window_demand_.size() > 7) window_demand_.pop_front();

    if (policy_ == Policy::anfis) {
        forecast_state_ =
            forecast::croston_update(forecast_state_, demand, day + 1);
    }

    nodes_[kRetailer].service_level =
        total_demand_ > 0.0 ? total_served_ / total_demand_ : 1.0;

    outcome.indicators = day_indicators(day, outcome);
    outcomes_.push_back(outcome);
    check_conservation();
    return outcomes_.back();
}

void SupplyChainEngine::run() {
    for (int day = 0; day < scenario_.horizon_days; ++day) {
        step_day(day);
    }
}

void SupplyChainEngine::check_conservation() const {
    for (std::size_t link = 0; link < links_.size(); ++link) {
        double in_transit = 0.0;
        for (const PipelineOrder& order : nodes_[link + 1].pipeline) {
            in_transit += order.quantity;
        }
        const double balance = links_[link].shipped - links_[link].received -
                               links_[link].damaged - in_transit;
        if (std::abs(balance) > 1e-6) {
            throw std::logic_error("simulator: flow imbalance on link " +
                                   std::to_string(link));
        }
    }
    for (const NodeState& node : nodes_) {
        if (node.inventory < 0.0) {
            throw std::logic_error("simulator: negative inventory");
        }
    }
}

namespace {

struct PolicyPool {
    double minutes_sum = 0.0;
    int deliveries = 0;
    int on_time = 0;
    double quantity_sum = 0.0;
    int orders = 0;
    double interval_sum = 0.0;
    int intervals = 0;
    double demand_sum = 0.0;
    double served_sum = 0.0;
    int stockout_days = 0;
    int days = 0;
    std::vector<IndicatorRecord> daily;

    void absorb(const SupplyChainEngine& engine, double on_time_minutes,
                bool keep_daily) {
        int previous_order_day = -1;
        for (const DayOutcome& outcome : engine.outcomes()) {
            for (double minutes : outcome.delivery_minutes) {
                minutes_sum += minutes;
                ++deliveries;
                if (minutes <= on_time_minutes) ++on_time;
            }
            if (outcome.reorder_committed) {
                quantity_sum += outcome.reorder_quantity;
                ++orders;
                if (previous_order_day >= 0) {
                    interval_sum += outcome.day - previous_order_day;
                    ++intervals;
                }
                previous_order_day = outcome.day;
            }
            demand_sum += outcome.demand;
            served_sum += outcome.served;
            if (outcome.lost > 0.0) ++stockout_days;
            ++days;
            if (keep_daily) daily.push_back(outcome.indicators);
        }
    }

    PolicyMetrics finalize() const {
        PolicyMetrics m;
        m.avg_delivery_time_minutes =
            deliveries > 0 ? minutes_sum / deliveries : 0.0;
        m.avg_reorder_interval_days =
            intervals > 0 ? interval_sum / intervals : 0.0;
        m.avg_order_quantity = orders > 0 ? quantity_sum / orders : 0.0;
        m.fill_rate = demand_sum > 0.0 ? served_sum / demand_sum : 1.0;
        m.on_time_rate =
            deliveries > 0 ? static_cast<double>(on_time) / deliveries : 1.0;
        m.stockout_day_fraction =
            days > 0 ? static_cast<double>(stockout_days) / days : 0.0;
        m.orders_placed = orders;
        m.deliveries = deliveries;
        m.daily = daily;
        const double composite = 0.4 * m.fill_rate + 0.3 * m.on_time_rate +
                                 0.3 * (1.0 - m.stockout_day_fraction);
        m.efficiency_scores = efficiency_scores(composite);
        m.efficiency = anfis::classify_efficiency(m.efficiency_scores);
        return m;
    }
};

}  // namespace

SimulationRun run_simulation(const Scenario& scenario) {
    SimulationRun out;
    PolicyPool baseline_pool;
    PolicyPool anfis_pool;

    for (int rep = 0; rep < scenario.replications; ++rep) {
        const std::vector<double> stream = generate_demand(scenario, rep);
        const std::uint64_t noise = mix_seed(scenario.seed, 0xA0000000ULL + rep);

        SupplyChainEngine baseline(scenario, Policy::baseline, stream, noise);
        baseline.run();
        SupplyChainEngine anfis_engine(scenario, Policy::anfis, stream, noise);
        anfis_engine.run();

        if (baseline.demand_log() != anfis_engine.demand_log()) {
            throw std::logic_error("simulator: policies saw different demand");
        }
        const ledger::VerifyReport report =
            ledger::verify_chain(anfis_engine.chain());
        if (!report.ok) {
            throw std::logic_error("simulator: chain failed verification: " +
                                   report.reason);
        }

        baseline_pool.absorb(baseline, scenario.delivery.on_time_minutes,
                             rep == 0);
        anfis_pool.absorb(anfis_engine, scenario.delivery.on_time_minutes,
                          rep == 0);
        if (rep == 0) {
            out.chain = anfis_engine.chain();
            out.demand_log = stream;
        }
    }

    out.baseline = baseline_pool.finalize();
    out.anfis = anfis_pool.finalize();
    out.economics =
        optimize_decisions(scenario.economics, scenario.economics_bounds);

    // eight perturbed states: demand rate, lead time, and safety stock
    for (int state = 0; state < 8; ++state) {
        Scenario z = scenario;
        z.replications = 1;
        z.demand.probability =
            std::min(1.0, z.demand.probability * ((state & 1) ? 1.05 : 0.95));
        z.lead_time_days = std::max(1, z.lead_time_days + ((state & 2) ? 1 : -1));
        z.anfis.safety_stock *= (state & 4) ? 1.2 : 0.8;

        SupplyChainEngine engine(z, Policy::anfis, generate_demand(z, 0),
                                 mix_seed(z.seed, 0x27000000ULL + state));
        engine.run();
        PolicyPool pool;
        pool.absorb(engine, z.delivery.on_time_minutes, false);
        const PolicyMetrics metrics = pool.finalize();

        ZtState zt;
        zt.name = "Zt " + std::to_string(state + 1);
        zt.description = std::string("demand") + ((state & 1) ? "+5%" : "-5%") +
                         " lead" + ((state & 2) ? "+1d" : "-1d") + " safety" +
                         ((state & 4) ? "+20%" : "-20%");
        zt.metrics = metrics.efficiency_scores;
        out.zt_states.push_back(std::move(zt));
    }
    return out;
}

}  // namespace chainfis::sim

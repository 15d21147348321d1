#include "chainfis/scenario.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace chainfis::sim {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

}  // namespace

Scenario load_scenario(std::istream& in) {
    Scenario s;

    using Setter = std::function<void(const std::string&)>;
    std::map<std::string, Setter> keys;
    auto real = [](double& field) {
        return [&field](const std::string& v) { field = std::stod(v); };
    };
    auto integer = [](int& field) {
        return [&field](const std::string& v) { field = std::stoi(v); };
    };

    keys["horizon_days"] = integer(s.horizon_days);
    keys["seed"] = [&s](const std::string& v) { s.seed = std::stoull(v); };
    keys["replications"] = integer(s.replications);
    keys["lead_time_days"] = integer(s.lead_time_days);
    keys["epoch_seconds"] = [&s](const std::string& v) {
        s.epoch_seconds = std::stoll(v);
    };
    keys["demand.probability"] = real(s.demand.probability);
    keys["demand.size_mu"] = real(s.demand.size_mu);
    keys["demand.size_sigma"] = real(s.demand.size_sigma);
    keys["policy.baseline.review_days"] = integer(s.baseline.review_days);
    keys["policy.baseline.quantity"] = real(s.baseline.quantity);
    keys["policy.anfis.alpha"] = real(s.anfis.alpha);
    keys["policy.anfis.horizon_periods"] = integer(s.anfis.horizon_periods);
    keys["policy.anfis.safety_stock"] = real(s.anfis.safety_stock);
    keys["policy.anfis.initial_size_estimate"] =
        real(s.anfis.initial_size_estimate);
    keys["policy.anfis.initial_interval_estimate"] =
        real(s.anfis.initial_interval_estimate);
    keys["policy.anfis.sba_variant"] = [&s](const std::string& v) {
        if (v == "paper") {
            s.anfis.variant = forecast::SbaVariant::paper;
        } else if (v == "textbook") {
            s.anfis.variant = forecast::SbaVariant::textbook;
        } else {
            throw std::invalid_argument("sba_variant must be paper or textbook");
        }
    };
    keys["ledger.n"] = integer(s.ledger.n);
    keys["ledger.k"] = integer(s.ledger.k);
    keys["delivery.base_minutes"] = real(s.delivery.base_minutes);
    keys["delivery.congestion_per_unit"] = real(s.delivery.congestion_per_unit);
    keys["delivery.on_time_minutes"] = real(s.delivery.on_time_minutes);
    keys["initial_inventory.retailer"] = real(s.initial_inventory.retailer);
    keys["initial_inventory.distributor"] = real(s.initial_inventory.distributor);
    keys["initial_inventory.producer"] = real(s.initial_inventory.producer);
    keys["initial_inventory.supplier"] = real(s.initial_inventory.supplier);
    keys["upstream.supplier_production_per_day"] =
        real(s.upstream.supplier_production_per_day);
    keys["upstream.distributor_reorder_point"] =
        real(s.upstream.distributor_reorder_point);
    keys["upstream.distributor_reorder_quantity"] =
        real(s.upstream.distributor_reorder_quantity);
    keys["upstream.distributor_lead_days"] =
        integer(s.upstream.distributor_lead_days);
    keys["upstream.producer_reorder_point"] =
        real(s.upstream.producer_reorder_point);
    keys["upstream.producer_reorder_quantity"] =
        real(s.upstream.producer_reorder_quantity);
    keys["upstream.producer_lead_days"] = integer(s.upstream.producer_lead_days);
    keys["damage.probability"] = real(s.damage_probability);
    keys["economics.e"] = real(s.economics.e);
    keys["economics.c_s"] = real(s.economics.c_s);
    keys["economics.c_a"] = real(s.economics.c_a);
    keys["economics.c_t"] = real(s.economics.c_t);
    keys["economics.lambda_s"] = real(s.economics.lambda_s);
    keys["economics.lambda"] = real(s.economics.lambda);
    keys["economics.lambda_r"] = real(s.economics.lambda_r);
    keys["economics.a"] = real(s.economics.a);
    keys["economics.beta"] = real(s.economics.beta);
    keys["economics.theta"] = real(s.economics.theta);
    keys["economics.phi"] = real(s.economics.phi);
    keys["economics.w"] = real(s.economics.w);
    keys["economics.c_r"] = real(s.economics.c_r);
    keys["economics.c"] = real(s.economics.c);
    keys["economics.p_min"] = real(s.economics_bounds.p_lo);
    keys["economics.p_max"] = real(s.economics_bounds.p_hi);
    keys["economics.q_min"] = real(s.economics_bounds.q_lo);
    keys["economics.q_max"] = real(s.economics_bounds.q_hi);
    keys["economics.a_min"] = real(s.economics_bounds.a_lo);
    keys["economics.a_max"] = real(s.economics_bounds.a_hi);

    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("scenario: line " +
                                     std::to_string(line_number) +
                                     " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) {
            throw std::runtime_error("scenario: unknown key '" + key +
                                     "' at line " + std::to_string(line_number));
        }
        try {
            it->second(value);
        } catch (const std::exception& e) {
            throw std::runtime_error("scenario: bad value for '" + key +
                                     "' at line " + std::to_string(line_number) +
                                     ": " + e.what());
        }
    }

    if (s.horizon_days < 1 || s.replications < 1 || s.lead_time_days < 1) {
        throw std::runtime_error("scenario: horizon, replications and lead time must be >= 1");
    }
    if (s.ledger.k < 1 || s.ledger.k > s.ledger.n) {
        throw std::runtime_error("scenario: ledger.k must be in [1, ledger.n]");
    }
    if (!(s.demand.probability >= 0.0 && s.demand.probability <= 1.0)) {
        throw std::runtime_error("scenario: demand.probability outside [0,1]");
    }
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("scenario: cannot open " + path);
    }
    return load_scenario(in);
}

}  // namespace chainfis::sim

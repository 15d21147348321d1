#include "chainfis/forecast.hpp"

#include <cmath>
#include <stdexcept>

namespace chainfis::forecast {

SmoothingState ses_update(SmoothingState state, double observation) {
    if (!(state.alpha >= 0.0 && state.alpha <= 1.0)) {
        throw std::invalid_argument("forecast: alpha outside [0,1]");
    }
    state.forecast += state.alpha * (observation - state.forecast);
    return state;
}

double ses_expand(double alpha, std::span<const double> observations,
                  double initial_forecast) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("forecast: alpha outside [0,1]");
    }
    if (observations.empty()) {
        throw std::invalid_argument("forecast: empty observation list");
    }
    const std::size_t n = observations.size();
    double value = std::pow(1.0 - alpha, static_cast<double>(n)) * initial_forecast;
    for (std::size_t i = 0; i < n; ++i) {
        // newest observation carries weight alpha, older ones decay by (1-alpha)
        const double age = static_cast<double>(n - 1 - i);
        value += alpha * std::pow(1.0 - alpha, age) * observations[i];
    }
    return value;
}

DemandForecastState croston_update(DemandForecastState state, double demand,
                                   std::int64_t current_period) {
    if (demand < 0.0) {
        throw std::invalid_argument("forecast: negative demand");
    }
    if (!(state.alpha >= 0.0 && state.alpha <= 1.0)) {
        throw std::invalid_argument("forecast: alpha outside [0,1]");
    }
    if (current_period <= state.last_observation_period) {
        throw std::invalid_argument("forecast: period does not advance");
    }
    if (demand == 0.0) {
        return state;  // no transaction, estimates stay put
    }
    if (!state.initialized) {
        state.size_estimate = demand;
        state.interval_estimate =
            static_cast<double>(current_period > 1 ? current_period : 1);
        state.last_observation_period = current_period;
        state.initialized = true;
        return state;
    }
    const double gap =
        static_cast<double>(current_period - state.last_observation_period);
    state.size_estimate += state.alpha * (demand - state.size_estimate);
    state.interval_estimate += state.alpha * (gap - state.interval_estimate);
    state.last_observation_period = current_period;
    return state;
}

double croston_rate(const DemandForecastState& state) {
    if (!state.initialized) {
        throw std::domain_error("forecast: croston state not initialized");
    }
    return state.size_estimate / state.interval_estimate;
}

double sba_forecast(const DemandForecastState& state, SbaVariant variant) {
    const double half_alpha = state.alpha / 2.0;
    const double denom = variant == SbaVariant::paper
                             ? state.interval_estimate - half_alpha
                             : state.interval_estimate;
    if (denom <= 0.0) {
        throw std::domain_error("forecast: sba denominator not positive");
    }
    return (1.0 - half_alpha) * state.size_estimate / denom;
}

}  // namespace chainfis::forecast

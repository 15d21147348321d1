#pragma once

#include <cstdint>
#include <span>

namespace chainfis::forecast {

/// Single exponential smoothing state. alpha in (0,1]; alpha = 0 is
/// tolerated as the degenerate identity update.
struct SmoothingState {
    double alpha = 0.1;
    double forecast = 0.0;
};

/// F' = F + alpha * (x - F).
SmoothingState ses_update(SmoothingState state, double observation);

/// Unrolled smoothing over a chronological observation list:
/// sum_j alpha*(1-alpha)^j * x_{t-j} plus the (1-alpha)^T * F_0 tail.
/// Equals folding ses_update over the same observations.
double ses_expand(double alpha, std::span<const double> observations,
                  double initial_forecast);

/// Croston state: separately smoothed transaction size and
/// inter-transaction interval. Periods are the caller's clock; the state
/// only remembers when the last nonzero demand was seen.
struct DemandForecastState {
    double alpha = 0.1;
    double size_estimate = 0.0;      // units per transaction
    double interval_estimate = 1.0;  // periods between transactions
    std::int64_t last_observation_period = 0;
    bool initialized = false;
};

/// Zero demand leaves the state untouched. The first nonzero demand seeds
/// the estimates (size = demand, interval = its period index, at least 1);
/// later nonzero demands are smoothed with the state's alpha.
DemandForecastState croston_update(DemandForecastState state, double demand,
                                   std::int64_t current_period);

/// Per-period demand rate: size / interval. Requires an initialized state.
double croston_rate(const DemandForecastState& state);

enum class SbaVariant {
    paper,     // (1 - a/2) * z / (p - a/2)
    textbook,  // (1 - a/2) * z / p
};

/// Smoothed per-period forecast. The paper variant divides by
/// (interval - alpha/2) and is the default; with alpha = 0 both variants
/// collapse to croston_rate.
double sba_forecast(const DemandForecastState& state,
                    SbaVariant variant = SbaVariant::paper);

}  // namespace chainfis::forecast

#include "chainfis/economics.hpp"

#include <algorithm>
#include <stdexcept>

namespace chainfis::sim {

namespace {

constexpr int kGridPoints = 41;

double grid_value(double lo, double hi, int index, int points) {
    if (points == 1) return lo;
    return lo + (hi - lo) * index / (points - 1);
}

// supplier best response in effort for a fixed volume
double best_effort(const EconomicParams& params, double q0, double a_lo,
                   double a_hi, int points) {
    double best_a = a_lo;
    double best = profit_supplier(params, q0, a_lo);
    for (int i = 1; i < points; ++i) {
        const double a0 = grid_value(a_lo, a_hi, i, points);
        const double value = profit_supplier(params, q0, a0);
        if (value > best) {
            best = value;
            best_a = a0;
        }
    }
    return best_a;
}

DecisionResult scan(const EconomicParams& params, double p_lo, double p_hi,
                    double q_lo, double q_hi, double a_lo, double a_hi) {
    DecisionResult best;
    bool first = true;
    for (int qi = 0; qi < kGridPoints; ++qi) {
        const double q0 = grid_value(q_lo, q_hi, qi, kGridPoints);
        const double a0 = best_effort(params, q0, a_lo, a_hi, kGridPoints);
        for (int pi = 0; pi < kGridPoints; ++pi) {
            const double p0 = grid_value(p_lo, p_hi, pi, kGridPoints);
            const double value = profit_retailer(params, p0, q0, a0);
            if (first || value > best.retailer_profit) {
                first = false;
                best = {p0, q0, a0, profit_supplier(params, q0, a0), value};
            }
        }
    }
    return best;
}

}  // namespace

double profit_supplier(const EconomicParams& params, double q0, double a0) {
    return q0 * (params.e - params.c_s) - params.c_a * a0 * a0 / 2.0 -
           (params.lambda_s * q0 + a0) * params.c_t;
}

double profit_retailer(const EconomicParams& params, double p0, double q0,
                       double a0) {
    const double demand = params.a * q0 * (1.0 - params.lambda) -
                          params.beta * p0 +
                          params.theta * a0 * (1.0 - params.phi);
    return demand * (p0 - params.c_r) -
           q0 * (params.w + params.lambda_r * params.c_t) -
           params.c / (q0 * q0);
}

DecisionResult optimize_decisions(const EconomicParams& params,
                                  const DecisionBounds& bounds) {
    if (!(bounds.p_lo <= bounds.p_hi) || !(bounds.q_lo <= bounds.q_hi) ||
        !(bounds.a_lo <= bounds.a_hi)) {
        throw std::invalid_argument("economics: empty decision box");
    }
    if (!(bounds.q_lo > 0.0)) {
        throw std::invalid_argument("economics: volume floor must be > 0");
    }

    const DecisionResult coarse = scan(params, bounds.p_lo, bounds.p_hi,
                                       bounds.q_lo, bounds.q_hi, bounds.a_lo,
                                       bounds.a_hi);

    // refine one coarse cell around the incumbent, clipped to the box
    const double p_cell = (bounds.p_hi - bounds.p_lo) / (kGridPoints - 1);
    const double q_cell = (bounds.q_hi - bounds.q_lo) / (kGridPoints - 1);
    const double a_cell = (bounds.a_hi - bounds.a_lo) / (kGridPoints - 1);
    const DecisionResult fine =
        scan(params, std::max(bounds.p_lo, coarse.p0 - p_cell),
             std::min(bounds.p_hi, coarse.p0 + p_cell),
             std::max(bounds.q_lo, coarse.q0 - q_cell),
             std::min(bounds.q_hi, coarse.q0 + q_cell),
             std::max(bounds.a_lo, coarse.a0 - a_cell),
             std::min(bounds.a_hi, coarse.a0 + a_cell));

    return fine.retailer_profit >= coarse.retailer_profit ? fine : coarse;
}

}  // namespace chainfis::sim

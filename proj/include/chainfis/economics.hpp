#pragma once

namespace chainfis::sim {

/// Currency-normalized parameters of the supplier/retailer profit pair.
struct EconomicParams {
    double e = 5.0;         // unit wholesale revenue
    double c_s = 3.0;       // unit production cost
    double c_a = 1.0;       // online-service cost coefficient (> 0)
    double c_t = 0.5;       // transaction/logistics unit cost
    double lambda_s = 0.2;  // supplier logistics scaling
    double lambda = 0.1;    // demand dilution
    double lambda_r = 0.3;  // retailer logistics scaling
    double a = 1.5;         // market size coefficient
    double beta = 1.0;      // price sensitivity (> 0)
    double theta = 0.4;     // online-effort demand lift
    double phi = 0.2;       // effort dilution
    double w = 2.0;         // wholesale price
    double c_r = 1.0;       // retailer unit cost
    double c = 1.0;         // retailer fixed-cost coefficient
};

/// Supplier profit at a given order volume and online effort:
/// q*(e - c_s) - c_a*a0^2/2 - (lambda_s*q + a0)*c_t.
double profit_supplier(const EconomicParams& params, double q0, double a0);

/// Retailer profit:
/// [a*q*(1-lambda) - beta*p + theta*a0*(1-phi)]*(p - c_r)
///   - q*(w + lambda_r*c_t) - c/q^2.
double profit_retailer(const EconomicParams& params, double p0, double q0,
                       double a0);

/// Search box for (price, volume, effort). The volume floor must stay
/// above zero because of the c/q^2 term.
struct DecisionBounds {
    double p_lo = 0.5, p_hi = 5.0;
    double q_lo = 1.0, q_hi = 30.0;
    double a_lo = 0.0, a_hi = 5.0;
};

struct DecisionResult {
    double p0 = 0.0;
    double q0 = 0.0;
    double a0 = 0.0;
    double supplier_profit = 0.0;
    double retailer_profit = 0.0;
};

/// Deterministic sequential search: a 41-point grid per axis picks the
/// retailer-profit incumbent with the effort set to the supplier's best
/// response per volume, then one 10x-finer pass around the incumbent.
DecisionResult optimize_decisions(const EconomicParams& params,
                                  const DecisionBounds& bounds);

}  // namespace chainfis::sim

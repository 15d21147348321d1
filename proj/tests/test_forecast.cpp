#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "chainfis/forecast.hpp"

using namespace chainfis;

TEST_CASE("ses_update direct substitutions") {
    forecast::SmoothingState s{1.0, 10.0};
    CHECK(forecast::ses_update(s, 20.0).forecast == 20.0);

    s = {0.0, 10.0};
    CHECK(forecast::ses_update(s, 20.0).forecast == 10.0);

    s = {0.5, 10.0};
    CHECK(forecast::ses_update(s, 20.0).forecast == doctest::Approx(15.0));
}

TEST_CASE("ses_expand base cases") {
    const std::vector<double> one = {4.0};
    CHECK(forecast::ses_expand(0.5, one, 0.0) == doctest::Approx(2.0));

    const std::vector<double> constant(12, 3.5);
    CHECK(forecast::ses_expand(0.3, constant, 3.5) ==
          doctest::Approx(3.5).epsilon(1e-12));

    CHECK_THROWS_AS(forecast::ses_expand(0.5, {}, 0.0), std::invalid_argument);
}

TEST_CASE("unrolled smoothing equals the recursion") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> value(-50.0, 50.0);
    std::uniform_int_distribution<int> length(1, 50);
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = 0.1 * (1 + trial % 9);
        const double f0 = value(rng);
        std::vector<double> xs(static_cast<std::size_t>(length(rng)));
        for (double& x : xs) x = value(rng);

        forecast::SmoothingState s{alpha, f0};
        for (double x : xs) s = forecast::ses_update(s, x);

        const double expanded = forecast::ses_expand(alpha, xs, f0);
        CHECK(std::abs(expanded - s.forecast) < 1e-12 * std::max(1.0, std::abs(s.forecast)));
    }
}

TEST_CASE("croston updates follow the printed recurrences") {
    forecast::DemandForecastState s;
    s.alpha = 0.1;
    s.size_estimate = 8.0;
    s.interval_estimate = 3.0;
    s.last_observation_period = 2;
    s.initialized = true;

    SUBCASE("zero demand leaves every field untouched") {
        const auto next = forecast::croston_update(s, 0.0, 3);
        CHECK(next.size_estimate == s.size_estimate);
        CHECK(next.interval_estimate == s.interval_estimate);
        CHECK(next.last_observation_period == s.last_observation_period);
        CHECK(next.initialized == s.initialized);
        CHECK(next.alpha == s.alpha);
    }
    SUBCASE("size estimate smooths toward the new demand") {
        const auto next = forecast::croston_update(s, 10.0, 3);
        CHECK(next.size_estimate == doctest::Approx(8.2));
        CHECK(next.last_observation_period == 3);
    }
    SUBCASE("interval estimate smooths toward the observed gap") {
        const auto next = forecast::croston_update(s, 8.0, 7);  // gap of 5
        CHECK(next.interval_estimate == doctest::Approx(3.2));
    }
    SUBCASE("negative demand is rejected") {
        CHECK_THROWS_AS(forecast::croston_update(s, -1.0, 3),
                        std::invalid_argument);
    }
    SUBCASE("period must advance") {
        CHECK_THROWS_AS(forecast::croston_update(s, 1.0, 2),
                        std::invalid_argument);
    }
}

TEST_CASE("first nonzero demand seeds the estimates") {
    forecast::DemandForecastState fresh;
    fresh.alpha = 0.2;
    const auto s = forecast::croston_update(fresh, 4.0, 3);
    CHECK(s.initialized);
    CHECK(s.size_estimate == 4.0);
    CHECK(s.interval_estimate == 3.0);
    CHECK(s.last_observation_period == 3);

    // first demand in period 1 still yields an interval of at least one
    const auto t = forecast::croston_update(fresh, 4.0, 1);
    CHECK(t.interval_estimate == 1.0);
}

TEST_CASE("croston_rate") {
    forecast::DemandForecastState s;
    s.size_estimate = 8.2;
    s.interval_estimate = 2.0;
    s.initialized = true;
    CHECK(forecast::croston_rate(s) == doctest::Approx(4.1));

    s.size_estimate = 0.0;
    CHECK(forecast::croston_rate(s) == 0.0);

    forecast::DemandForecastState fresh;
    CHECK_THROWS_AS(forecast::croston_rate(fresh), std::domain_error);
}

TEST_CASE("steady demand drives the rate to the demand size") {
    forecast::DemandForecastState s;
    s.alpha = 0.1;
    for (std::int64_t period = 1; period <= 200; ++period) {
        s = forecast::croston_update(s, 5.0, period);
    }
    CHECK(std::abs(s.interval_estimate - 1.0) < 1e-3);
    CHECK(std::abs(forecast::croston_rate(s) - 5.0) < 1e-3);
}

TEST_CASE("sba_forecast implements the printed formula") {
    forecast::DemandForecastState s;
    s.alpha = 0.1;
    s.size_estimate = 10.0;
    s.interval_estimate = 2.0;
    s.initialized = true;

    CHECK(std::abs(forecast::sba_forecast(s) - 0.95 * 10.0 / 1.95) < 1e-9);
    CHECK(forecast::sba_forecast(s, forecast::SbaVariant::textbook) ==
          doctest::Approx(0.95 * 10.0 / 2.0));

    SUBCASE("alpha zero collapses to the croston rate exactly") {
        s.alpha = 0.0;
        CHECK(forecast::sba_forecast(s) == forecast::croston_rate(s));
        CHECK(forecast::sba_forecast(s, forecast::SbaVariant::textbook) ==
              forecast::croston_rate(s));
    }
    SUBCASE("non-positive denominator is a domain error") {
        s.interval_estimate = 0.05;
        s.alpha = 0.1;
        CHECK_THROWS_AS(forecast::sba_forecast(s), std::domain_error);
    }
}

TEST_CASE("forecasts stay non-negative for non-negative demand") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    forecast::DemandForecastState s;
    s.alpha = 0.3;
    std::int64_t period = 0;
    for (int step = 0; step < 500; ++step) {
        const double demand = unit(rng) < 0.4 ? unit(rng) * 12.0 : 0.0;
        s = forecast::croston_update(s, demand, ++period);
        if (s.initialized) {
            CHECK(forecast::croston_rate(s) >= 0.0);
            CHECK(forecast::sba_forecast(s) >= 0.0);
        }
    }
}

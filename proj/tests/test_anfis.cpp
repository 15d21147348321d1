#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "chainfis/anfis.hpp"
#include "chainfis/fcm.hpp"

using namespace chainfis;

namespace {

anfis::Dataset line_dataset(double slope, double intercept, int points,
                            double lo, double hi) {
    anfis::Dataset data;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        data.inputs.push_back({x});
        data.targets.push_back({slope * x + intercept});
    }
    return data;
}

// Small random model with antecedents centered inside the data range so
// firing strengths stay healthy.
anfis::FuzzyInferenceModel random_model(std::mt19937_64& rng, std::size_t dim,
                                        std::size_t rules) {
    std::uniform_real_distribution<double> center(-1.0, 1.0);
    std::uniform_real_distribution<double> spread(0.4, 1.5);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    anfis::FuzzyInferenceModel model;
    model.input_dim = dim;
    model.output_dim = 1;
    for (std::size_t r = 0; r < rules; ++r) {
        anfis::FuzzyRule rule;
        for (std::size_t d = 0; d < dim; ++d) {
            rule.antecedent.push_back(
                anfis::MembershipFunction::gaussian(center(rng), spread(rng)));
        }
        std::vector<double> row(dim + 1);
        for (double& v : row) v = coeff(rng);
        rule.consequent.push_back(std::move(row));
        model.rules.push_back(std::move(rule));
    }
    return model;
}

anfis::Dataset random_dataset(std::mt19937_64& rng, std::size_t dim,
                              std::size_t count) {
    std::uniform_real_distribution<double> x(-1.0, 1.0);
    std::uniform_real_distribution<double> y(-2.0, 2.0);
    anfis::Dataset data;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> input(dim);
        for (double& v : input) v = x(rng);
        data.inputs.push_back(std::move(input));
        data.targets.push_back({y(rng)});
    }
    return data;
}

std::vector<double> finite_difference_gradient(
    anfis::FuzzyInferenceModel model, const anfis::Dataset& data, double h) {
    std::vector<double> grad;
    for (std::size_t r = 0; r < model.rules.size(); ++r) {
        for (std::size_t d = 0; d < model.input_dim; ++d) {
            for (int which = 0; which < 2; ++which) {
                double& param = which == 0 ? model.rules[r].antecedent[d].p0
                                           : model.rules[r].antecedent[d].p1;
                const double saved = param;
                param = saved + h;
                const double up = anfis::rmse(model, data);
                param = saved - h;
                const double down = anfis::rmse(model, data);
                param = saved;
                grad.push_back((up - down) / (2.0 * h));
            }
        }
    }
    return grad;
}

}  // namespace

TEST_CASE("membership functions evaluate into [0,1]") {
    const auto g = anfis::MembershipFunction::gaussian(2.0, 0.5);
    CHECK(g.evaluate(2.0) == 1.0);
    CHECK(g.evaluate(2.5) == doctest::Approx(std::exp(-0.5)));

    const auto t = anfis::MembershipFunction::triangular(0.0, 1.0, 3.0);
    CHECK(t.evaluate(1.0) == 1.0);
    CHECK(t.evaluate(0.5) == doctest::Approx(0.5));
    CHECK(t.evaluate(2.0) == doctest::Approx(0.5));
    CHECK(t.evaluate(-0.1) == 0.0);
    CHECK(t.evaluate(3.1) == 0.0);

    for (double x = -5.0; x <= 5.0; x += 0.1) {
        CHECK(g.evaluate(x) >= 0.0);
        CHECK(g.evaluate(x) <= 1.0);
        CHECK(t.evaluate(x) >= 0.0);
        CHECK(t.evaluate(x) <= 1.0);
    }

    CHECK_THROWS_AS(anfis::MembershipFunction::gaussian(0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(anfis::MembershipFunction::triangular(1.0, 0.0, 2.0),
                    std::invalid_argument);
}

TEST_CASE("single-rule model reproduces its consequent") {
    anfis::FuzzyInferenceModel model;
    model.input_dim = 1;
    model.output_dim = 1;
    anfis::FuzzyRule rule;
    rule.antecedent.push_back(anfis::MembershipFunction::gaussian(0.0, 1.0));
    rule.consequent.push_back({0.0, 7.5});  // constant consequent
    model.rules.push_back(rule);

    for (double x : {-3.0, 0.0, 0.25, 9.0}) {
        const std::vector<double> input = {x};
        CHECK(anfis::evaluate(model, input)[0] == doctest::Approx(7.5));
    }
}

TEST_CASE("equal firing strengths average the consequents") {
    anfis::FuzzyInferenceModel model;
    model.input_dim = 1;
    model.output_dim = 1;
    for (double value : {2.0, 6.0}) {
        anfis::FuzzyRule rule;
        rule.antecedent.push_back(anfis::MembershipFunction::gaussian(1.0, 0.8));
        rule.consequent.push_back({0.0, value});
        model.rules.push_back(rule);
    }
    const std::vector<double> input = {0.3};
    CHECK(anfis::evaluate(model, input)[0] == doctest::Approx(4.0));
}

TEST_CASE("vanishing total firing strength falls back to the consequent mean") {
    anfis::FuzzyInferenceModel model;
    model.input_dim = 1;
    model.output_dim = 1;
    for (double value : {2.0, 4.0}) {
        anfis::FuzzyRule rule;
        rule.antecedent.push_back(
            anfis::MembershipFunction::gaussian(100.0, 0.01));
        rule.consequent.push_back({0.0, value});
        model.rules.push_back(rule);
    }
    const std::vector<double> input = {0.0};
    CHECK(anfis::evaluate(model, input)[0] == doctest::Approx(3.0));
}

TEST_CASE("build_from_clusters seeds one rule per cluster") {
    std::vector<fcm::DataPoint> inputs;
    anfis::Dataset data;
    for (double x : {0.0, 1.0, 9.0, 10.0}) {
        inputs.push_back({x});
        data.inputs.push_back({x});
        data.targets.push_back({x < 5.0 ? 1.0 : -1.0});
    }
    fcm::FcmConfig config;
    config.seed = 7;
    const fcm::FcmResult clusters = fcm::run_fcm(inputs, 2, config);
    const anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);

    REQUIRE(model.rules.size() == 2);
    std::vector<double> centers = {model.rules[0].antecedent[0].p0,
                                   model.rules[1].antecedent[0].p0};
    std::sort(centers.begin(), centers.end());
    CHECK(std::abs(centers[0] - 0.5) < 0.1);
    CHECK(std::abs(centers[1] - 9.5) < 0.1);
    CHECK(model.rules[0].antecedent[0].p1 > 0.0);
}

TEST_CASE("rule count equals cluster count") {
    std::mt19937_64 rng(1);
    anfis::Dataset data = random_dataset(rng, 2, 30);
    for (std::size_t c : {2u, 3u, 5u}) {
        fcm::FcmConfig config;
        config.seed = 5;
        const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, c, config);
        const auto model = anfis::build_from_clusters(clusters.clusters,
                                                      clusters.memberships, data);
        CHECK(model.rules.size() == c);
    }
}

TEST_CASE("trained model matches the closed-form fit of y=2x") {
    const anfis::Dataset data = line_dataset(2.0, 0.0, 21, 0.0, 1.0);
    const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, 1, {});
    const anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);

    // closed-form least squares for a single affine rule
    double sxx = 0, sx = 0, sxy = 0, sy = 0;
    const double n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double x = data.inputs[i][0], y = data.targets[i][0];
        sxx += x * x;
        sx += x;
        sxy += x * y;
        sy += y;
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    const double expected = slope * 0.5 + intercept;

    const std::vector<double> input = {0.5};
    CHECK(std::abs(anfis::evaluate(model, input)[0] - expected) < 0.01);
    CHECK(std::abs(anfis::evaluate(model, input)[0] - 1.0) < 0.01);
}

TEST_CASE("constant targets are fit exactly in the first epoch") {
    anfis::Dataset data;
    for (double x = 0.0; x <= 2.0; x += 0.25) {
        data.inputs.push_back({x});
        data.targets.push_back({3.25});
    }
    const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, 2, {});
    anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);
    anfis::TrainingConfig config;
    config.max_epochs = 5;
    const anfis::TrainingResult result =
        anfis::train_hybrid(model, data, {}, config);
    REQUIRE(!result.history.empty());
    CHECK(result.history.front().train_rmse < 1e-9);
}

TEST_CASE("affine target trains below 1e-6 RMSE") {
    const anfis::Dataset data = line_dataset(2.0, 1.0, 25, -1.0, 1.0);
    const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, 1, {});
    anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);
    anfis::TrainingConfig config;
    config.max_epochs = 10;
    const anfis::TrainingResult result =
        anfis::train_hybrid(model, data, {}, config);
    CHECK(anfis::rmse(result.model, data) < 1e-6);
}

TEST_CASE("training history is monotone and bounded by the no-step run") {
    // noisy quadratic, 3 rules, fixed seed; deterministic sine noise
    anfis::Dataset data;
    for (int i = 0; i < 60; ++i) {
        const double x = -1.0 + 2.0 * i / 59.0;
        data.inputs.push_back({x});
        data.targets.push_back({x * x + 0.05 * std::sin(37.0 * i)});
    }
    fcm::FcmConfig fcm_config;
    fcm_config.seed = 9;
    const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, 3, fcm_config);
    anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);

    anfis::TrainingConfig config;
    config.max_epochs = 15;
    config.error_goal = 0.0;
    const anfis::TrainingResult hybrid =
        anfis::train_hybrid(model, data, {}, config);

    anfis::TrainingConfig frozen = config;
    frozen.learning_rate = 0.0;
    const anfis::TrainingResult baseline =
        anfis::train_hybrid(model, data, {}, frozen);

    for (std::size_t e = 1; e < hybrid.history.size(); ++e) {
        CHECK(hybrid.history[e].train_rmse <=
              hybrid.history[e - 1].train_rmse + 1e-9);
    }
    for (std::size_t e = 0; e < hybrid.history.size(); ++e) {
        const std::size_t b = std::min(e, baseline.history.size() - 1);
        CHECK(hybrid.history[e].train_rmse <=
              baseline.history[b].train_rmse + 1e-9);
    }
    CHECK(hybrid.history.back().train_rmse <=
          hybrid.history.front().train_rmse + 1e-12);
}

TEST_CASE("consequent-only training never increases the train RMSE") {
    std::mt19937_64 rng(17);
    const anfis::Dataset data = random_dataset(rng, 2, 40);
    fcm::FcmConfig fcm_config;
    fcm_config.seed = 17;
    const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, 3, fcm_config);
    anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);

    anfis::TrainingConfig config;
    config.learning_rate = 0.0;
    config.max_epochs = 8;
    config.error_goal = 0.0;
    const anfis::TrainingResult result =
        anfis::train_hybrid(model, data, {}, config);
    for (std::size_t e = 1; e < result.history.size(); ++e) {
        CHECK(result.history[e].train_rmse <=
              result.history[e - 1].train_rmse + 1e-12);
    }
}

TEST_CASE("analytic premise gradient matches central differences") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t dim = 1 + trial % 2;
        const std::size_t rules = 2 + trial % 2;
        anfis::FuzzyInferenceModel model = random_model(rng, dim, rules);
        const anfis::Dataset data = random_dataset(rng, dim, 12);

        const std::vector<double> analytic = anfis::premise_gradient(model, data);
        const std::vector<double> numeric =
            finite_difference_gradient(model, data, 1e-5);
        REQUIRE(analytic.size() == numeric.size());
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double scale =
                std::max({std::abs(analytic[i]), std::abs(numeric[i]), 1e-6});
            CHECK(std::abs(analytic[i] - numeric[i]) / scale < 1e-4);
        }
    }
}

TEST_CASE("overfit guard stops training once past the epoch threshold") {
    // train on the left half of a parabola, test on the far right
    anfis::Dataset train, test;
    for (int i = 0; i < 30; ++i) {
        const double x = -1.0 + i / 29.0;
        train.inputs.push_back({x});
        train.targets.push_back({x * x});
    }
    for (int i = 0; i < 10; ++i) {
        const double x = 3.0 + i / 9.0;
        test.inputs.push_back({x});
        test.targets.push_back({25.0});  // far off the fitted surface
    }
    const fcm::FcmResult clusters = fcm::run_fcm(train.inputs, 2, {});
    anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, train);
    anfis::TrainingConfig config;
    config.max_epochs = 20;
    config.error_goal = 0.0;
    const anfis::TrainingResult result =
        anfis::train_hybrid(model, train, test, config);
    CHECK(result.history.size() <= 12 + 1);  // guard fires at ceil(0.6*20)=12
    bool guard_warned = false;
    for (const std::string& w : result.warnings) {
        if (w.find("overfit") != std::string::npos) guard_warned = true;
    }
    CHECK(guard_warned);
}

TEST_CASE("classifier reproduces the one-hot encodings") {
    const auto perfect = anfis::classify_efficiency({0.9, 0.1, 0.0, 0.0});
    CHECK(perfect.one_hot == std::array<int, 4>{1, 0, 0, 0});
    CHECK(perfect.label == "Perfect");

    const auto good = anfis::classify_efficiency({0.1, 0.7, 0.2, 0.0});
    CHECK(good.one_hot == std::array<int, 4>{0, 1, 0, 0});
    CHECK(good.label == "Good");

    const auto medium = anfis::classify_efficiency({0.0, 0.2, 0.7, 0.1});
    CHECK(medium.one_hot == std::array<int, 4>{0, 0, 1, 0});
    CHECK(medium.label == "Medium");

    const auto poor = anfis::classify_efficiency({0.0, 0.1, 0.2, 0.7});
    CHECK(poor.one_hot == std::array<int, 4>{0, 0, 0, 1});
    CHECK(poor.label == "Poor");

    const auto tie = anfis::classify_efficiency({0.25, 0.25, 0.25, 0.25});
    CHECK(tie.one_hot == std::array<int, 4>{1, 0, 0, 0});
    CHECK(tie.label == "Perfect");

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto result = anfis::classify_efficiency(
            {unit(rng), unit(rng), unit(rng), unit(rng)});
        int bits = 0;
        for (int b : result.one_hot) bits += b;
        CHECK(bits == 1);
    }
}

TEST_CASE("cluster-count sweep picks out two regimes") {
    anfis::Dataset data;
    for (int i = 0; i < 60; ++i) {
        const double x = i / 59.0;
        data.inputs.push_back({x});
        data.targets.push_back({2.0 * x + 0.1 * std::sin(17.3 * i)});
    }
    for (int i = 0; i < 60; ++i) {
        const double x = 5.0 + i / 59.0;
        data.inputs.push_back({x});
        data.targets.push_back({-3.0 * x + 20.0 + 0.1 * std::sin(11.7 * i)});
    }
    anfis::TrainingConfig config;
    config.max_epochs = 6;
    config.seed = 13;
    const int best = anfis::select_cluster_count(data, 4, config);
    CHECK(best == 2);
}

TEST_CASE("cluster-count sweep tie-breaks to the smallest candidate") {
    anfis::Dataset data;
    for (int i = 0; i < 24; ++i) {
        data.inputs.push_back({static_cast<double>(i)});
        data.targets.push_back({1.0});
    }
    anfis::TrainingConfig config;
    config.max_epochs = 3;
    config.seed = 1;
    CHECK(anfis::select_cluster_count(data, 5, config) == 2);
    CHECK(anfis::select_cluster_count(data, 2, config) == 2);
    CHECK_THROWS_AS(anfis::select_cluster_count(data, 1, config),
                    std::invalid_argument);
    CHECK_THROWS_AS(anfis::select_cluster_count(data, 25, config),
                    std::invalid_argument);
}

TEST_CASE("model serialization round-trips bit-exactly") {
    const anfis::Dataset data = line_dataset(1.5, -0.25, 15, 0.0, 2.0);
    fcm::FcmConfig fcm_config;
    fcm_config.seed = 21;
    const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, 2, fcm_config);
    anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);
    anfis::TrainingConfig config;
    config.max_epochs = 4;
    model = anfis::train_hybrid(model, data, {}, config).model;

    std::ostringstream first;
    anfis::save_model(model, first);
    std::istringstream in(first.str());
    const anfis::FuzzyInferenceModel loaded = anfis::load_model(in);
    std::ostringstream second;
    anfis::save_model(loaded, second);
    CHECK(first.str() == second.str());

    for (double x : {0.0, 0.5, 1.7}) {
        const std::vector<double> input = {x};
        CHECK(anfis::evaluate(model, input)[0] ==
              anfis::evaluate(loaded, input)[0]);
    }

    std::istringstream bad("other-format 3\n");
    CHECK_THROWS_AS(anfis::load_model(bad), std::runtime_error);
}

TEST_CASE("evaluate is locally Lipschitz on trained models") {
    const anfis::Dataset data = line_dataset(2.0, 1.0, 25, -1.0, 1.0);
    const fcm::FcmResult clusters = fcm::run_fcm(data.inputs, 2, {});
    const anfis::FuzzyInferenceModel model =
        anfis::build_from_clusters(clusters.clusters, clusters.memberships, data);

    const double delta = 1e-6;
    double max_slope = 0.0;
    for (double x = -1.0; x <= 1.0; x += 0.05) {
        const std::vector<double> a = {x}, b = {x + delta};
        const double change =
            std::abs(anfis::evaluate(model, b)[0] - anfis::evaluate(model, a)[0]);
        max_slope = std::max(max_slope, change / delta);
    }
    CHECK(max_slope < 1e3);  // empirically bounded on this model family
}

TEST_CASE("triangular antecedents evaluate but stay fixed during training") {
    anfis::FuzzyInferenceModel model;
    model.input_dim = 1;
    model.output_dim = 1;
    anfis::FuzzyRule rule;
    rule.antecedent.push_back(anfis::MembershipFunction::triangular(-2, 0, 2));
    rule.consequent.push_back({0.0, 0.0});
    model.rules.push_back(rule);

    const anfis::Dataset data = line_dataset(1.0, 0.5, 11, -1.0, 1.0);
    anfis::TrainingConfig config;
    config.max_epochs = 3;
    const anfis::TrainingResult result =
        anfis::train_hybrid(model, data, {}, config);
    CHECK(result.model.rules[0].antecedent[0].p0 == -2.0);
    CHECK(result.model.rules[0].antecedent[0].p1 == 0.0);
    CHECK(result.model.rules[0].antecedent[0].p2 == 2.0);
    CHECK(anfis::rmse(result.model, data) < 1e-9);  // affine fit is exact
}

TEST_CASE("arity violations throw") {
    anfis::FuzzyInferenceModel model;
    model.input_dim = 1;
    model.output_dim = 1;
    anfis::FuzzyRule rule;
    rule.antecedent.push_back(anfis::MembershipFunction::gaussian(0.0, 1.0));
    rule.consequent.push_back({1.0, 0.0});
    model.rules.push_back(rule);

    const std::vector<double> wide = {1.0, 2.0};
    CHECK_THROWS_AS(anfis::evaluate(model, wide), std::invalid_argument);

    anfis::FuzzyInferenceModel toowide = model;
    toowide.input_dim = 10;
    const std::vector<double> input10(10, 0.0);
    CHECK_THROWS_AS(anfis::evaluate(toowide, input10), std::invalid_argument);
}

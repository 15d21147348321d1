#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "chainfis/fcm.hpp"

namespace chainfis::anfis {

enum class MfKind { gaussian, triangular };

/// Scalar membership function over one input dimension, valued in [0,1].
/// Gaussian uses (center, spread); triangular uses (left, peak, right).
struct MembershipFunction {
    MfKind kind = MfKind::gaussian;
    double p0 = 0.0;
    double p1 = 1.0;
    double p2 = 0.0;

    static MembershipFunction gaussian(double center, double spread);
    static MembershipFunction triangular(double left, double peak, double right);

    double evaluate(double x) const;
};

/// First-order TSK rule: one antecedent membership function per input
/// dimension and an affine consequent per output (coefficients per input,
/// bias last).
struct FuzzyRule {
    std::vector<MembershipFunction> antecedent;
    std::vector<std::vector<double>> consequent;  // output_dim x (input_dim+1)
};

struct FuzzyInferenceModel {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::vector<FuzzyRule> rules;
};

/// Row-aligned inputs/targets. Targets may have any output arity >= 1.
struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;

    std::size_t size() const { return inputs.size(); }
};

struct TrainingConfig {
    double learning_rate = 0.1;       // premise step size
    double error_goal = 0.001;        // stop when train RMSE falls below
    double train_test_threshold = 1.3;  // overfit guard: test/train ratio
    double epoch_threshold = 0.6;     // min fraction of max_epochs before the guard may fire
    int max_epochs = 50;
    std::uint64_t seed = 0;
    int mf_sampling_count = 20;       // samples per MF when exporting curves
};

struct EpochStats {
    double train_rmse = 0.0;
    double test_rmse = 0.0;  // NaN when no test data was supplied
};

struct TrainingResult {
    FuzzyInferenceModel model;
    std::vector<EpochStats> history;
    std::vector<std::string> warnings;
};

struct EfficiencyClass {
    std::array<int, 4> one_hot{};
    std::string label;
};

/// One rule per cluster: Gaussian antecedents at the projected cluster
/// centers with membership-weighted per-dimension spreads (floored at
/// 1e-3), consequents solved by global least squares over the dataset.
FuzzyInferenceModel build_from_clusters(const fcm::ClusterSet& clusters,
                                        const fcm::MembershipMatrix& memberships,
                                        const Dataset& data);

/// Product-inference forward pass. When the total firing strength
/// underflows (< 1e-12) the output is the unweighted mean of the rule
/// consequents evaluated at the input.
std::vector<double> evaluate(const FuzzyInferenceModel& model,
                             std::span<const double> input);

double rmse(const FuzzyInferenceModel& model, const Dataset& data);

/// Gradient of the train RMSE with respect to premise parameters, laid out
/// as [rule][dim][center, spread]. Triangular antecedents contribute zeros
/// and are left untouched by training.
std::vector<double> premise_gradient(const FuzzyInferenceModel& model,
                                     const Dataset& data);

/// Hybrid pass per epoch: least-squares consequents with frozen premises,
/// then one guarded gradient step on the Gaussian premise parameters.
/// Stops at error_goal, max_epochs, or the overfit guard.
TrainingResult train_hybrid(FuzzyInferenceModel model, const Dataset& train,
                            const Dataset& test, const TrainingConfig& config);

/// Argmax one-hot over (Perfect, Good, Medium, Poor); ties go to the
/// lowest index.
EfficiencyClass classify_efficiency(const std::array<double, 4>& scores);

/// Sweep c = 2..c_max, training on a seeded 3:1 split, and return the
/// cluster count with the lowest held-out RMSE (smallest c wins ties).
int select_cluster_count(const Dataset& data, int c_max,
                         const TrainingConfig& config);

/// Versioned text serialization; numbers carry 17 significant digits so a
/// round trip reproduces the model bit-exactly.
void save_model(const FuzzyInferenceModel& model, std::ostream& out);
FuzzyInferenceModel load_model(std::istream& in);

/// (x, membership) samples for plotting, config.mf_sampling_count per
/// curve.
std::vector<std::pair<double, double>> sample_membership(
    const MembershipFunction& mf, double lo, double hi, int count);

}  // namespace chainfis::anfis

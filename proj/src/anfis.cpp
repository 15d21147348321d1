#include "chainfis/anfis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace chainfis::anfis {

namespace {

constexpr double kFiringFloor = 1e-12;
constexpr double kSpreadFloor = 1e-3;
constexpr double kSpreadMin = 1e-6;
constexpr std::size_t kMaxInputDim = 9;

void validate_model(const FuzzyInferenceModel& model) {
    if (model.rules.empty()) {
        throw std::invalid_argument("anfis: model has no rules");
    }
    if (model.input_dim == 0 || model.input_dim > kMaxInputDim) {
        throw std::invalid_argument("anfis: input_dim must be in [1,9]");
    }
    if (model.output_dim == 0) {
        throw std::invalid_argument("anfis: output_dim must be >= 1");
    }
    for (const FuzzyRule& rule : model.rules) {
        if (rule.antecedent.size() != model.input_dim) {
            throw std::invalid_argument("anfis: rule antecedent arity mismatch");
        }
        if (rule.consequent.size() != model.output_dim) {
            throw std::invalid_argument("anfis: rule consequent arity mismatch");
        }
        for (const auto& row : rule.consequent) {
            if (row.size() != model.input_dim + 1) {
                throw std::invalid_argument(
                    "anfis: consequent coefficient count mismatch");
            }
        }
    }
}

void validate_dataset(const FuzzyInferenceModel& model, const Dataset& data,
                      const char* what) {
    if (data.inputs.size() != data.targets.size()) {
        throw std::invalid_argument(std::string("anfis: ") + what +
                                    " inputs/targets size mismatch");
    }
    for (const auto& x : data.inputs) {
        if (x.size() != model.input_dim) {
            throw std::invalid_argument(std::string("anfis: ") + what +
                                        " input arity mismatch");
        }
    }
    for (const auto& y : data.targets) {
        if (y.size() != model.output_dim) {
            throw std::invalid_argument(std::string("anfis: ") + what +
                                        " target arity mismatch");
        }
    }
}

std::vector<double> firing_strengths(const FuzzyInferenceModel& model,
                                     std::span<const double> input,
                                     double& total) {
    std::vector<double> w(model.rules.size());
    total = 0.0;
    for (std::size_t r = 0; r < model.rules.size(); ++r) {
        double prod = 1.0;
        for (std::size_t d = 0; d < model.input_dim; ++d) {
            prod *= model.rules[r].antecedent[d].evaluate(input[d]);
        }
        w[r] = prod;
        total += prod;
    }
    return w;
}

double consequent_value(const FuzzyRule& rule, std::size_t output,
                        std::span<const double> input) {
    const std::vector<double>& coeff = rule.consequent[output];
    double v = coeff.back();  // bias
    for (std::size_t d = 0; d < input.size(); ++d) {
        v += coeff[d] * input[d];
    }
    return v;
}

// Normalized firing strengths; uniform weights when the total underflows,
// matching the evaluate() fallback.
std::vector<double> normalized_weights(const FuzzyInferenceModel& model,
                                       std::span<const double> input) {
    double total = 0.0;
    std::vector<double> w = firing_strengths(model, input, total);
    if (total < kFiringFloor) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    } else {
        for (double& v : w) v /= total;
    }
    return w;
}

// Least-squares consequents with premises frozen. Returns true when the
// ridge fallback had to be used.
bool solve_consequents(FuzzyInferenceModel& model, const Dataset& data) {
    const std::size_t n = data.size();
    const std::size_t rules = model.rules.size();
    const std::size_t terms = model.input_dim + 1;
    const std::size_t cols = rules * terms;

    Eigen::MatrixXd a(n, cols);
    Eigen::MatrixXd b(n, model.output_dim);
    for (std::size_t s = 0; s < n; ++s) {
        const std::vector<double>& x = data.inputs[s];
        const std::vector<double> w = normalized_weights(model, x);
        for (std::size_t r = 0; r < rules; ++r) {
            for (std::size_t d = 0; d < model.input_dim; ++d) {
                a(s, r * terms + d) = w[r] * x[d];
            }
            a(s, r * terms + model.input_dim) = w[r];
        }
        for (std::size_t o = 0; o < model.output_dim; ++o) {
            b(s, o) = data.targets[s][o];
        }
    }

    Eigen::MatrixXd theta;
    bool ridge = false;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() == static_cast<Eigen::Index>(cols)) {
        theta = qr.solve(b);
    } else {
        ridge = true;
        Eigen::MatrixXd gram = a.transpose() * a;
        gram.diagonal().array() += 1e-8;
        theta = gram.ldlt().solve(a.transpose() * b);
    }

    for (std::size_t r = 0; r < rules; ++r) {
        for (std::size_t o = 0; o < model.output_dim; ++o) {
            std::vector<double>& coeff = model.rules[r].consequent[o];
            for (std::size_t d = 0; d < model.input_dim; ++d) {
                coeff[d] = theta(r * terms + d, o);
            }
            coeff[model.input_dim] = theta(r * terms + model.input_dim, o);
        }
    }
    return ridge;
}

void apply_premise_step(FuzzyInferenceModel& model,
                        const std::vector<double>& gradient, double step) {
    std::size_t idx = 0;
    for (FuzzyRule& rule : model.rules) {
        for (MembershipFunction& mf : rule.antecedent) {
            if (mf.kind == MfKind::gaussian) {
                mf.p0 -= step * gradient[idx];
                mf.p1 -= step * gradient[idx + 1];
                mf.p1 = std::max(mf.p1, kSpreadMin);
            }
            idx += 2;
        }
    }
}

const char* kEfficiencyLabels[4] = {"Perfect", "Good", "Medium", "Poor"};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

MembershipFunction MembershipFunction::gaussian(double center, double spread) {
    if (!(spread > 0.0)) {
        throw std::invalid_argument("anfis: gaussian spread must be > 0");
    }
    return MembershipFunction{MfKind::gaussian, center, spread, 0.0};
}

MembershipFunction MembershipFunction::triangular(double left, double peak,
                                                  double right) {
    if (!(left <= peak && peak <= right)) {
        throw std::invalid_argument("anfis: triangular points must be ordered");
    }
    return MembershipFunction{MfKind::triangular, left, peak, right};
}

double MembershipFunction::evaluate(double x) const {
    if (kind == MfKind::gaussian) {
        const double z = (x - p0) / p1;
        return std::exp(-0.5 * z * z);
    }
    // triangular (left=p0, peak=p1, right=p2); degenerate edges act as steps
    if (x < p0 || x > p2) return 0.0;
    if (x == p1) return 1.0;
    if (x < p1) {
        return p1 == p0 ? 1.0 : (x - p0) / (p1 - p0);
    }
    return p2 == p1 ? 1.0 : (p2 - x) / (p2 - p1);
}

FuzzyInferenceModel build_from_clusters(const fcm::ClusterSet& clusters,
                                        const fcm::MembershipMatrix& memberships,
                                        const Dataset& data) {
    if (clusters.size() == 0) {
        throw std::invalid_argument("anfis: empty cluster set");
    }
    if (data.size() == 0) {
        throw std::invalid_argument("anfis: empty dataset");
    }
    if (memberships.clusters != clusters.size() ||
        memberships.points != data.size()) {
        throw std::invalid_argument("anfis: membership matrix shape mismatch");
    }
    const std::size_t input_dim = data.inputs.front().size();
    const std::size_t output_dim = data.targets.front().size();
    for (const auto& v : clusters.centers) {
        if (v.size() != input_dim) {
            throw std::invalid_argument("anfis: cluster dimension mismatch");
        }
    }

    FuzzyInferenceModel model;
    model.input_dim = input_dim;
    model.output_dim = output_dim;
    model.rules.resize(clusters.size());
    for (std::size_t r = 0; r < clusters.size(); ++r) {
        double mass = 0.0;
        std::vector<double> scatter(input_dim, 0.0);
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double u = memberships.at(r, k);
            mass += u;
            for (std::size_t d = 0; d < input_dim; ++d) {
                const double diff = data.inputs[k][d] - clusters.centers[r][d];
                scatter[d] += u * diff * diff;
            }
        }
        if (mass <= 0.0) {
            throw std::runtime_error("anfis: degenerate cluster " +
                                     std::to_string(r));
        }
        FuzzyRule& rule = model.rules[r];
        for (std::size_t d = 0; d < input_dim; ++d) {
            const double spread =
                std::max(std::sqrt(scatter[d] / mass), kSpreadFloor);
            rule.antecedent.push_back(
                MembershipFunction::gaussian(clusters.centers[r][d], spread));
        }
        rule.consequent.assign(output_dim,
                               std::vector<double>(input_dim + 1, 0.0));
    }
    validate_model(model);
    validate_dataset(model, data, "build");
    solve_consequents(model, data);
    return model;
}

std::vector<double> evaluate(const FuzzyInferenceModel& model,
                             std::span<const double> input) {
    validate_model(model);
    if (input.size() != model.input_dim) {
        throw std::invalid_argument("anfis: input arity mismatch");
    }
    const std::vector<double> w = normalized_weights(model, input);
    std::vector<double> out(model.output_dim, 0.0);
    for (std::size_t r = 0; r < model.rules.size(); ++r) {
        for (std::size_t o = 0; o < model.output_dim; ++o) {
            out[o] += w[r] * consequent_value(model.rules[r], o, input);
        }
    }
    return out;
}

double rmse(const FuzzyInferenceModel& model, const Dataset& data) {
    validate_dataset(model, data, "rmse");
    if (data.size() == 0) {
        throw std::invalid_argument("anfis: rmse over empty dataset");
    }
    double sum = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const std::vector<double> y = evaluate(model, data.inputs[s]);
        for (std::size_t o = 0; o < model.output_dim; ++o) {
            const double e = y[o] - data.targets[s][o];
            sum += e * e;
        }
    }
    return std::sqrt(sum / (static_cast<double>(data.size()) *
                            static_cast<double>(model.output_dim)));
}

std::vector<double> premise_gradient(const FuzzyInferenceModel& model,
                                     const Dataset& data) {
    validate_model(model);
    validate_dataset(model, data, "gradient");
    const std::size_t n = data.size();
    const std::size_t rules = model.rules.size();
    std::vector<double> grad(rules * model.input_dim * 2, 0.0);

    const double current = rmse(model, data);
    if (current < 1e-15) {
        return grad;
    }

    for (std::size_t s = 0; s < n; ++s) {
        const std::vector<double>& x = data.inputs[s];
        double total = 0.0;
        const std::vector<double> w = firing_strengths(model, x, total);
        if (total < kFiringFloor) {
            continue;  // fallback output does not depend on premises
        }
        // per-output predictions and consequent values
        std::vector<double> y(model.output_dim, 0.0);
        std::vector<std::vector<double>> f(rules,
                                           std::vector<double>(model.output_dim));
        for (std::size_t r = 0; r < rules; ++r) {
            for (std::size_t o = 0; o < model.output_dim; ++o) {
                f[r][o] = consequent_value(model.rules[r], o, x);
                y[o] += (w[r] / total) * f[r][o];
            }
        }
        for (std::size_t r = 0; r < rules; ++r) {
            // dE/dw_r aggregated over outputs
            double dedw = 0.0;
            for (std::size_t o = 0; o < model.output_dim; ++o) {
                const double err = y[o] - data.targets[s][o];
                dedw += err * (f[r][o] - y[o]) / total;
            }
            for (std::size_t d = 0; d < model.input_dim; ++d) {
                const MembershipFunction& mf = model.rules[r].antecedent[d];
                if (mf.kind != MfKind::gaussian) continue;
                const double diff = x[d] - mf.p0;
                const double s2 = mf.p1 * mf.p1;
                const double dwdc = w[r] * diff / s2;
                const double dwds = w[r] * diff * diff / (s2 * mf.p1);
                const std::size_t base = (r * model.input_dim + d) * 2;
                grad[base] += dedw * dwdc;
                grad[base + 1] += dedw * dwds;
            }
        }
    }
    const double scale =
        current * static_cast<double>(n) * static_cast<double>(model.output_dim);
    for (double& g : grad) g /= scale;
    return grad;
}

TrainingResult train_hybrid(FuzzyInferenceModel model, const Dataset& train,
                            const Dataset& test, const TrainingConfig& config) {
    validate_model(model);
    validate_dataset(model, train, "train");
    if (train.size() == 0) {
        throw std::invalid_argument("anfis: empty training set");
    }
    if (test.size() > 0) {
        validate_dataset(model, test, "test");
    }
    if (!(config.learning_rate >= 0.0)) {
        throw std::invalid_argument("anfis: learning_rate must be >= 0");
    }
    if (config.max_epochs < 1) {
        throw std::invalid_argument("anfis: max_epochs must be >= 1");
    }

    TrainingResult result;
    const int guard_epoch = static_cast<int>(
        std::ceil(config.epoch_threshold * config.max_epochs));
    bool warned_ridge = false;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        if (solve_consequents(model, train) && !warned_ridge) {
            result.warnings.push_back(
                "singular least-squares system; used ridge fallback");
            warned_ridge = true;
        }
        EpochStats stats;
        stats.train_rmse = rmse(model, train);
        stats.test_rmse = test.size() > 0
                              ? rmse(model, test)
                              : std::numeric_limits<double>::quiet_NaN();
        result.history.push_back(stats);

        if (stats.train_rmse <= config.error_goal) break;
        if (!std::isnan(stats.test_rmse) && epoch >= guard_epoch &&
            stats.test_rmse > config.train_test_threshold * stats.train_rmse) {
            result.warnings.push_back("stopped by train/test overfit guard");
            break;
        }
        if (epoch == config.max_epochs) break;

        if (config.learning_rate > 0.0) {
            const std::vector<double> grad = premise_gradient(model, train);
            double step = config.learning_rate;
            for (int attempt = 0; attempt < 5; ++attempt) {
                FuzzyInferenceModel candidate = model;
                apply_premise_step(candidate, grad, step);
                if (rmse(candidate, train) <= stats.train_rmse + 1e-12) {
                    model = std::move(candidate);
                    break;
                }
                step *= 0.5;  // backtrack; premises stay put if nothing helps
            }
        }
    }
    result.model = std::move(model);
    return result;
}

EfficiencyClass classify_efficiency(const std::array<double, 4>& scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    EfficiencyClass out;
    out.one_hot.fill(0);
    out.one_hot[best] = 1;
    out.label = kEfficiencyLabels[best];
    return out;
}

int select_cluster_count(const Dataset& data, int c_max,
                         const TrainingConfig& config) {
    if (c_max < 2) {
        throw std::invalid_argument("anfis: c_max must be >= 2");
    }
    if (static_cast<std::size_t>(c_max) > data.size()) {
        throw std::invalid_argument("anfis: c_max exceeds dataset size");
    }
    if (data.size() < 4) {
        throw std::invalid_argument("anfis: dataset too small to split");
    }

    // seeded 3:1 split
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t train_count =
        std::max<std::size_t>(2, data.size() * 3 / 4);
    Dataset train;
    Dataset validation;
    for (std::size_t i = 0; i < order.size(); ++i) {
        Dataset& slot = i < train_count ? train : validation;
        slot.inputs.push_back(data.inputs[order[i]]);
        slot.targets.push_back(data.targets[order[i]]);
    }

    int best_c = 2;
    double best_rmse = std::numeric_limits<double>::infinity();
    for (int c = 2; c <= c_max; ++c) {
        if (static_cast<std::size_t>(c) > train.size()) break;
        fcm::FcmConfig fcm_config;
        fcm_config.seed = config.seed;
        const fcm::FcmResult clusters =
            fcm::run_fcm(train.inputs, static_cast<std::size_t>(c), fcm_config);
        FuzzyInferenceModel model =
            build_from_clusters(clusters.clusters, clusters.memberships, train);
        TrainingResult trained = train_hybrid(model, train, validation, config);
        const double held_out = rmse(trained.model, validation);
        if (held_out < best_rmse - 1e-12) {
            best_rmse = held_out;
            best_c = c;
        }
    }
    return best_c;
}

void save_model(const FuzzyInferenceModel& model, std::ostream& out) {
    validate_model(model);
    out << "chainfis-anfis 1\n";
    out << "inputs " << model.input_dim << "\n";
    out << "outputs " << model.output_dim << "\n";
    out << "rules " << model.rules.size() << "\n";
    for (const FuzzyRule& rule : model.rules) {
        out << "rule\n";
        for (const MembershipFunction& mf : rule.antecedent) {
            if (mf.kind == MfKind::gaussian) {
                out << "mf gaussian " << format_double(mf.p0) << " "
                    << format_double(mf.p1) << "\n";
            } else {
                out << "mf triangular " << format_double(mf.p0) << " "
                    << format_double(mf.p1) << " " << format_double(mf.p2)
                    << "\n";
            }
        }
        for (const auto& row : rule.consequent) {
            out << "consequent";
            for (double v : row) out << " " << format_double(v);
            out << "\n";
        }
    }
    out << "end\n";
}

FuzzyInferenceModel load_model(std::istream& in) {
    auto fail = [](const std::string& what) -> std::runtime_error {
        return std::runtime_error("anfis: model parse error: " + what);
    };
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "chainfis-anfis") {
        throw fail("bad header");
    }
    if (version != 1) throw fail("unsupported version");

    auto expect_key = [&](const char* key) {
        std::string k;
        if (!(in >> k) || k != key) throw fail(std::string("expected ") + key);
    };
    FuzzyInferenceModel model;
    std::size_t rule_count = 0;
    expect_key("inputs");
    in >> model.input_dim;
    expect_key("outputs");
    in >> model.output_dim;
    expect_key("rules");
    if (!(in >> rule_count)) throw fail("bad counts");

    for (std::size_t r = 0; r < rule_count; ++r) {
        expect_key("rule");
        FuzzyRule rule;
        for (std::size_t d = 0; d < model.input_dim; ++d) {
            expect_key("mf");
            std::string kind;
            in >> kind;
            if (kind == "gaussian") {
                double center = 0.0, spread = 0.0;
                if (!(in >> center >> spread)) throw fail("bad gaussian");
                rule.antecedent.push_back(
                    MembershipFunction::gaussian(center, spread));
            } else if (kind == "triangular") {
                double l = 0.0, p = 0.0, q = 0.0;
                if (!(in >> l >> p >> q)) throw fail("bad triangular");
                rule.antecedent.push_back(
                    MembershipFunction::triangular(l, p, q));
            } else {
                throw fail("unknown mf kind " + kind);
            }
        }
        for (std::size_t o = 0; o < model.output_dim; ++o) {
            expect_key("consequent");
            std::vector<double> row(model.input_dim + 1);
            for (double& v : row) {
                if (!(in >> v)) throw fail("bad consequent row");
            }
            rule.consequent.push_back(std::move(row));
        }
        model.rules.push_back(std::move(rule));
    }
    expect_key("end");
    validate_model(model);
    return model;
}

std::vector<std::pair<double, double>> sample_membership(
    const MembershipFunction& mf, double lo, double hi, int count) {
    if (count < 2 || !(hi > lo)) {
        throw std::invalid_argument("anfis: bad sampling range");
    }
    std::vector<std::pair<double, double>> samples;
    samples.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double x = lo + (hi - lo) * i / (count - 1);
        samples.emplace_back(x, mf.evaluate(x));
    }
    return samples;
}

}  // namespace chainfis::anfis

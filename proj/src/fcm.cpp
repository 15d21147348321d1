#include "chainfis/fcm.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace chainfis::fcm {

namespace {

constexpr double kCoincidenceEps = 1e-12;

double squared_distance(const DataPoint& a, const DataPoint& b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return d2;
}

void check_dataset(const std::vector<DataPoint>& data) {
    if (data.empty()) {
        throw std::invalid_argument("fcm: empty dataset");
    }
    const std::size_t dim = data.front().size();
    if (dim == 0) {
        throw std::invalid_argument("fcm: zero-dimensional data point");
    }
    for (const DataPoint& p : data) {
        if (p.size() != dim) {
            throw std::invalid_argument("fcm: inconsistent point dimensions");
        }
        for (double x : p) {
            if (!std::isfinite(x)) {
                throw std::invalid_argument("fcm: non-finite coordinate");
            }
        }
    }
}

}  // namespace

bool MembershipMatrix::is_valid(double tol) const {
    if (values.size() != clusters * points) return false;
    for (double u : values) {
        if (!(u >= 0.0 && u <= 1.0)) return false;
    }
    for (std::size_t k = 0; k < points; ++k) {
        double col = 0.0;
        for (std::size_t i = 0; i < clusters; ++i) col += at(i, k);
        if (std::abs(col - 1.0) > tol) return false;
    }
    return true;
}

double compute_objective(const std::vector<DataPoint>& data,
                         const MembershipMatrix& memberships,
                         const ClusterSet& clusters) {
    check_dataset(data);
    if (clusters.fuzzifier <= 1.0) {
        throw std::invalid_argument("fcm: fuzzifier must be > 1");
    }
    if (memberships.clusters != clusters.size() ||
        memberships.points != data.size()) {
        throw std::invalid_argument("fcm: membership matrix shape mismatch");
    }
    for (const DataPoint& v : clusters.centers) {
        if (v.size() != data.front().size()) {
            throw std::invalid_argument("fcm: center dimension mismatch");
        }
    }
    const double m = clusters.fuzzifier;
    double j = 0.0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        for (std::size_t k = 0; k < data.size(); ++k) {
            const double u = memberships.at(i, k);
            if (u == 0.0) continue;
            j += std::pow(u, m) * squared_distance(data[k], clusters.centers[i]);
        }
    }
    return j;
}

MembershipMatrix update_memberships(const std::vector<DataPoint>& data,
                                    const ClusterSet& clusters,
                                    double fuzzifier) {
    check_dataset(data);
    if (clusters.centers.empty()) {
        throw std::invalid_argument("fcm: no cluster centers");
    }
    if (fuzzifier <= 1.0) {
        throw std::invalid_argument("fcm: fuzzifier must be > 1");
    }
    const std::size_t c = clusters.size();
    const std::size_t n = data.size();
    const double exponent = 2.0 / (fuzzifier - 1.0);

    MembershipMatrix u(c, n);
    std::vector<double> dist(c);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t coincident = 0;
        for (std::size_t i = 0; i < c; ++i) {
            dist[i] = std::sqrt(squared_distance(data[k], clusters.centers[i]));
            if (dist[i] < kCoincidenceEps) ++coincident;
        }
        if (coincident > 0) {
            for (std::size_t i = 0; i < c; ++i) {
                u.at(i, k) = dist[i] < kCoincidenceEps
                                 ? 1.0 / static_cast<double>(coincident)
                                 : 0.0;
            }
            continue;
        }
        for (std::size_t i = 0; i < c; ++i) {
            double denom = 0.0;
            for (std::size_t j = 0; j < c; ++j) {
                denom += std::pow(dist[i] / dist[j], exponent);
            }
            u.at(i, k) = 1.0 / denom;
        }
    }
    return u;
}

ClusterSet update_centers(const std::vector<DataPoint>& data,
                          const MembershipMatrix& memberships,
                          double fuzzifier) {
    check_dataset(data);
    if (fuzzifier <= 1.0) {
        throw std::invalid_argument("fcm: fuzzifier must be > 1");
    }
    if (memberships.points != data.size() || memberships.clusters == 0) {
        throw std::invalid_argument("fcm: membership matrix shape mismatch");
    }
    const std::size_t c = memberships.clusters;
    const std::size_t n = data.size();
    const std::size_t dim = data.front().size();

    ClusterSet out;
    out.fuzzifier = fuzzifier;
    out.centers.assign(c, DataPoint(dim, 0.0));
    for (std::size_t i = 0; i < c; ++i) {
        double mass = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = std::pow(memberships.at(i, k), fuzzifier);
            mass += w;
            for (std::size_t d = 0; d < dim; ++d) {
                out.centers[i][d] += w * data[k][d];
            }
        }
        if (mass <= 0.0) {
            throw std::runtime_error("fcm: degenerate cluster " +
                                     std::to_string(i) +
                                     " has zero membership mass");
        }
        for (std::size_t d = 0; d < dim; ++d) {
            out.centers[i][d] /= mass;
        }
    }
    return out;
}

FcmResult run_fcm(const std::vector<DataPoint>& data,
                  std::size_t cluster_count,
                  const FcmConfig& config) {
    check_dataset(data);
    if (cluster_count < 1) {
        throw std::invalid_argument("fcm: cluster_count must be >= 1");
    }
    if (cluster_count > data.size()) {
        throw std::invalid_argument("fcm: cluster_count exceeds dataset size");
    }
    if (config.fuzzifier <= 1.0) {
        throw std::invalid_argument("fcm: fuzzifier must be > 1");
    }
    if (config.max_iterations < 1) {
        throw std::invalid_argument("fcm: max_iterations must be >= 1");
    }

    // Random column-normalized partition.
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MembershipMatrix u(cluster_count, data.size());
    for (std::size_t k = 0; k < data.size(); ++k) {
        double col = 0.0;
        for (std::size_t i = 0; i < cluster_count; ++i) {
            const double v = unit(rng) + 1e-9;
            u.at(i, k) = v;
            col += v;
        }
        for (std::size_t i = 0; i < cluster_count; ++i) {
            u.at(i, k) /= col;
        }
    }

    FcmResult result;
    double previous = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        ClusterSet centers = update_centers(data, u, config.fuzzifier);
        u = update_memberships(data, centers, config.fuzzifier);
        const double j = compute_objective(data, u, centers);
        result.objective_trace.push_back(j);
        result.clusters = std::move(centers);
        result.clusters.objective = j;
        if (std::abs(previous - j) < config.tolerance) {
            break;
        }
        previous = j;
    }
    result.memberships = std::move(u);
    return result;
}

}  // namespace chainfis::fcm

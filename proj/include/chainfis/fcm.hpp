#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace chainfis::fcm {

/// A sample in normalized indicator space. All coordinates must be finite
/// and every point in a dataset must share the same dimension.
using DataPoint = std::vector<double>;

/// Fuzzy partition: `clusters` rows by `points` columns, row-major.
/// Valid matrices have entries in [0,1] and columns that sum to 1.
struct MembershipMatrix {
    std::size_t clusters = 0;
    std::size_t points = 0;
    std::vector<double> values;

    MembershipMatrix() = default;
    MembershipMatrix(std::size_t c, std::size_t n)
        : clusters(c), points(n), values(c * n, 0.0) {}

    double& at(std::size_t cluster, std::size_t point) {
        return values[cluster * points + point];
    }
    double at(std::size_t cluster, std::size_t point) const {
        return values[cluster * points + point];
    }

    /// Entries in [0,1] and every column sums to 1 within `tol`.
    bool is_valid(double tol = 1e-9) const;
};

struct ClusterSet {
    std::vector<DataPoint> centers;
    double fuzzifier = 2.0;
    double objective = 0.0;

    std::size_t size() const { return centers.size(); }
};

struct FcmConfig {
    double fuzzifier = 2.0;
    double tolerance = 1e-6;
    int max_iterations = 300;
    std::uint64_t seed = 0;
};

struct FcmResult {
    ClusterSet clusters;
    MembershipMatrix memberships;
    std::vector<double> objective_trace;
};

/// Weighted within-cluster scatter: sum over clusters and points of
/// u^m * squared Euclidean distance to the cluster center.
double compute_objective(const std::vector<DataPoint>& data,
                         const MembershipMatrix& memberships,
                         const ClusterSet& clusters);

/// Membership update for fixed centers. A point closer than 1e-12 to one
/// or more centers gets membership split evenly over the coincident set.
MembershipMatrix update_memberships(const std::vector<DataPoint>& data,
                                    const ClusterSet& clusters,
                                    double fuzzifier = 2.0);

/// Center update for fixed memberships: u^m-weighted mean per cluster.
/// Throws if a cluster has no membership mass.
ClusterSet update_centers(const std::vector<DataPoint>& data,
                          const MembershipMatrix& memberships,
                          double fuzzifier = 2.0);

/// Alternating optimization from a seeded random partition until the
/// objective improves by less than config.tolerance or max_iterations
/// is reached. The trace holds the objective after every iteration.
FcmResult run_fcm(const std::vector<DataPoint>& data,
                  std::size_t cluster_count,
                  const FcmConfig& config = {});

}  // namespace chainfis::fcm

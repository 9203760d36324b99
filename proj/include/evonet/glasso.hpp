#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <set>

namespace evonet {

/// Unordered variable pair stored with i < j.
struct Edge {
    std::size_t i;
    std::size_t j;

    Edge(std::size_t a, std::size_t b) : i(a < b ? a : b), j(a < b ? b : a) {}
    auto operator<=>(const Edge&) const = default;
};

using EdgeSet = std::set<Edge>;

struct SolverOptions {
    double tolerance = 1e-6;        // duality-gap stop
    int max_iterations = 500;       // outer column sweeps
    double support_threshold = 1e-6;
};

struct PrecisionEstimate {
    Eigen::MatrixXd theta;
    double lambda = 0.0;
    EdgeSet edges;
    double objective = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
};

/// Minimizes -log det(Theta) + tr(Theta S) + lambda * sum_{i != j} |Theta_ij| over positive
/// definite Theta. The diagonal is not penalized, so lambda = 0 returns S^-1 exactly.
///
/// Solved by block coordinate ascent on the dual covariance W, one column at a time, each
/// column reduced to a lasso problem handled by cyclic coordinate descent. Iteration stops
/// once the primal-dual gap is within opts.tolerance and a full sweep changes no entry of W by
/// more than opts.tolerance.
///
/// Throws std::invalid_argument for non-symmetric input (beyond 1e-12 relative round-off,
/// which is symmetrized away), non-positive diagonal, or negative lambda;
/// SingularInputError when lambda = 0 and S is not positive definite; NonConvergenceError
/// when opts.max_iterations sweeps do not reach the tolerance.
PrecisionEstimate graphical_lasso(const Eigen::MatrixXd& s, double lambda, const SolverOptions& opts = {});

/// Primal-dual gap of the penalized likelihood at theta. The dual point is Theta^-1 with its
/// off-diagonal deviation from S clipped to [-lambda, lambda]; returns +inf if that point is
/// not positive definite. Throws std::invalid_argument if theta is not positive definite.
double duality_gap(const Eigen::MatrixXd& s, const Eigen::MatrixXd& theta, double lambda);

/// Value of the penalized objective at theta (theta must be positive definite).
double penalized_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& theta, double lambda);

/// All pairs i < j with |theta(i, j)| > threshold.
EdgeSet support_edges(const Eigen::MatrixXd& theta, double threshold);

}  // namespace evonet

#pragma once

#include "evonet/glasso.hpp"
#include "evonet/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace evonet {

enum class KernelKind { box };

struct KernelSpec {
    KernelKind kind = KernelKind::box;
    double bandwidth = 1.0;  // absolute units of the evolving dimension
};

/// Kernel value K_h(|d|). Box: 1/2 when |d| <= h, else 0.
double kernel_value(const KernelSpec& spec, double distance);

/// Normalized kernel weights of every timestamp around t. Throws EmptyWindowError when no
/// timestamp lies inside the kernel support.
std::vector<double> kernel_weights(double t, std::span<const double> timestamps, const KernelSpec& spec);

/// Kernel-smoothed second-moment matrix at t: rows are averaged uniformly within each
/// timestamp, then timestamps are combined with kernel_weights. The panel is expected to be
/// centered already.
Eigen::MatrixXd kernel_covariance(const TransformedPanel& panel, double t, const KernelSpec& spec);

/// c_h * n^(-1/6) * span. Throws std::invalid_argument for n < 2 or non-positive c_h, span.
double default_bandwidth(std::size_t n, double c_h = 1.0, double span = 1.0);

/// c * n^(-1/6) * ln(n) * sqrt(ln(m)). Throws std::invalid_argument for n < 2, m < 2, c < 0.
double default_lambda(std::size_t n, std::size_t m, double c);

struct Hyperparameters {
    double bandwidth = 0.0;
    double lambda = 0.0;
    double c = 0.0;  // lambda scale; 0 when lambda was given directly
};

struct NetworkSeries {
    std::vector<double> timestamps;
    std::vector<PrecisionEstimate> estimates;
    std::vector<std::string> entity_names;
    Hyperparameters hyperparameters;
};

struct EstimateOptions {
    SolverOptions solver;
    unsigned threads = 1;  // per-timestamp solves run concurrently when > 1
};

/// Copula-transformed, pooled-centered panel. Throws RejectedVariablesError naming any
/// zero-variance variable.
TransformedPanel gaussianize(const ObservationPanel& panel);

/// Solves the penalized likelihood at each timestamp of an already Gaussianized panel.
/// Failures are rethrown as TimestampError tagged with the offending timestamp.
NetworkSeries estimate_series(const TransformedPanel& gaussianized, const KernelSpec& spec, double lambda,
                              const EstimateOptions& opts = {});

/// Full pipeline: fit copula on pooled data, transform, center, then solve per timestamp.
NetworkSeries estimate_series(const ObservationPanel& panel, const KernelSpec& spec, double lambda,
                              const EstimateOptions& opts = {});

/// Mean size of the symmetric difference between edge sets at consecutive timestamps; 0 for a
/// single timestamp.
double edge_churn(const NetworkSeries& series);

/// Mean number of edges per timestamp.
double mean_edge_count(const NetworkSeries& series);

inline constexpr double kDefaultLambdaGrid[] = {0.05, 0.1, 0.2, 0.4};

struct TunedSeries {
    NetworkSeries series;
    std::vector<double> grid;
    std::vector<double> churn;  // per grid value
};

/// Index of the least churn among candidates that are not edgeless everywhere; the earliest
/// index wins ties. Returns 0 when every candidate is edgeless.
std::size_t most_stable(std::span<const double> churn, const std::vector<bool>& all_empty);

/// Evaluates lambda = default_lambda(n, m, c) for each c in the grid (ascending, n = pooled
/// sample count) and keeps the most_stable series, so ties go to the smaller c.
TunedSeries select_lambda_by_stability(const TransformedPanel& gaussianized, const KernelSpec& spec,
                                       std::span<const double> grid, const EstimateOptions& opts = {});

}  // namespace evonet

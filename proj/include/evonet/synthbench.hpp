#pragma once

#include "evonet/evolve.hpp"
#include "evonet/glasso.hpp"
#include "evonet/panel.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <exception>
#include <random>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

namespace evonet::synth {

enum class Evolution { global, local };

std::string to_string(Evolution kind);
Evolution parse_evolution(const std::string& name);

/// Independent generator for one named phase of a run. Phases derived from the same seed
/// do not share state, so reordering or parallelizing phases leaves each stream unchanged.
std::mt19937_64 phase_rng(std::uint64_t seed, std::uint64_t phase);

/// True precision matrices at timestamps 1..T. Structure is constant before and after the
/// change point; timestamps >= change_point use the second regime.
struct GroundTruthSeries {
    std::vector<double> timestamps;
    std::vector<Eigen::MatrixXd> precisions;
    std::vector<EdgeSet> edge_sets;
    Evolution kind = Evolution::local;
    std::size_t change_point = 1;
    std::size_t max_degree = 0;

    std::size_t dim() const { return precisions.empty() ? 0 : static_cast<std::size_t>(precisions.front().rows()); }
};

/// Erdos-Renyi support at the given density; off-diagonals +-0.3 with random sign, diagonal
/// equal to the absolute row sum plus 0.5. At the change point a global evolution redraws the
/// support, a local one removes ceil(10%) of the edges and adds as many new ones.
GroundTruthSeries generate_ground_truth(std::size_t m, std::size_t T, Evolution kind, std::size_t change_point,
                                        double edge_density, std::uint64_t seed);

/// Precision matrix built from an edge set by the construction above.
Eigen::MatrixXd precision_from_edges(std::size_t m, const EdgeSet& edges, std::mt19937_64& rng);

/// count x m draws from N(0, precision^-1).
Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& precision, std::size_t count, std::mt19937_64& rng);

/// Equal-probability bin of a standard normal score: floor(Phi(z) * (max_value + 1)), capped.
int quantile_level(double z, int max_value);

/// Gaussian draws at each timestamp, discretized per variable into {0..max_value} using the
/// marginal standard deviation of the true covariance.
ObservationPanel sample_observations(const GroundTruthSeries& truth, std::size_t samples_per_t, int max_value,
                                     std::uint64_t seed);

/// Adds an independent Poisson(rate) draw to every count.
ObservationPanel add_poisson_noise(const ObservationPanel& panel, double rate, std::uint64_t seed);

/// Nonparanormal graphical lasso on all timestamps pooled into one sample.
PrecisionEstimate static_baseline(const ObservationPanel& panel, double lambda, const SolverOptions& opts = {});
PrecisionEstimate static_baseline(const TransformedPanel& gaussianized, double lambda, const SolverOptions& opts = {});

struct TunedStatic {
    PrecisionEstimate estimate;
    double c = 0.0;
    std::vector<double> churn;
};

/// Applies the select_lambda_by_stability rule to the static estimate broadcast over the
/// panel's timestamps. A broadcast network never churns, so the rule settles on the smallest
/// grid value that yields any edge.
TunedStatic select_static_lambda_by_stability(const TransformedPanel& gaussianized, std::span<const double> grid,
                                              const SolverOptions& opts = {});

struct EdgeScore {
    double macro_f1 = 0.0;
    std::size_t total_edges = 0;  // sum over timestamps for a series, |E| for a static network
    double mean_edges = 0.0;      // predicted edges per timestamp
    std::vector<double> per_timestamp_f1;
};

/// F1 of one predicted edge set against the truth. Both empty scores 1.
double edge_f1(const EdgeSet& predicted, const EdgeSet& truth);

EdgeScore edge_f1(const NetworkSeries& predicted, const GroundTruthSeries& truth);
/// A static estimate is compared against the truth at every timestamp.
EdgeScore edge_f1(const PrecisionEstimate& predicted, const GroundTruthSeries& truth);

struct BenchConfig {
    std::size_t m = 20;
    std::size_t T = 100;
    std::size_t samples_per_t = 10;
    int max_value = 10;
    Evolution evolution = Evolution::local;
    std::size_t change_point = 50;
    double edge_density = 0.2;
    double noise_rate = 0.0;
    std::uint64_t seed = 1;
    std::vector<double> lambda_grid{std::begin(kDefaultLambdaGrid), std::end(kDefaultLambdaGrid)};
    double bandwidth_c = 1.0;
    EstimateOptions estimate;
};

/// Throws std::invalid_argument describing the first bad field.
void validate(const BenchConfig& config);

struct BenchRow {
    std::string method;
    double macro_f1 = 0.0;
    std::size_t total_edges = 0;
    double mean_edges = 0.0;
    double lambda = 0.0;
    double c = 0.0;
    double runtime_seconds = 0.0;
};

struct BenchReport {
    std::uint64_t seed = 0;
    std::string network;  // e.g. "20-local"
    std::vector<BenchRow> rows;
    double true_mean_edges = 0.0;
};

/// A run_benchmark failure, tagged with the phase ("generate", "sample", "noise",
/// "gaussianize") or method name where it happened.
class BenchPhaseError : public std::runtime_error {
public:
    BenchPhaseError(const std::string& phase, const std::string& what, std::exception_ptr cause)
        : std::runtime_error(phase + ": " + what), phase_(phase), cause_(std::move(cause))
    {}
    const std::string& phase() const noexcept { return phase_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::string phase_;
    std::exception_ptr cause_;
};

inline constexpr const char* kEvolvingMethod = "SetEvolve";
inline constexpr const char* kStaticMethod = "Static";

/// generate -> sample -> noise -> both estimators -> score. Deterministic given the config.
/// Throws std::invalid_argument for a bad config and BenchPhaseError for anything later.
BenchReport run_benchmark(const BenchConfig& config);

}  // namespace evonet::synth

#include "evonet/synthbench.hpp"

#include "evonet/errors.hpp"
#include "evonet/nonparanormal.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace evonet::synth {

namespace {

enum Phase : std::uint64_t {
    kStructure = 1,
    kRewire = 2,
    kSigns = 3,
    kSampling = 4,
    kNoise = 5,
};

constexpr double kEdgeMagnitude = 0.3;
constexpr double kDiagonalMargin = 0.5;
constexpr double kLocalRewireFraction = 0.1;

std::vector<Edge> all_pairs(std::size_t m)
{
    std::vector<Edge> pairs;
    for (std::size_t j = 1; j < m; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            pairs.emplace_back(i, j);
        }
    }
    return pairs;
}

EdgeSet random_support(std::size_t m, double density, std::mt19937_64& rng)
{
    std::bernoulli_distribution coin(density);
    EdgeSet edges;
    for (const auto& e : all_pairs(m)) {
        if (coin(rng)) {
            edges.insert(e);
        }
    }
    return edges;
}

EdgeSet rewire(const EdgeSet& edges, std::size_t m, std::mt19937_64& rng)
{
    const auto k = static_cast<std::size_t>(std::ceil(kLocalRewireFraction * static_cast<double>(edges.size())));
    std::vector<Edge> present(edges.begin(), edges.end());
    std::vector<Edge> absent;
    for (const auto& e : all_pairs(m)) {
        if (!edges.count(e)) {
            absent.push_back(e);
        }
    }
    if (absent.size() < k) {
        throw std::invalid_argument("graph too dense to add " + std::to_string(k) + " new edges");
    }
    std::shuffle(present.begin(), present.end(), rng);
    std::shuffle(absent.begin(), absent.end(), rng);
    EdgeSet out(present.begin() + static_cast<std::ptrdiff_t>(k), present.end());
    out.insert(absent.begin(), absent.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

std::size_t max_degree_of(const EdgeSet& edges, std::size_t m)
{
    std::vector<std::size_t> degree(m, 0);
    for (const auto& e : edges) {
        ++degree[e.i];
        ++degree[e.j];
    }
    return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string to_string(Evolution kind)
{
    return kind == Evolution::global ? "global" : "local";
}

Evolution parse_evolution(const std::string& name)
{
    if (name == "global") {
        return Evolution::global;
    }
    if (name == "local") {
        return Evolution::local;
    }
    throw std::invalid_argument("evolution must be 'global' or 'local', got '" + name + "'");
}

std::mt19937_64 phase_rng(std::uint64_t seed, std::uint64_t phase)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(phase), static_cast<std::uint32_t>(phase >> 32)};
    return std::mt19937_64(seq);
}

Eigen::MatrixXd precision_from_edges(std::size_t m, const EdgeSet& edges, std::mt19937_64& rng)
{
    const auto dim = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(dim, dim);
    std::bernoulli_distribution sign(0.5);
    for (const auto& e : edges) {
        const double v = sign(rng) ? kEdgeMagnitude : -kEdgeMagnitude;
        theta(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = v;
        theta(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = v;
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
        theta(i, i) = theta.row(i).cwiseAbs().sum() + kDiagonalMargin;
    }
    return theta;
}

GroundTruthSeries generate_ground_truth(std::size_t m, std::size_t T, Evolution kind, std::size_t change_point,
                                        double edge_density, std::uint64_t seed)
{
    if (m < 2) {
        throw std::invalid_argument("ground truth needs m >= 2");
    }
    if (T < 1 || change_point < 1 || change_point > T) {
        throw std::invalid_argument("change point must lie in [1, T]");
    }
    if (!(edge_density > 0.0 && edge_density < 1.0)) {
        throw std::invalid_argument("edge density must lie in (0, 1)");
    }

    auto structure_rng = phase_rng(seed, kStructure);
    auto rewire_rng = phase_rng(seed, kRewire);
    auto sign_rng = phase_rng(seed, kSigns);

    const EdgeSet before = random_support(m, edge_density, structure_rng);
    const EdgeSet after =
        kind == Evolution::global ? random_support(m, edge_density, structure_rng) : rewire(before, m, rewire_rng);
    const Eigen::MatrixXd theta_before = precision_from_edges(m, before, sign_rng);
    const Eigen::MatrixXd theta_after = precision_from_edges(m, after, sign_rng);

    GroundTruthSeries truth;
    truth.kind = kind;
    truth.change_point = change_point;
    truth.max_degree = std::max(max_degree_of(before, m), max_degree_of(after, m));
    for (std::size_t t = 1; t <= T; ++t) {
        const bool late = t >= change_point;
        truth.timestamps.push_back(static_cast<double>(t));
        truth.precisions.push_back(late ? theta_after : theta_before);
        truth.edge_sets.push_back(late ? after : before);
    }
    return truth;
}

Eigen::MatrixXd sample_gaussian(const Eigen::MatrixXd& precision, std::size_t count, std::mt19937_64& rng)
{
    Eigen::LLT<Eigen::MatrixXd> llt(precision);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("precision matrix is not positive definite");
    }
    const auto m = precision.rows();
    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(m, static_cast<Eigen::Index>(count));
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        for (Eigen::Index r = 0; r < m; ++r) {
            z(r, c) = normal(rng);
        }
    }
    // Theta = L L^T, so x = L^-T z has covariance Theta^-1.
    const Eigen::MatrixXd x = llt.matrixU().solve(z);
    return x.transpose();
}

int quantile_level(double z, int max_value)
{
    static const boost::math::normal_distribution<double> standard;
    const double p = boost::math::cdf(standard, z);
    const int level = static_cast<int>(std::floor(p * static_cast<double>(max_value + 1)));
    return std::clamp(level, 0, max_value);
}

ObservationPanel sample_observations(const GroundTruthSeries& truth, std::size_t samples_per_t, int max_value,
                                     std::uint64_t seed)
{
    if (samples_per_t < 1 || max_value < 1) {
        throw std::invalid_argument("samples per timestamp and max value must be positive");
    }
    const std::size_t m = truth.dim();
    auto rng = phase_rng(seed, kSampling);
    ObservationPanel panel;
    panel.timestamps = truth.timestamps;
    for (std::size_t j = 0; j < m; ++j) {
        panel.entity_names.push_back("v" + std::to_string(j));
    }
    for (const auto& theta : truth.precisions) {
        const Eigen::VectorXd sd = theta.inverse().diagonal().cwiseSqrt();
        const Eigen::MatrixXd x = sample_gaussian(theta, samples_per_t, rng);
        Eigen::MatrixXd counts(x.rows(), x.cols());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            for (Eigen::Index r = 0; r < x.rows(); ++r) {
                counts(r, j) = quantile_level(x(r, j) / sd(j), max_value);
            }
        }
        panel.counts.push_back(std::move(counts));
    }
    return panel;
}

ObservationPanel add_poisson_noise(const ObservationPanel& panel, double rate, std::uint64_t seed)
{
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("noise rate must be a finite nonnegative number");
    }
    ObservationPanel out = panel;
    if (rate == 0.0) {
        return out;
    }
    auto rng = phase_rng(seed, kNoise);
    std::poisson_distribution<long> poisson(rate);
    for (auto& counts : out.counts) {
        for (Eigen::Index j = 0; j < counts.cols(); ++j) {
            for (Eigen::Index r = 0; r < counts.rows(); ++r) {
                counts(r, j) += static_cast<double>(poisson(rng));
            }
        }
    }
    return out;
}

PrecisionEstimate static_baseline(const TransformedPanel& gaussianized, double lambda, const SolverOptions& opts)
{
    TransformedPanel pooled;
    pooled.entity_names = gaussianized.entity_names;
    pooled.timestamps = {0.0};
    pooled.values = {pooled_rows(gaussianized)};
    const Eigen::MatrixXd s = kernel_covariance(pooled, 0.0, KernelSpec{KernelKind::box, 1.0});
    return graphical_lasso(s, lambda, opts);
}

PrecisionEstimate static_baseline(const ObservationPanel& panel, double lambda, const SolverOptions& opts)
{
    return static_baseline(gaussianize(panel), lambda, opts);
}

TunedStatic select_static_lambda_by_stability(const TransformedPanel& gaussianized, std::span<const double> grid,
                                              const SolverOptions& opts)
{
    if (grid.empty()) {
        throw std::invalid_argument("lambda grid is empty");
    }
    const auto n = static_cast<std::size_t>(pooled_rows(gaussianized).rows());
    const std::size_t m = gaussianized.entity_names.size();

    std::vector<double> sorted(grid.begin(), grid.end());
    std::sort(sorted.begin(), sorted.end());
    TunedStatic tuned;
    std::vector<PrecisionEstimate> candidates;
    std::vector<bool> all_empty;
    for (double c : sorted) {
        PrecisionEstimate estimate = static_baseline(gaussianized, default_lambda(n, m, c), opts);
        NetworkSeries broadcast;
        broadcast.estimates.assign(gaussianized.timestamps.size(), estimate);
        tuned.churn.push_back(edge_churn(broadcast));
        all_empty.push_back(estimate.edges.empty());
        candidates.push_back(std::move(estimate));
    }
    const std::size_t best = most_stable(tuned.churn, all_empty);
    tuned.estimate = std::move(candidates[best]);
    tuned.c = sorted[best];
    return tuned;
}

double edge_f1(const EdgeSet& predicted, const EdgeSet& truth)
{
    if (predicted.empty() && truth.empty()) {
        return 1.0;
    }
    std::size_t hits = 0;
    for (const auto& e : predicted) {
        hits += truth.count(e);
    }
    if (hits == 0) {
        return 0.0;
    }
    return 2.0 * static_cast<double>(hits) / static_cast<double>(predicted.size() + truth.size());
}

EdgeScore edge_f1(const NetworkSeries& predicted, const GroundTruthSeries& truth)
{
    if (predicted.estimates.size() != truth.edge_sets.size()) {
        throw std::invalid_argument("predicted series and truth have different numbers of timestamps");
    }
    if (predicted.entity_names.size() != truth.dim()) {
        throw std::invalid_argument("predicted series and truth have different dimensions");
    }
    EdgeScore score;
    for (std::size_t k = 0; k < truth.edge_sets.size(); ++k) {
        score.per_timestamp_f1.push_back(edge_f1(predicted.estimates[k].edges, truth.edge_sets[k]));
        score.total_edges += predicted.estimates[k].edges.size();
    }
    const double T = static_cast<double>(truth.edge_sets.size());
    for (double f : score.per_timestamp_f1) {
        score.macro_f1 += f / T;
    }
    score.mean_edges = T > 0 ? static_cast<double>(score.total_edges) / T : 0.0;
    return score;
}

EdgeScore edge_f1(const PrecisionEstimate& predicted, const GroundTruthSeries& truth)
{
    if (static_cast<std::size_t>(predicted.theta.rows()) != truth.dim()) {
        throw std::invalid_argument("predicted network and truth have different dimensions");
    }
    EdgeScore score;
    for (const auto& edges : truth.edge_sets) {
        score.per_timestamp_f1.push_back(edge_f1(predicted.edges, edges));
    }
    const double T = static_cast<double>(truth.edge_sets.size());
    for (double f : score.per_timestamp_f1) {
        score.macro_f1 += f / T;
    }
    score.total_edges = predicted.edges.size();
    score.mean_edges = static_cast<double>(predicted.edges.size());
    return score;
}

void validate(const BenchConfig& config)
{
    if (config.m < 2) {
        throw std::invalid_argument("m must be at least 2");
    }
    if (config.T < 1) {
        throw std::invalid_argument("T must be at least 1");
    }
    if (config.samples_per_t < 1) {
        throw std::invalid_argument("samples per timestamp must be at least 1");
    }
    if (config.max_value < 1) {
        throw std::invalid_argument("max value must be at least 1");
    }
    if (config.change_point < 1 || config.change_point > config.T) {
        throw std::invalid_argument("change point must lie in [1, T]");
    }
    if (!(config.edge_density > 0.0 && config.edge_density < 1.0)) {
        throw std::invalid_argument("edge density must lie in (0, 1)");
    }
    if (!(config.noise_rate >= 0.0) || !std::isfinite(config.noise_rate)) {
        throw std::invalid_argument("noise rate must be nonnegative");
    }
    if (config.lambda_grid.empty()) {
        throw std::invalid_argument("lambda grid is empty");
    }
    for (double c : config.lambda_grid) {
        if (!(c >= 0.0)) {
            throw std::invalid_argument("lambda grid values must be nonnegative");
        }
    }
    if (!(config.bandwidth_c > 0.0)) {
        throw std::invalid_argument("bandwidth constant must be positive");
    }
}

BenchReport run_benchmark(const BenchConfig& config)
{
    validate(config);
    const auto phase = [](const std::string& name, auto&& fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            throw BenchPhaseError(name, e.what(), std::current_exception());
        }
    };

    const auto truth = phase("generate", [&] {
        return generate_ground_truth(config.m, config.T, config.evolution, config.change_point, config.edge_density,
                                     config.seed);
    });
    ObservationPanel panel =
        phase("sample", [&] { return sample_observations(truth, config.samples_per_t, config.max_value, config.seed); });
    panel = phase("noise", [&] { return add_poisson_noise(panel, config.noise_rate, config.seed); });
    const TransformedPanel gaussianized = phase("gaussianize", [&] { return gaussianize(panel); });

    BenchReport report;
    report.seed = config.seed;
    report.network = std::to_string(config.m) + "-" + to_string(config.evolution);
    double true_edges = 0.0;
    for (const auto& e : truth.edge_sets) {
        true_edges += static_cast<double>(e.size());
    }
    report.true_mean_edges = true_edges / static_cast<double>(truth.edge_sets.size());

    const std::size_t n = panel.total_samples();
    const double span = truth.timestamps.back() - truth.timestamps.front();
    report.rows.push_back(phase(kEvolvingMethod, [&] {
        const auto start = std::chrono::steady_clock::now();
        const KernelSpec spec{KernelKind::box, default_bandwidth(n, config.bandwidth_c, span > 0.0 ? span : 1.0)};
        const TunedSeries tuned = select_lambda_by_stability(gaussianized, spec, config.lambda_grid, config.estimate);
        const EdgeScore score = edge_f1(tuned.series, truth);
        return BenchRow{kEvolvingMethod, score.macro_f1, score.total_edges, score.mean_edges,
                        tuned.series.hyperparameters.lambda, tuned.series.hyperparameters.c, seconds_since(start)};
    }));
    report.rows.push_back(phase(kStaticMethod, [&] {
        const auto start = std::chrono::steady_clock::now();
        const TunedStatic tuned = select_static_lambda_by_stability(gaussianized, config.lambda_grid, config.estimate.solver);
        const EdgeScore score = edge_f1(tuned.estimate, truth);
        return BenchRow{kStaticMethod, score.macro_f1, score.total_edges, score.mean_edges, tuned.estimate.lambda,
                        tuned.c, seconds_since(start)};
    }));
    return report;
}

}  // namespace evonet::synth

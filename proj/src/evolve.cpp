#include "evonet/evolve.hpp"

#include "evonet/errors.hpp"
#include "evonet/nonparanormal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace evonet {

double kernel_value(const KernelSpec& spec, double distance)
{
    switch (spec.kind) {
    case KernelKind::box:
        return std::abs(distance) <= spec.bandwidth ? 0.5 : 0.0;
    }
    return 0.0;
}

std::vector<double> kernel_weights(double t, std::span<const double> timestamps, const KernelSpec& spec)
{
    if (!(spec.bandwidth > 0.0)) {
        throw std::invalid_argument("kernel bandwidth must be positive");
    }
    std::vector<double> w(timestamps.size());
    double total = 0.0;
    for (std::size_t k = 0; k < timestamps.size(); ++k) {
        w[k] = kernel_value(spec, t - timestamps[k]);
        total += w[k];
    }
    if (total <= 0.0) {
        std::ostringstream msg;
        msg << "no timestamp within bandwidth " << spec.bandwidth << " of t = " << t;
        throw EmptyWindowError(msg.str(), t);
    }
    for (auto& x : w) {
        x /= total;
    }
    return w;
}

Eigen::MatrixXd kernel_covariance(const TransformedPanel& panel, double t, const KernelSpec& spec)
{
    const auto weights = kernel_weights(t, panel.timestamps, spec);
    const auto m = static_cast<Eigen::Index>(panel.entity_names.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m, m);
    double empty_weight = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] == 0.0) {
            continue;
        }
        const auto& x = panel.values[k];
        if (x.rows() == 0) {
            empty_weight += weights[k];
            continue;
        }
        s.noalias() += (weights[k] / static_cast<double>(x.rows())) * (x.transpose() * x);
    }
    // Timestamps without rows contribute nothing; renormalize over the rest.
    if (empty_weight > 0.0) {
        if (empty_weight >= 1.0) {
            throw EmptyWindowError("every timestamp within the bandwidth is empty", t);
        }
        s /= (1.0 - empty_weight);
    }
    return (0.5 * (s + s.transpose())).eval();
}

double default_bandwidth(std::size_t n, double c_h, double span)
{
    if (n < 2) {
        throw std::invalid_argument("default bandwidth needs n >= 2");
    }
    if (!(c_h > 0.0) || !(span > 0.0)) {
        throw std::invalid_argument("bandwidth constant and span must be positive");
    }
    return c_h * std::pow(static_cast<double>(n), -1.0 / 6.0) * span;
}

double default_lambda(std::size_t n, std::size_t m, double c)
{
    if (n < 2) {
        throw std::invalid_argument("default lambda needs n >= 2");
    }
    if (m < 2) {
        throw std::invalid_argument("default lambda needs m >= 2");
    }
    if (!(c >= 0.0)) {
        throw std::invalid_argument("lambda constant must be nonnegative");
    }
    const double nd = static_cast<double>(n);
    return c * std::pow(nd, -1.0 / 6.0) * std::log(nd) * std::sqrt(std::log(static_cast<double>(m)));
}

TransformedPanel gaussianize(const ObservationPanel& panel)
{
    const CopulaModel model = fit_copula(panel);
    if (!model.rejected.empty()) {
        const auto names = model.rejected_names();
        std::string list;
        for (const auto& name : names) {
            list += (list.empty() ? "" : ", ") + name;
        }
        throw RejectedVariablesError("zero-variance variables cannot be estimated: " + list, names);
    }
    TransformedPanel out = copula_transform(model, panel);
    center_pooled(out);
    return out;
}

NetworkSeries estimate_series(const TransformedPanel& gaussianized, const KernelSpec& spec, double lambda,
                              const EstimateOptions& opts)
{
    if (gaussianized.timestamps.empty()) {
        throw std::invalid_argument("panel has no timestamps");
    }
    const std::size_t count = gaussianized.timestamps.size();
    NetworkSeries series;
    series.timestamps = gaussianized.timestamps;
    series.entity_names = gaussianized.entity_names;
    series.hyperparameters.bandwidth = spec.bandwidth;
    series.hyperparameters.lambda = lambda;
    series.estimates.resize(count);
    std::vector<std::exception_ptr> failures(count);

    auto solve_one = [&](std::size_t k) {
        try {
            const double t = gaussianized.timestamps[k];
            series.estimates[k] = graphical_lasso(kernel_covariance(gaussianized, t, spec), lambda, opts.solver);
        } catch (...) {
            failures[k] = std::current_exception();
        }
    };

    const unsigned workers = std::min<std::size_t>(std::max(1U, opts.threads), count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) {
            solve_one(k);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < count; k = next++) {
                    solve_one(k);
                }
            });
        }
    }

    for (std::size_t k = 0; k < count; ++k) {
        if (failures[k]) {
            std::string what = "unknown error";
            try {
                std::rethrow_exception(failures[k]);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            std::ostringstream msg;
            msg << "estimation failed at timestamp " << gaussianized.timestamps[k] << ": " << what;
            throw TimestampError(msg.str(), gaussianized.timestamps[k], failures[k]);
        }
    }
    return series;
}

NetworkSeries estimate_series(const ObservationPanel& panel, const KernelSpec& spec, double lambda,
                              const EstimateOptions& opts)
{
    validate(panel);
    if (panel.timestamps.empty()) {
        throw std::invalid_argument("panel has no timestamps");
    }
    return estimate_series(gaussianize(panel), spec, lambda, opts);
}

double edge_churn(const NetworkSeries& series)
{
    if (series.estimates.size() < 2) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t k = 1; k < series.estimates.size(); ++k) {
        const auto& a = series.estimates[k - 1].edges;
        const auto& b = series.estimates[k].edges;
        std::size_t common = 0;
        for (const auto& e : a) {
            common += b.count(e);
        }
        total += static_cast<double>(a.size() + b.size() - 2 * common);
    }
    return total / static_cast<double>(series.estimates.size() - 1);
}

double mean_edge_count(const NetworkSeries& series)
{
    if (series.estimates.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& e : series.estimates) {
        total += static_cast<double>(e.edges.size());
    }
    return total / static_cast<double>(series.estimates.size());
}

std::size_t most_stable(std::span<const double> churn, const std::vector<bool>& all_empty)
{
    if (churn.size() != all_empty.size() || churn.empty()) {
        throw std::invalid_argument("stability inputs must be non-empty and of equal length");
    }
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < churn.size(); ++k) {
        if (!all_empty[k] && (!best || churn[k] < churn[*best])) {
            best = k;
        }
    }
    return best.value_or(0);
}

TunedSeries select_lambda_by_stability(const TransformedPanel& gaussianized, const KernelSpec& spec,
                                       std::span<const double> grid, const EstimateOptions& opts)
{
    if (grid.empty()) {
        throw std::invalid_argument("lambda grid is empty");
    }
    const auto n = static_cast<std::size_t>(pooled_rows(gaussianized).rows());
    const std::size_t m = gaussianized.entity_names.size();

    TunedSeries tuned;
    tuned.grid.assign(grid.begin(), grid.end());
    std::sort(tuned.grid.begin(), tuned.grid.end());
    std::vector<NetworkSeries> candidates;
    std::vector<bool> all_empty;
    for (double c : tuned.grid) {
        NetworkSeries candidate = estimate_series(gaussianized, spec, default_lambda(n, m, c), opts);
        candidate.hyperparameters.c = c;
        tuned.churn.push_back(edge_churn(candidate));
        all_empty.push_back(std::all_of(candidate.estimates.begin(), candidate.estimates.end(),
                                        [](const PrecisionEstimate& e) { return e.edges.empty(); }));
        candidates.push_back(std::move(candidate));
    }
    tuned.series = std::move(candidates[most_stable(tuned.churn, all_empty)]);
    return tuned;
}

}  // namespace evonet

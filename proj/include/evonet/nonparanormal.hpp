#pragma once

#include "evonet/panel.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace evonet {

/// Empirical marginal of one variable, fitted on samples pooled over every timestamp.
struct VariableMarginal {
    double mean = 0.0;
    double sd = 0.0;  // population form (divides by n)
    std::vector<double> sorted_samples;
};

/// Gaussian copula with Winsorized empirical CDFs. Immutable once fitted.
struct CopulaModel {
    std::vector<VariableMarginal> marginals;  // one per panel variable, rejected ones included
    std::vector<std::size_t> rejected;        // zero-variance variables
    std::vector<std::string> entity_names;
    double delta_n = 0.0;
    std::size_t total_samples = 0;

    bool is_rejected(std::size_t j) const;
    std::vector<std::string> rejected_names() const;
};

/// Winsorization bound 1 / (4 n^(1/4) sqrt(pi ln n)). Requires n >= 2.
double winsorization_bound(std::size_t n);

/// Standard normal quantile.
double normal_quantile(double p);

/// Fits per-variable mean, sd and ECDF on all rows of the panel. Variables with zero variance
/// are listed in `rejected` rather than raising. Throws InsufficientDataError when the panel
/// holds fewer than two samples.
CopulaModel fit_copula(const ObservationPanel& panel);

/// (#samples <= x) / n, clamped to [delta_n, 1 - delta_n].
double winsorized_cdf(const CopulaModel& model, std::size_t j, double x);

/// u_j + sd_j * quantile(winsorized_cdf(x)) for one value.
double copula_value(const CopulaModel& model, std::size_t j, double x);

/// Applies the copula to every entry. Throws std::invalid_argument if the panel's variables
/// do not match the model's.
TransformedPanel copula_transform(const CopulaModel& model, const ObservationPanel& panel);

/// Subtracts each variable's mean over all pooled rows, so second moments become covariances.
void center_pooled(TransformedPanel& panel);

}  // namespace evonet

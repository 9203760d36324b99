#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace evonet {

/// Entity observations over an evolving dimension. Each timestamp holds an n_t x m matrix:
/// rows are documents (samples), columns are entities (variables). Values are counts in
/// practice, but any finite nonnegative value is accepted.
struct ObservationPanel {
    std::vector<double> timestamps;
    std::vector<Eigen::MatrixXd> counts;
    std::vector<std::string> entity_names;

    std::size_t num_variables() const noexcept { return entity_names.size(); }
    std::size_t num_timestamps() const noexcept { return timestamps.size(); }
    std::size_t total_samples() const noexcept;
};

/// Real-valued panel produced by the copula transform; same shape as its source.
struct TransformedPanel {
    std::vector<double> timestamps;
    std::vector<Eigen::MatrixXd> values;
    std::vector<std::string> entity_names;
};

/// Throws std::invalid_argument unless timestamps are strictly increasing, every matrix has
/// m columns, and all values are finite and nonnegative.
void validate(const ObservationPanel& panel);

/// All rows of all timestamps stacked in timestamp order.
Eigen::MatrixXd pooled_rows(const ObservationPanel& panel);
Eigen::MatrixXd pooled_rows(const TransformedPanel& panel);

/// Copy of the panel without the listed variable indices.
ObservationPanel drop_variables(const ObservationPanel& panel, const std::vector<std::size_t>& indices);

/// Collapses all timestamps into one, positioned at the first timestamp.
ObservationPanel pool_timestamps(const ObservationPanel& panel);

}  // namespace evonet

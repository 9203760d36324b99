#include "evonet/panel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evonet {

namespace {

Eigen::MatrixXd stack(const std::vector<Eigen::MatrixXd>& blocks, std::size_t m)
{
    Eigen::Index rows = 0;
    for (const auto& b : blocks) {
        rows += b.rows();
    }
    Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(m));
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        out.middleRows(at, b.rows()) = b;
        at += b.rows();
    }
    return out;
}

}  // namespace

std::size_t ObservationPanel::total_samples() const noexcept
{
    std::size_t n = 0;
    for (const auto& c : counts) {
        n += static_cast<std::size_t>(c.rows());
    }
    return n;
}

void validate(const ObservationPanel& panel)
{
    if (panel.timestamps.size() != panel.counts.size()) {
        throw std::invalid_argument("panel has " + std::to_string(panel.timestamps.size()) + " timestamps but "
                                    + std::to_string(panel.counts.size()) + " count matrices");
    }
    if (panel.entity_names.empty()) {
        throw std::invalid_argument("panel has no variables");
    }
    const auto m = static_cast<Eigen::Index>(panel.entity_names.size());
    for (std::size_t k = 0; k < panel.timestamps.size(); ++k) {
        if (!std::isfinite(panel.timestamps[k])) {
            throw std::invalid_argument("panel timestamp is not finite");
        }
        if (k > 0 && !(panel.timestamps[k] > panel.timestamps[k - 1])) {
            throw std::invalid_argument("panel timestamps must be strictly increasing");
        }
        const auto& c = panel.counts[k];
        if (c.cols() != m) {
            throw std::invalid_argument("count matrix at timestamp " + std::to_string(panel.timestamps[k]) + " has "
                                        + std::to_string(c.cols()) + " columns, expected " + std::to_string(m));
        }
        if (!c.allFinite() || (c.size() > 0 && c.minCoeff() < 0.0)) {
            throw std::invalid_argument("counts must be finite and nonnegative");
        }
    }
}

Eigen::MatrixXd pooled_rows(const ObservationPanel& panel)
{
    return stack(panel.counts, panel.entity_names.size());
}

Eigen::MatrixXd pooled_rows(const TransformedPanel& panel)
{
    return stack(panel.values, panel.entity_names.size());
}

ObservationPanel drop_variables(const ObservationPanel& panel, const std::vector<std::size_t>& indices)
{
    std::vector<Eigen::Index> keep;
    ObservationPanel out;
    out.timestamps = panel.timestamps;
    for (std::size_t j = 0; j < panel.entity_names.size(); ++j) {
        if (std::find(indices.begin(), indices.end(), j) == indices.end()) {
            keep.push_back(static_cast<Eigen::Index>(j));
            out.entity_names.push_back(panel.entity_names[j]);
        }
    }
    out.counts.reserve(panel.counts.size());
    for (const auto& c : panel.counts) {
        out.counts.emplace_back(c(Eigen::all, keep));
    }
    return out;
}

ObservationPanel pool_timestamps(const ObservationPanel& panel)
{
    ObservationPanel out;
    out.entity_names = panel.entity_names;
    out.timestamps = {panel.timestamps.empty() ? 0.0 : panel.timestamps.front()};
    out.counts = {pooled_rows(panel)};
    return out;
}

}  // namespace evonet

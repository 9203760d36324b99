#include "evonet/nonparanormal.hpp"

#include "evonet/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace evonet {

bool CopulaModel::is_rejected(std::size_t j) const
{
    return std::find(rejected.begin(), rejected.end(), j) != rejected.end();
}

std::vector<std::string> CopulaModel::rejected_names() const
{
    std::vector<std::string> names;
    for (auto j : rejected) {
        names.push_back(j < entity_names.size() ? entity_names[j] : std::to_string(j));
    }
    return names;
}

double winsorization_bound(std::size_t n)
{
    if (n < 2) {
        throw std::invalid_argument("winsorization bound needs n >= 2");
    }
    const double nd = static_cast<double>(n);
    return 1.0 / (4.0 * std::pow(nd, 0.25) * std::sqrt(std::numbers::pi * std::log(nd)));
}

double normal_quantile(double p)
{
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, p);
}

CopulaModel fit_copula(const ObservationPanel& panel)
{
    validate(panel);
    const Eigen::MatrixXd rows = pooled_rows(panel);
    const auto n = static_cast<std::size_t>(rows.rows());
    if (n < 2) {
        throw InsufficientDataError("copula fit needs at least 2 pooled samples, got " + std::to_string(n));
    }

    CopulaModel model;
    model.entity_names = panel.entity_names;
    model.total_samples = n;
    model.delta_n = winsorization_bound(n);
    model.marginals.resize(static_cast<std::size_t>(rows.cols()));
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        auto& marginal = model.marginals[static_cast<std::size_t>(j)];
        const auto col = rows.col(j);
        marginal.mean = col.mean();
        marginal.sd = std::sqrt((col.array() - marginal.mean).square().sum() / static_cast<double>(n));
        marginal.sorted_samples.assign(col.begin(), col.end());
        std::sort(marginal.sorted_samples.begin(), marginal.sorted_samples.end());
        if (marginal.sorted_samples.front() == marginal.sorted_samples.back()) {
            marginal.sd = 0.0;
            model.rejected.push_back(static_cast<std::size_t>(j));
        }
    }
    return model;
}

double winsorized_cdf(const CopulaModel& model, std::size_t j, double x)
{
    const auto& samples = model.marginals.at(j).sorted_samples;
    const auto below = std::upper_bound(samples.begin(), samples.end(), x) - samples.begin();
    const double raw = static_cast<double>(below) / static_cast<double>(samples.size());
    if (raw < model.delta_n) {
        return model.delta_n;
    }
    if (raw > 1.0 - model.delta_n) {
        return 1.0 - model.delta_n;
    }
    return raw;
}

double copula_value(const CopulaModel& model, std::size_t j, double x)
{
    const auto& marginal = model.marginals.at(j);
    return marginal.mean + marginal.sd * normal_quantile(winsorized_cdf(model, j, x));
}

TransformedPanel copula_transform(const CopulaModel& model, const ObservationPanel& panel)
{
    if (panel.entity_names != model.entity_names) {
        throw std::invalid_argument("panel variables do not match the fitted copula");
    }
    validate(panel);
    TransformedPanel out;
    out.timestamps = panel.timestamps;
    out.entity_names = panel.entity_names;
    out.values.reserve(panel.counts.size());
    for (const auto& counts : panel.counts) {
        Eigen::MatrixXd v(counts.rows(), counts.cols());
        for (Eigen::Index j = 0; j < counts.cols(); ++j) {
            for (Eigen::Index r = 0; r < counts.rows(); ++r) {
                v(r, j) = copula_value(model, static_cast<std::size_t>(j), counts(r, j));
            }
        }
        out.values.push_back(std::move(v));
    }
    return out;
}

void center_pooled(TransformedPanel& panel)
{
    const Eigen::MatrixXd rows = pooled_rows(panel);
    if (rows.rows() == 0) {
        return;
    }
    const Eigen::RowVectorXd mean = rows.colwise().mean();
    for (auto& v : panel.values) {
        v.rowwise() -= mean;
    }
}

}  // namespace evonet

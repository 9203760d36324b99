#include "evonet/glasso.hpp"

#include "evonet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace evonet {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kInnerTolerance = 1e-13;
constexpr int kMaxInnerSweeps = 10000;

Eigen::MatrixXd checked_covariance(const Eigen::MatrixXd& s)
{
    if (s.rows() == 0 || s.rows() != s.cols()) {
        throw std::invalid_argument("covariance must be a non-empty square matrix");
    }
    if (!s.allFinite()) {
        throw std::invalid_argument("covariance has non-finite entries");
    }
    const double scale = s.cwiseAbs().maxCoeff();
    const double asymmetry = (s - s.transpose()).cwiseAbs().maxCoeff();
    if (asymmetry > kSymmetryTolerance * scale) {
        throw std::invalid_argument("covariance is not symmetric (max asymmetry "
                                    + std::to_string(asymmetry) + ")");
    }
    Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    for (Eigen::Index i = 0; i < sym.rows(); ++i) {
        if (!(sym(i, i) > 0.0)) {
            throw std::invalid_argument("covariance diagonal must be strictly positive");
        }
    }
    return sym;
}

double off_diagonal_l1(const Eigen::MatrixXd& theta)
{
    return theta.cwiseAbs().sum() - theta.diagonal().cwiseAbs().sum();
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt)
{
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double soft_threshold(double x, double lambda)
{
    if (x > lambda) {
        return x - lambda;
    }
    if (x < -lambda) {
        return x + lambda;
    }
    return 0.0;
}

// primal(theta) - dual(w); w must be dual feasible.
double gap_against(const Eigen::MatrixXd& s, const Eigen::MatrixXd& theta, const Eigen::LLT<Eigen::MatrixXd>& theta_llt,
                   const Eigen::MatrixXd& w, double lambda)
{
    Eigen::LLT<Eigen::MatrixXd> w_llt(w);
    if (w_llt.info() != Eigen::Success) {
        return std::numeric_limits<double>::infinity();
    }
    const double primal = -log_det(theta_llt) + (s.cwiseProduct(theta)).sum() + lambda * off_diagonal_l1(theta);
    const double dual = log_det(w_llt) + static_cast<double>(s.rows());
    return std::max(0.0, primal - dual);
}

double projected_gap(const Eigen::MatrixXd& s, const Eigen::MatrixXd& theta, const Eigen::LLT<Eigen::MatrixXd>& theta_llt,
                     double lambda)
{
    const auto m = s.rows();
    Eigen::MatrixXd w = theta_llt.solve(Eigen::MatrixXd::Identity(m, m));
    w = (0.5 * (w + w.transpose())).eval();
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            w(i, j) = i == j ? s(i, i) : s(i, j) + std::clamp(w(i, j) - s(i, j), -lambda, lambda);
        }
    }
    return gap_against(s, theta, theta_llt, w, lambda);
}

PrecisionEstimate finish(const Eigen::MatrixXd& s, Eigen::MatrixXd theta, double lambda, double gap, int iterations,
                         const SolverOptions& opts)
{
    PrecisionEstimate est;
    est.objective = penalized_objective(s, theta, lambda);
    est.edges = support_edges(theta, opts.support_threshold);
    est.theta = std::move(theta);
    est.lambda = lambda;
    est.duality_gap = gap;
    est.iterations = iterations;
    return est;
}

// Cyclic coordinate descent for min_b 0.5 b'W11 b - s12'b + lambda |b|_1, where W11 is w with
// row/column j removed. beta(j) stays zero; wb tracks W * beta.
void solve_column_lasso(const Eigen::MatrixXd& w, const Eigen::MatrixXd& s, Eigen::Index j, double lambda,
                        Eigen::Ref<Eigen::VectorXd> beta)
{
    const auto m = w.rows();
    Eigen::VectorXd wb = w * beta;
    for (int sweep = 0; sweep < kMaxInnerSweeps; ++sweep) {
        double max_delta = 0.0;
        double max_beta = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            if (k == j) {
                continue;
            }
            const double partial = s(k, j) - (wb(k) - w(k, k) * beta(k));
            const double updated = soft_threshold(partial, lambda) / w(k, k);
            const double delta = updated - beta(k);
            if (delta != 0.0) {
                wb += delta * w.col(k);
                beta(k) = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
            max_beta = std::max(max_beta, std::abs(updated));
        }
        if (max_delta <= kInnerTolerance * std::max(1.0, max_beta)) {
            break;
        }
    }
}

}  // namespace

double penalized_objective(const Eigen::MatrixXd& s, const Eigen::MatrixXd& theta, double lambda)
{
    Eigen::LLT<Eigen::MatrixXd> llt(theta);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("theta is not positive definite");
    }
    return -log_det(llt) + (s.cwiseProduct(theta)).sum() + lambda * off_diagonal_l1(theta);
}

double duality_gap(const Eigen::MatrixXd& s, const Eigen::MatrixXd& theta, double lambda)
{
    const Eigen::MatrixXd sym = checked_covariance(s);
    if (theta.rows() != sym.rows() || theta.cols() != sym.cols()) {
        throw std::invalid_argument("theta and covariance dimensions differ");
    }
    if (!(lambda >= 0.0)) {
        throw std::invalid_argument("lambda must be nonnegative");
    }
    const Eigen::MatrixXd theta_sym = 0.5 * (theta + theta.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(theta_sym);
    if (!theta_sym.allFinite() || llt.info() != Eigen::Success) {
        throw std::invalid_argument("theta is not positive definite");
    }
    return projected_gap(sym, theta_sym, llt, lambda);
}

EdgeSet support_edges(const Eigen::MatrixXd& theta, double threshold)
{
    EdgeSet edges;
    for (Eigen::Index j = 0; j < theta.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            if (std::abs(theta(i, j)) > threshold) {
                edges.emplace(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            }
        }
    }
    return edges;
}

PrecisionEstimate graphical_lasso(const Eigen::MatrixXd& s_in, double lambda, const SolverOptions& opts)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("lambda must be a finite nonnegative number");
    }
    if (!(opts.tolerance > 0.0) || opts.max_iterations < 1 || !(opts.support_threshold >= 0.0)) {
        throw std::invalid_argument("invalid solver options");
    }
    const Eigen::MatrixXd s = checked_covariance(s_in);
    const auto m = s.rows();

    if (lambda == 0.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(s);
        if (llt.info() != Eigen::Success) {
            throw SingularInputError("covariance is not positive definite and lambda = 0");
        }
        Eigen::MatrixXd theta = llt.solve(Eigen::MatrixXd::Identity(m, m));
        theta = (0.5 * (theta + theta.transpose())).eval();
        Eigen::LLT<Eigen::MatrixXd> theta_llt(theta);
        if (theta_llt.info() != Eigen::Success) {
            throw SingularInputError("covariance is numerically singular");
        }
        const double gap = projected_gap(s, theta, theta_llt, lambda);
        return finish(s, std::move(theta), lambda, gap, 1, opts);
    }

    const Eigen::MatrixXd off = s - Eigen::MatrixXd(s.diagonal().asDiagonal());
    const double max_off = m > 1 ? off.cwiseAbs().maxCoeff() : 0.0;

    // Full shrinkage: W = diag(S) is dual feasible and its inverse is diagonal.
    if (max_off <= lambda) {
        Eigen::MatrixXd theta = s.diagonal().cwiseInverse().asDiagonal();
        Eigen::LLT<Eigen::MatrixXd> theta_llt(theta);
        const double gap = projected_gap(s, theta, theta_llt, lambda);
        return finish(s, std::move(theta), lambda, gap, 0, opts);
    }

    // Shrink the off-diagonal just enough to land inside the dual box; the convex combination
    // with diag(S) is positive definite even when S is only semidefinite.
    const double alpha = std::min(1.0, lambda / max_off);
    Eigen::MatrixXd w = s - alpha * off;
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd theta(m, m);
    double gap = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        const Eigen::MatrixXd w_prev = w;
        for (Eigen::Index j = 0; j < m; ++j) {
            solve_column_lasso(w, s, j, lambda, beta.col(j));
            Eigen::VectorXd w12 = w * beta.col(j);
            for (Eigen::Index k = 0; k < m; ++k) {
                if (k != j) {
                    w(k, j) = w12(k);
                    w(j, k) = w12(k);
                }
            }
        }

        for (Eigen::Index j = 0; j < m; ++j) {
            const double schur = s(j, j) - w.col(j).dot(beta.col(j));
            theta(j, j) = 1.0 / schur;
            for (Eigen::Index k = 0; k < m; ++k) {
                if (k != j) {
                    theta(k, j) = -beta(k, j) * theta(j, j);
                }
            }
        }
        theta = (0.5 * (theta + theta.transpose())).eval();

        Eigen::LLT<Eigen::MatrixXd> theta_llt(theta);
        if (theta.allFinite() && theta_llt.info() == Eigen::Success) {
            gap = std::min(gap_against(s, theta, theta_llt, w, lambda), projected_gap(s, theta, theta_llt, lambda));
            // A small gap alone leaves Theta loose where the objective is flat; also wait for W
            // to stop moving.
            const double step = (w - w_prev).cwiseAbs().maxCoeff();
            if (gap <= opts.tolerance && step <= opts.tolerance) {
                return finish(s, std::move(theta), lambda, gap, iter, opts);
            }
        } else {
            gap = std::numeric_limits<double>::infinity();
        }
    }
    throw NonConvergenceError("graphical lasso did not reach duality gap " + std::to_string(opts.tolerance) + " in "
                                  + std::to_string(opts.max_iterations) + " sweeps (gap " + std::to_string(gap) + ")",
                              theta, gap, opts.max_iterations);
}

}  // namespace evonet

#pragma once

// Shared helpers for the test and acceptance binaries: random SPD inputs and an independent
// ADMM minimizer of the penalized likelihood used as a cross-check for the coordinate solver.

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace evonet::testing {

inline Eigen::MatrixXd random_spd(int m, std::mt19937_64& rng, double ridge = 0.1)
{
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd a(m, 2 * m);
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            a(i, j) = z(rng);
        }
    }
    Eigen::MatrixXd s = a * a.transpose() / (2.0 * m);
    s.diagonal().array() += ridge;
    return (0.5 * (s + s.transpose())).eval();
}

/// Scaled to unit diagonal, so off-diagonals lie in (-1, 1) and lambda has a fixed meaning.
inline Eigen::MatrixXd random_correlation(int m, std::mt19937_64& rng)
{
    const Eigen::MatrixXd s = random_spd(m, rng);
    const Eigen::VectorXd d = s.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd c = d.asDiagonal() * s * d.asDiagonal();
    c.diagonal().setOnes();
    return c;
}

/// ADMM on Theta = Z with the off-diagonal l1 penalty on Z. Unrelated to the column-wise
/// coordinate solver apart from the objective.
inline Eigen::MatrixXd admm_glasso(const Eigen::MatrixXd& s, double lambda, int iterations = 20000, double rho = 1.0)
{
    const auto m = s.rows();
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd theta = z;
    for (int it = 0; it < iterations; ++it) {
        const Eigen::MatrixXd a = rho * (z - u) - s;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((0.5 * (a + a.transpose())).eval());
        const Eigen::VectorXd e = eig.eigenvalues();
        Eigen::VectorXd t(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            t(k) = (e(k) + std::sqrt(e(k) * e(k) + 4.0 * rho)) / (2.0 * rho);
        }
        theta = eig.eigenvectors() * t.asDiagonal() * eig.eigenvectors().transpose();
        const Eigen::MatrixXd z_prev = z;
        const Eigen::MatrixXd v = theta + u;
        const double kappa = lambda / rho;
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                z(i, j) = i == j ? v(i, j) : std::copysign(std::max(std::abs(v(i, j)) - kappa, 0.0), v(i, j));
            }
        }
        u += theta - z;
        if (it > 200 && (theta - z).cwiseAbs().maxCoeff() < 1e-13 &&
            (z - z_prev).cwiseAbs().maxCoeff() < 1e-13) {
            break;
        }
    }
    return theta;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace evonet::testing

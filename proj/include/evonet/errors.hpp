#pragma once

#include <Eigen/Dense>

#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

namespace evonet {

/// Raised when an unpenalized solve is requested on a covariance that has no inverse.
class SingularInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The solver ran out of sweeps. Carries the last iterate so callers can inspect it.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, Eigen::MatrixXd last_theta, double gap, int iterations)
        : std::runtime_error(what), last_theta_(std::move(last_theta)), gap_(gap), iterations_(iterations)
    {}

    const Eigen::MatrixXd& last_theta() const noexcept { return last_theta_; }
    double gap() const noexcept { return gap_; }
    int iterations() const noexcept { return iterations_; }

private:
    Eigen::MatrixXd last_theta_;
    double gap_;
    int iterations_;
};

/// No timestamp falls inside the kernel support around the requested position.
class EmptyWindowError : public std::runtime_error {
public:
    EmptyWindowError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
    double position() const noexcept { return t_; }

private:
    double t_;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One or more variables have zero variance and cannot be Gaussianized.
class RejectedVariablesError : public std::runtime_error {
public:
    RejectedVariablesError(const std::string& what, std::vector<std::string> names)
        : std::runtime_error(what), names_(std::move(names))
    {}
    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
};

/// Wraps a failure raised while estimating the network at one timestamp.
class TimestampError : public std::runtime_error {
public:
    TimestampError(const std::string& what, double timestamp, std::exception_ptr cause)
        : std::runtime_error(what), timestamp_(timestamp), cause_(std::move(cause))
    {}

    double timestamp() const noexcept { return timestamp_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    double timestamp_;
    std::exception_ptr cause_;
};

}  // namespace evonet

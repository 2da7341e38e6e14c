#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace glcoef {

/// Largest supported ambient dimension. Matrices and vectors are stack
/// allocated up to this size so that hot Monte Carlo loops never touch the heap.
inline constexpr int kMaxDim = 8;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input violated a documented precondition (dimension, range, shape).
class DomainError : public Error {
public:
    using Error::Error;
};

/// g·v vanished numerically, so the projective action is undefined.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Raised when an explicit product would overflow double range.
class OverflowError : public Error {
public:
    using Error::Error;
};

inline constexpr double kPi = 3.14159265358979323846264338327950288;

} // namespace glcoef

#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace signedgl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Above this node count dense factorizations are replaced by iterative ones.
inline constexpr Index kDenseCap = 2000;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

// Raised when a Ginzburg-Landau run is asked to use an operator that is not
// positive semi-definite (the functional is unbounded below otherwise).
class NotPsdError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_residual)
        : Error(what), best_residual_(best_residual) {}
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

}  // namespace signedgl

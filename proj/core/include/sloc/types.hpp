#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace sloc {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using Vec2 = Eigen::Vector2d;
using RealVector = Eigen::VectorXd;
using Vector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, violated preconditions, malformed input.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative solver or a quadrature did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

enum class RegionShape { Ball, Box };

}  // namespace sloc

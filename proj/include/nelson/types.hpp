#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace nelson {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Sparse complex operator in row-major storage; every Hamiltonian and
/// transformation in the library is one of these.
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// Amplitudes over a composite (particle configurations x Fock states) basis.
using StateVector = Eigen::VectorXcd;

/// Per-mode complex coefficients, e.g. a smearing function sampled on the grid.
using ModeVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when an iterative routine stops without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual estimate " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace nelson

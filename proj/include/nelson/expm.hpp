#pragma once

#include <functional>

#include "nelson/types.hpp"

namespace nelson {

struct KrylovOptions {
  int dim = 30;
  /// Bound on ||result - exp(zH) psi|| relative to ||psi||.
  double tol = 1e-12;
  int max_substeps = 100000;
};

/// y = H x for an operator given only by its action.
using LinearMap = std::function<void(const Eigen::VectorXcd& x, Eigen::VectorXcd& y)>;

/// exp(z H) psi by Arnoldi projection with adaptive substepping. Throws
/// ConvergenceError when the substep shrinks below resolution.
StateVector expm_apply(const LinearMap& apply, const StateVector& psi, Complex z,
                       const KrylovOptions& opts = {});
StateVector expm_apply(const SparseOperator& h, const StateVector& psi, Complex z,
                       const KrylovOptions& opts = {});

/// Dense exp(a) by Pade scaling and squaring.
Eigen::MatrixXcd expm_dense(const Eigen::MatrixXcd& a);

}  // namespace nelson

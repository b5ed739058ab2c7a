#pragma once

#include "nelson/space.hpp"

namespace nelson {

/// Classical field amplitudes alpha_j = alpha(k_j) on a mode grid.
struct ClassicalFieldSpec {
  ModeGrid grid;
  ModeVector alpha;

  static ClassicalFieldSpec create(ModeGrid grid, ModeVector alpha);

  /// alpha / lambda.
  ClassicalFieldSpec scaled(double factor) const;
  double norm2() const { return weighted_norm2(grid, alpha); }
  double energy_norm2() const { return weighted_norm2(grid, alpha, 1.0); }
};

/// alpha_j e^{-i omega_j t}.
ModeVector evolve_alpha(const ClassicalFieldSpec& spec, double t);

/// Classical wave A(t, x), or its time derivative, optionally restricted by a
/// cutoff mask.
double field_A(const ClassicalFieldSpec& spec, const CutoffMask* mask, double t,
               const Eigen::VectorXd& x, bool derivative = false);

/// Composite diagonal of sum_j A(t, x_j) (or its time derivative).
Eigen::VectorXd A_diagonal(const ClassicalFieldSpec& spec, const CompositeSpace& space, double t,
                           bool derivative = false, const CutoffMask* mask = nullptr);

/// Multiplication operator sum_j A(t, x_j) on the composite space.
SparseOperator A_operator(const ClassicalFieldSpec& spec, const CompositeSpace& space, double t,
                          bool derivative = false, const CutoffMask* mask = nullptr);

}  // namespace nelson

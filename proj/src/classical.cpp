#include "nelson/classical.hpp"

#include <cmath>
#include <stdexcept>

namespace nelson {

ClassicalFieldSpec ClassicalFieldSpec::create(ModeGrid grid, ModeVector alpha) {
  if (alpha.size() != grid.size())
    throw std::invalid_argument("ClassicalFieldSpec: amplitude count does not match mode count");
  if (!alpha.allFinite()) throw std::invalid_argument("ClassicalFieldSpec: amplitudes not finite");
  return ClassicalFieldSpec{std::move(grid), std::move(alpha)};
}

ClassicalFieldSpec ClassicalFieldSpec::scaled(double factor) const {
  return ClassicalFieldSpec{grid, alpha * factor};
}

ModeVector evolve_alpha(const ClassicalFieldSpec& spec, double t) {
  ModeVector out(spec.alpha.size());
  for (Index j = 0; j < out.size(); ++j)
    out(j) = spec.alpha(j) * std::polar(1.0, -spec.grid.omegas(j) * t);
  return out;
}

double field_A(const ClassicalFieldSpec& spec, const CutoffMask* mask, double t,
               const Eigen::VectorXd& x, bool derivative) {
  const ModeGrid& grid = spec.grid;
  if (x.size() != grid.dim) throw std::invalid_argument("field_A: wrong coordinate length");
  double sum = 0.0;
  for (Index j = 0; j < grid.size(); ++j) {
    if (mask && mask->flags(j) == 0.0) continue;
    const double w = grid.omegas(j);
    Complex term = spec.alpha(j) * std::polar(1.0, grid.momenta.col(j).dot(x) - w * t);
    if (derivative) term *= Complex(0.0, -w);
    // term + conj(term)
    sum += grid.weights(j) * 2.0 * term.real() / std::sqrt(2.0 * w);
  }
  return std::pow(2.0 * kPi, -0.5 * grid.dim) * sum;
}

Eigen::VectorXd A_diagonal(const ClassicalFieldSpec& spec, const CompositeSpace& space, double t,
                           bool derivative, const CutoffMask* mask) {
  const auto f = [&](const Eigen::VectorXd& x) {
    return Complex(field_A(spec, mask, t, x, derivative));
  };
  const Eigen::VectorXcd particle = position_diagonal(space.lattice, f, Multiplier::sum_over_particles);
  return spread_diagonal(space, particle).real();
}

SparseOperator A_operator(const ClassicalFieldSpec& spec, const CompositeSpace& space, double t,
                          bool derivative, const CutoffMask* mask) {
  const Eigen::VectorXd diag = A_diagonal(spec, space, t, derivative, mask);
  SparseOperator op(diag.size(), diag.size());
  op.reserve(Eigen::VectorXi::Constant(diag.size(), 1));
  for (Index i = 0; i < diag.size(); ++i) op.insert(i, i) = diag(i);
  op.makeCompressed();
  return op;
}

}  // namespace nelson

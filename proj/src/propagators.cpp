#include "nelson/propagators.hpp"

#include <cmath>
#include <stdexcept>

namespace nelson {

void PropagationConfig::validate() const {
  if (steps < 1) throw std::invalid_argument("PropagationConfig: steps must be >= 1");
  if (!(step_tol > 0.0)) throw std::invalid_argument("PropagationConfig: step_tol must be > 0");
  if (max_doublings < 1) throw std::invalid_argument("PropagationConfig: max_doublings must be >= 1");
}

Dynamics Dynamics::build(Model model, ClassicalFieldSpec field, PropagationConfig config) {
  config.validate();
  if (field.alpha.size() != model.params.grid.size())
    throw std::invalid_argument("Dynamics: field and model grids differ");
  SparseOperator h0 = free_hamiltonian(model);
  const double shift = model.params.lattice.particles * self_energy(model.params, model.mask);
  SparseOperator generator = h0 + interaction(model, model.mask);
  SparseOperator id(generator.rows(), generator.cols());
  id.setIdentity();
  generator -= shift * id;
  Dressing dressing = build_dressing(model, config.krylov);
  return Dynamics{std::move(model), std::move(h0),       std::move(generator),
                  std::move(field), std::move(dressing), std::move(config)};
}

StateVector propagate_U(const Dynamics& dyn, double t, const StateVector& psi) {
  return expm_apply(dyn.generator, psi, Complex(0.0, -t), dyn.config.krylov);
}

StateVector propagate_V_fixed(const Dynamics& dyn, double t, double s, const StateVector& psi,
                              int steps) {
  if (steps < 1) throw std::invalid_argument("propagate_V_fixed: steps must be >= 1");
  const double delta = (t - s) / steps;
  StateVector state = psi;
  for (int i = 0; i < steps; ++i) {
    const Eigen::VectorXd a = A_diagonal(dyn.field, dyn.model.space, s + (i + 0.5) * delta);
    const LinearMap apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
      y.noalias() = dyn.h0 * x;
      y += (a.array() * x.array()).matrix();
    };
    state = expm_apply(apply, state, Complex(0.0, -delta), dyn.config.krylov);
  }
  return state;
}

VResult propagate_V(const Dynamics& dyn, double t, double s, const StateVector& psi) {
  int steps = dyn.config.steps;
  StateVector coarse = propagate_V_fixed(dyn, t, s, psi, steps);
  double increment = 0.0;
  for (int k = 0; k < dyn.config.max_doublings; ++k) {
    steps *= 2;
    StateVector fine = propagate_V_fixed(dyn, t, s, psi, steps);
    increment = (fine - coarse).norm();
    if (increment <= dyn.config.step_tol * psi.norm()) return VResult{std::move(fine), steps, increment};
    coarse = std::move(fine);
  }
  throw ConvergenceError("propagate_V: step doubling did not converge", increment);
}

Eigen::MatrixXcd coherent_frame(const Dynamics& dyn, double t, bool masked) {
  const double lambda = dyn.coupling();
  if (!(lambda > 0.0)) throw std::invalid_argument("coherent frame needs coupling > 0");
  ModeVector alpha = evolve_alpha(dyn.field, t) / lambda;
  if (masked) alpha = (alpha.array() * dyn.model.mask.flags.cast<Complex>()).matrix();
  return weyl(dyn.model.space.basis, dyn.model.params.grid, alpha);
}

StateVector propagate_W(const Dynamics& dyn, double t, double s, const StateVector& psi) {
  StateVector state = apply_on_fock(dyn.model.space, coherent_frame(dyn, s, false), psi);
  state = propagate_U(dyn, t - s, state);
  return apply_on_fock(dyn.model.space, coherent_frame(dyn, t, false).adjoint(), state);
}

StateVector propagate_Z(const Dynamics& dyn, double t, double s, const StateVector& psi) {
  StateVector state = dyn.dressing.apply(psi);
  state = apply_on_fock(dyn.model.space, coherent_frame(dyn, s, true), state);
  state = propagate_U(dyn, t - s, state);
  state = apply_on_fock(dyn.model.space, coherent_frame(dyn, t, true).adjoint(), state);
  return dyn.dressing.apply_adjoint(state);
}

double energy_norm(const SparseOperator& h0, const StateVector& psi) {
  const StateVector h = h0 * psi;
  return std::sqrt(psi.squaredNorm() + psi.dot(h).real());
}

}  // namespace nelson

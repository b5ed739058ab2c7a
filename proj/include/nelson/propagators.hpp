#pragma once

#include <vector>

#include "nelson/classical.hpp"
#include "nelson/expm.hpp"
#include "nelson/model.hpp"

namespace nelson {

struct PropagationConfig {
  std::vector<double> times{0.25, 0.5, 1.0};
  int steps = 64;
  /// V doubles its step count until successive results differ by less than
  /// step_tol * ||psi||.
  double step_tol = 1e-6;
  int max_doublings = 10;
  KrylovOptions krylov;

  void validate() const;
};

/// Everything a propagator needs for one parameter set and one classical field.
struct Dynamics {
  Model model;
  SparseOperator h0;
  /// H_sigma - p E_sigma.
  SparseOperator generator;
  ClassicalFieldSpec field;
  Dressing dressing;
  PropagationConfig config;

  static Dynamics build(Model model, ClassicalFieldSpec field, PropagationConfig config);
  double coupling() const { return model.params.coupling; }
};

/// exp(-i t (H_sigma - p E_sigma)) psi.
StateVector propagate_U(const Dynamics& dyn, double t, const StateVector& psi);

/// V(t, s) psi with a fixed number of midpoint steps.
StateVector propagate_V_fixed(const Dynamics& dyn, double t, double s, const StateVector& psi,
                              int steps);

struct VResult {
  StateVector state;
  int steps = 0;
  double increment = 0.0;
};

/// V(t, s) psi with step doubling; throws ConvergenceError carrying the last
/// increment after max_doublings.
VResult propagate_V(const Dynamics& dyn, double t, double s, const StateVector& psi);

/// Fock-factor Weyl operators C(alpha_lambda(t)), optionally masked.
Eigen::MatrixXcd coherent_frame(const Dynamics& dyn, double t, bool masked);

/// C(alpha_lambda(t))* U(t - s) C(alpha_lambda(s)) psi.
StateVector propagate_W(const Dynamics& dyn, double t, double s, const StateVector& psi);

/// Q* C(chi alpha_lambda(t))* U(t - s) C(chi alpha_lambda(s)) Q psi.
StateVector propagate_Z(const Dynamics& dyn, double t, double s, const StateVector& psi);

/// ||(1 + H_0)^{1/2} psi||.
double energy_norm(const SparseOperator& h0, const StateVector& psi);

}  // namespace nelson

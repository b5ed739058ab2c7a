#pragma once

#include "nelson/fock.hpp"
#include "nelson/lattice.hpp"

namespace nelson {

/// Composite space lattice^{d p} (x) Fock. Index = config * fock_dim + fock_index,
/// so operators are kron(particle_op, fock_op).
struct CompositeSpace {
  ParticleLattice lattice;
  FockBasis basis;

  Index particle_dim() const { return lattice.config_count(); }
  Index fock_dim() const { return basis.size(); }
  Index dim() const { return particle_dim() * fock_dim(); }
};

SparseOperator on_particles(const CompositeSpace& space, const SparseOperator& op);
SparseOperator on_fock(const CompositeSpace& space, const SparseOperator& op);

/// kron(particle_state, fock_state).
StateVector product_state(const Eigen::VectorXcd& particle_state, const Eigen::VectorXcd& fock_state);

/// Fock basis vector for occupation `n`; throws if `n` is outside the truncation.
Eigen::VectorXcd fock_state(const FockBasis& basis, const Occupation& n);

/// (I (x) op) psi for a dense operator on the Fock factor.
StateVector apply_on_fock(const CompositeSpace& space, const Eigen::MatrixXcd& op,
                          const StateVector& psi);

/// Expands a particle-factor diagonal to the composite diagonal.
Eigen::VectorXcd spread_diagonal(const CompositeSpace& space, const Eigen::VectorXcd& particle_diag);

}  // namespace nelson

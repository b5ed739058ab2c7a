#pragma once

#include <vector>

#include "nelson/expm.hpp"
#include "nelson/space.hpp"

namespace nelson {

struct ModelParams {
  ParticleLattice lattice;
  ModeGrid grid;
  double coupling = 0.0;
  double sigma = 1.0;
  double sigma0 = 0.5;
  int n_max = 6;

  /// Throws std::invalid_argument unless 0 < sigma0 < sigma, coupling >= 0,
  /// n_max >= 0 and grid and lattice dimensions agree.
  void validate() const;
};

enum class Profile { interaction, dressing };

/// X-independent amplitude of f_j or g_j; the particle factor e^{-ik.x_j} is
/// applied when operators are assembled.
struct CouplingProfile {
  Profile kind = Profile::interaction;
  ModeVector base;
};

CouplingProfile coupling_profile(const ModelParams& params, Profile kind);

/// Parameters plus the composite space, cutoff masks and Fock ladders shared by
/// every operator built for them.
struct Model {
  ModelParams params;
  CompositeSpace space;
  CutoffMask mask;
  CutoffMask mask0;
  std::vector<SparseOperator> lowering;

  static Model build(ModelParams params);
};

/// X-dependent smeared ladder for particle `particle` with f(X,k) = base(k) e^{-ik.x}:
/// `annihilate` gives a(conj f), `create` gives a*(f).
SparseOperator position_smear(const Model& model, const ModeVector& base, int particle, Ladder kind);

/// H_0 = H_01 + H_02.
SparseOperator free_hamiltonian(const Model& model);

/// sum over particles of a(conj(f chi)) + a*(f chi) with the given cutoff.
SparseOperator interaction(const Model& model, const CutoffMask& mask);

/// H_sigma = H_0 + H_I,sigma.
SparseOperator hamiltonian(const Model& model);

/// Discrete self-energy; always <= 0 and exactly quadratic in the coupling.
double self_energy(const ModelParams& params, const CutoffMask& mask);

/// Dressing-induced pair potential at coordinate difference x.
double pair_potential(const ModelParams& params, const Eigen::VectorXd& x);

/// Gross transformation Q = exp(-T). T is block diagonal over particle
/// configurations; each block of Q is the Weyl operator of the local dressing
/// displacement, so blocks are materialized densely when small enough and Q is
/// otherwise applied by Krylov.
struct Dressing {
  SparseOperator generator;
  std::vector<Eigen::MatrixXcd> blocks;
  Index fock_dim = 0;
  KrylovOptions krylov;

  bool materialized() const { return !blocks.empty(); }
  StateVector apply(const StateVector& psi) const;
  StateVector apply_adjoint(const StateVector& psi) const;
};

Dressing build_dressing(const Model& model, const KrylovOptions& krylov = {},
                        Index max_entries = 4'000'000);

/// Dressed Hamiltonian split into its five summands.
struct DressedHamiltonian {
  SparseOperator free;
  SparseOperator low_interaction;
  SparseOperator first;
  SparseOperator second;
  SparseOperator pair;

  SparseOperator total() const;
};

DressedHamiltonian dressed_hamiltonian(const Model& model);

/// |sum_j k_j w_j g0_j^2 chi_j|; the dressing identity is exact on the discrete
/// grid only when this vanishes.
double dressed_band_asymmetry(const Model& model);

/// Anti-Hermitian a*(alpha) - a(conj alpha) on the Fock factor.
SparseOperator weyl_generator(const FockBasis& basis, const ModeGrid& grid, const ModeVector& alpha);

/// Dense Weyl operator C(alpha) on the Fock factor.
Eigen::MatrixXcd weyl(const FockBasis& basis, const ModeGrid& grid, const ModeVector& alpha);

/// Relative Hermiticity defect ||A - A^dagger||_F / max(1, ||A||_F).
double hermiticity_defect(const SparseOperator& op);

}  // namespace nelson

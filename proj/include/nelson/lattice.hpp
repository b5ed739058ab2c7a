#pragma once

#include <functional>

#include "nelson/types.hpp"

namespace nelson {

struct ModeGrid;

/// Derivative discretization. `finite_difference` uses the second-difference
/// Laplacian and the central-difference gradient; `spectral` uses the exact
/// plane-wave symbols p^2/2M and i p on the lattice momenta 2 pi n / (L h),
/// with the Nyquist gradient symbol set to zero so the gradient stays real.
enum class Stencil { finite_difference, spectral };

/// p particles of mass M on a periodic d-dimensional lattice of L sites per
/// axis and spacing h. Configurations are indexed with particle 0 most
/// significant and, within a particle, axis 0 most significant.
struct ParticleLattice {
  int dim = 1;
  int sites = 1;
  double spacing = 1.0;
  int particles = 1;
  double mass = 1.0;
  Stencil stencil = Stencil::finite_difference;

  static ParticleLattice create(int dim, int sites, double spacing, int particles, double mass,
                                Stencil stencil = Stencil::finite_difference);

  /// L^d, the configurations of a single particle.
  Index site_count() const;
  /// L^{d p}, the particle factor dimension.
  Index config_count() const;

  /// Site index of `particle` in configuration `config`.
  Index site_of(Index config, int particle) const;
  /// Integer coordinates in [0, L) of a single-particle site.
  Eigen::VectorXi site_coords(Index site) const;
  /// Position h * coords of `particle` in configuration `config`.
  Eigen::VectorXd position(Index config, int particle) const;
};

/// H_01 = -(2M)^{-1} sum over particles and axes of the discrete Laplacian.
SparseOperator kinetic(const ParticleLattice& lat);

/// d/dx along `axis` acting on `particle`.
SparseOperator gradient(const ParticleLattice& lat, int axis, int particle);

enum class Multiplier { sum_over_particles, pair_sum };

/// Diagonal multiplication operator on the particle factor.
///
/// `sum_over_particles` takes one sample per single-particle site (L^d
/// entries) and returns sum_j f(x_j). `pair_sum` takes samples of f on raw
/// coordinate differences x_j - x_l, indexed per axis by n_j - n_l + L - 1 so
/// there are (2L - 1)^d entries, and returns sum_{j<l} f(x_j - x_l).
SparseOperator position_multiplier(const ParticleLattice& lat, const Eigen::VectorXcd& samples,
                                   Multiplier mode);

/// Same operator with f evaluated directly at positions (or differences).
SparseOperator position_multiplier(const ParticleLattice& lat,
                                   const std::function<Complex(const Eigen::VectorXd&)>& f,
                                   Multiplier mode);

/// Diagonal of the sum-over-particles multiplier as a plain vector.
Eigen::VectorXcd position_diagonal(const ParticleLattice& lat,
                                   const std::function<Complex(const Eigen::VectorXd&)>& f,
                                   Multiplier mode);

/// Normalized single-particle plane wave exp(2 pi i n.x / (L h)).
Eigen::VectorXcd plane_wave(const ParticleLattice& lat, const Eigen::VectorXi& n);

/// True when every grid momentum is an integer multiple of 2 pi / (L h)
/// per axis, to `tol` in units of that spacing.
bool commensurate(const ParticleLattice& lat, const ModeGrid& grid, double tol = 1e-9);

}  // namespace nelson

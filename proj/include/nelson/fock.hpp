#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nelson/types.hpp"

namespace nelson {

/// Discretized boson momentum grid.
///
/// Column j of `momenta` is the mode momentum k_j (length `dim`), `weights(j)`
/// the quadrature weight standing in for dk, and `omegas(j)` the dispersion
/// sqrt(|k_j|^2 + mu^2). A continuum function f(k) enters operators through
/// the per-mode coefficients sqrt(w_j) f(k_j), so discrete L^2 norms read
/// sum_j w_j |f(k_j)|^2.
struct ModeGrid {
  int dim = 1;
  Eigen::MatrixXd momenta;
  Eigen::VectorXd weights;
  Eigen::VectorXd omegas;
  double mu = 0.0;

  /// Validates and fills in the dispersion. Throws std::invalid_argument on
  /// nonpositive weights, duplicate modes, or a zero mode with mu == 0.
  static ModeGrid create(Eigen::MatrixXd momenta, Eigen::VectorXd weights, double mu);

  /// Tensor grid with `count` points per axis at spacing `spacing`, centred on
  /// the origin, each point weighted spacing^dim. The zero mode is dropped when
  /// mu == 0.
  static ModeGrid uniform(int dim, int count, double spacing, double mu);

  Index size() const { return momenta.cols(); }
  double momentum_norm(Index j) const { return momenta.col(j).norm(); }
};

/// Sharp momentum cutoff chi_sigma evaluated on a grid: flags(j) is 1 when
/// |k_j| <= sigma and 0 otherwise.
struct CutoffMask {
  double sigma = 0.0;
  Eigen::ArrayXd flags;

  static CutoffMask create(const ModeGrid& grid, double sigma);
};

using Occupation = std::vector<int>;

struct OccupationHash {
  std::size_t operator()(const Occupation& n) const noexcept;
};

/// Truncated bosonic Fock basis: all occupation vectors over `modes` modes with
/// total occupation <= n_max, in graded lexicographic order (by total number,
/// then ascending lexicographic within a sector). State 0 is the vacuum.
class FockBasis {
 public:
  static FockBasis enumerate(int modes, int n_max);

  int modes() const { return modes_; }
  int n_max() const { return n_max_; }
  Index size() const { return static_cast<Index>(states_.size()); }

  const Occupation& state(Index i) const { return states_[static_cast<std::size_t>(i)]; }
  std::optional<Index> rank(const Occupation& n) const;
  int total(Index i) const { return totals_[static_cast<std::size_t>(i)]; }

  /// One past the last index of sector `n` (states with total <= n occupy
  /// [0, sector_end(n))).
  Index sector_end(int n) const;

 private:
  int modes_ = 0;
  int n_max_ = 0;
  std::vector<Occupation> states_;
  std::vector<int> totals_;
  std::vector<Index> sector_ends_;
  std::unordered_map<Occupation, Index, OccupationHash> rank_;
};

enum class Ladder { annihilate, create };

/// a_j or a_j^dagger on the Fock factor. Creation entries that would leave the
/// truncated space are dropped, so the creation matrix is exactly the adjoint
/// of the annihilation matrix.
SparseOperator ladder(const FockBasis& basis, int mode, Ladder kind);

/// Diagonal N = sum_j a_j^dagger a_j.
SparseOperator number_operator(const FockBasis& basis);

/// Field energy H_02 = sum_j omega_j a_j^dagger a_j (diagonal).
SparseOperator boson_energy(const FockBasis& basis, const ModeGrid& grid);

/// Smeared ladder operator for an X-independent function sampled per mode.
///
/// `annihilate` returns a(conj f) = sum_j sqrt(w_j) conj(f_j) a_j and `create`
/// returns a*(f) = sum_j sqrt(w_j) f_j a_j^dagger; the pair are adjoints.
SparseOperator smear(const FockBasis& basis, const ModeGrid& grid, const ModeVector& coeffs,
                     Ladder kind);

/// sum_j w_j omega_j^power |f_j|^2, the discrete ||omega^{power/2} f||_2^2.
double weighted_norm2(const ModeGrid& grid, const ModeVector& f, double omega_power = 0.0);

/// Discrete L^2 scalar product (a, b) = sum_j w_j conj(a_j) b_j.
Complex weighted_inner(const ModeGrid& grid, const ModeVector& a, const ModeVector& b);

}  // namespace nelson

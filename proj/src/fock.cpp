#include "nelson/fock.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace nelson {

ModeGrid ModeGrid::create(Eigen::MatrixXd momenta, Eigen::VectorXd weights, double mu) {
  if (momenta.rows() < 1 || momenta.cols() < 1)
    throw std::invalid_argument("ModeGrid: need at least one mode of dimension >= 1");
  if (weights.size() != momenta.cols())
    throw std::invalid_argument("ModeGrid: weight count " + std::to_string(weights.size()) +
                                " does not match mode count " + std::to_string(momenta.cols()));
  if (!(mu >= 0.0)) throw std::invalid_argument("ModeGrid: boson mass must be >= 0");

  const Index m = momenta.cols();
  for (Index j = 0; j < m; ++j) {
    if (!(weights(j) > 0.0))
      throw std::invalid_argument("ModeGrid: weight of mode " + std::to_string(j) +
                                  " is not positive");
    if (mu == 0.0 && momenta.col(j).isZero(0.0))
      throw std::invalid_argument("ModeGrid: zero mode with mu == 0 makes omega vanish");
    for (Index i = 0; i < j; ++i)
      if (momenta.col(i) == momenta.col(j))
        throw std::invalid_argument("ModeGrid: duplicate modes " + std::to_string(i) + " and " +
                                    std::to_string(j));
  }

  ModeGrid grid;
  grid.dim = static_cast<int>(momenta.rows());
  grid.omegas = (momenta.colwise().squaredNorm().array() + mu * mu).sqrt().matrix().transpose();
  grid.momenta = std::move(momenta);
  grid.weights = std::move(weights);
  grid.mu = mu;
  return grid;
}

ModeGrid ModeGrid::uniform(int dim, int count, double spacing, double mu) {
  if (dim < 1 || count < 1 || !(spacing > 0.0))
    throw std::invalid_argument("ModeGrid::uniform: need dim >= 1, count >= 1, spacing > 0");

  Index total = 1;
  for (int a = 0; a < dim; ++a) total *= count;

  std::vector<Eigen::VectorXd> points;
  points.reserve(static_cast<std::size_t>(total));
  const double centre = 0.5 * (count - 1);
  for (Index flat = 0; flat < total; ++flat) {
    Eigen::VectorXd k(dim);
    Index rest = flat;
    for (int a = 0; a < dim; ++a) {
      k(a) = (static_cast<double>(rest % count) - centre) * spacing;
      rest /= count;
    }
    if (mu == 0.0 && k.isZero(0.0)) continue;
    points.push_back(std::move(k));
  }

  Eigen::MatrixXd momenta(dim, static_cast<Index>(points.size()));
  for (std::size_t j = 0; j < points.size(); ++j) momenta.col(static_cast<Index>(j)) = points[j];
  Eigen::VectorXd weights =
      Eigen::VectorXd::Constant(momenta.cols(), std::pow(spacing, static_cast<double>(dim)));
  return create(std::move(momenta), std::move(weights), mu);
}

CutoffMask CutoffMask::create(const ModeGrid& grid, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("CutoffMask: sigma must be positive");
  CutoffMask mask;
  mask.sigma = sigma;
  mask.flags.resize(grid.size());
  for (Index j = 0; j < grid.size(); ++j)
    mask.flags(j) = grid.momentum_norm(j) <= sigma ? 1.0 : 0.0;
  return mask;
}

std::size_t OccupationHash::operator()(const Occupation& n) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int v : n) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

// Compositions of `total` into the remaining slots, ascending lexicographic.
void compositions(Occupation& current, std::size_t slot, int remaining,
                  std::vector<Occupation>& out) {
  if (slot + 1 == current.size()) {
    current[slot] = remaining;
    out.push_back(current);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    current[slot] = v;
    compositions(current, slot + 1, remaining - v, out);
  }
}

}  // namespace

FockBasis FockBasis::enumerate(int modes, int n_max) {
  if (modes < 1) throw std::invalid_argument("FockBasis: mode count must be >= 1");
  if (n_max < 0) throw std::invalid_argument("FockBasis: occupation cap must be >= 0");

  FockBasis basis;
  basis.modes_ = modes;
  basis.n_max_ = n_max;
  Occupation scratch(static_cast<std::size_t>(modes), 0);
  for (int n = 0; n <= n_max; ++n) {
    compositions(scratch, 0, n, basis.states_);
    basis.sector_ends_.push_back(static_cast<Index>(basis.states_.size()));
  }
  basis.totals_.reserve(basis.states_.size());
  basis.rank_.reserve(basis.states_.size());
  for (std::size_t i = 0; i < basis.states_.size(); ++i) {
    const auto& s = basis.states_[i];
    int total = 0;
    for (int v : s) total += v;
    basis.totals_.push_back(total);
    basis.rank_.emplace(s, static_cast<Index>(i));
  }
  return basis;
}

std::optional<Index> FockBasis::rank(const Occupation& n) const {
  if (auto it = rank_.find(n); it != rank_.end()) return it->second;
  return std::nullopt;
}

Index FockBasis::sector_end(int n) const {
  if (n < 0) return 0;
  if (n >= n_max_) return size();
  return sector_ends_[static_cast<std::size_t>(n)];
}

SparseOperator ladder(const FockBasis& basis, int mode, Ladder kind) {
  if (mode < 0 || mode >= basis.modes())
    throw std::out_of_range("ladder: mode index " + std::to_string(mode) + " out of range [0, " +
                            std::to_string(basis.modes()) + ")");

  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(basis.size()));
  Occupation lowered;
  for (Index i = 0; i < basis.size(); ++i) {
    const auto& n = basis.state(i);
    if (n[static_cast<std::size_t>(mode)] == 0) continue;
    lowered = n;
    --lowered[static_cast<std::size_t>(mode)];
    const Index target = *basis.rank(lowered);
    const double amp = std::sqrt(static_cast<double>(n[static_cast<std::size_t>(mode)]));
    if (kind == Ladder::annihilate)
      entries.emplace_back(target, i, amp);
    else
      entries.emplace_back(i, target, amp);
  }
  SparseOperator op(basis.size(), basis.size());
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

SparseOperator number_operator(const FockBasis& basis) {
  SparseOperator op(basis.size(), basis.size());
  op.reserve(Eigen::VectorXi::Constant(basis.size(), 1));
  for (Index i = 0; i < basis.size(); ++i) op.insert(i, i) = static_cast<double>(basis.total(i));
  op.makeCompressed();
  return op;
}

SparseOperator boson_energy(const FockBasis& basis, const ModeGrid& grid) {
  if (grid.size() != basis.modes())
    throw std::invalid_argument("boson_energy: grid has " + std::to_string(grid.size()) +
                                " modes, basis has " + std::to_string(basis.modes()));
  SparseOperator op(basis.size(), basis.size());
  op.reserve(Eigen::VectorXi::Constant(basis.size(), 1));
  for (Index i = 0; i < basis.size(); ++i) {
    const auto& n = basis.state(i);
    double e = 0.0;
    for (Index j = 0; j < grid.size(); ++j) e += n[static_cast<std::size_t>(j)] * grid.omegas(j);
    op.insert(i, i) = e;
  }
  op.makeCompressed();
  return op;
}

SparseOperator smear(const FockBasis& basis, const ModeGrid& grid, const ModeVector& coeffs,
                     Ladder kind) {
  if (coeffs.size() != grid.size() || grid.size() != basis.modes())
    throw std::invalid_argument("smear: coefficient count " + std::to_string(coeffs.size()) +
                                " does not match mode count " + std::to_string(basis.modes()));
  SparseOperator op(basis.size(), basis.size());
  for (int j = 0; j < basis.modes(); ++j) {
    const Complex c = std::sqrt(grid.weights(j)) *
                      (kind == Ladder::annihilate ? std::conj(coeffs(j)) : coeffs(j));
    if (c == Complex{}) continue;
    op += c * ladder(basis, j, kind);
  }
  return op;
}

double weighted_norm2(const ModeGrid& grid, const ModeVector& f, double omega_power) {
  return (grid.weights.array() * grid.omegas.array().pow(omega_power) * f.array().abs2()).sum();
}

Complex weighted_inner(const ModeGrid& grid, const ModeVector& a, const ModeVector& b) {
  return (grid.weights.array().cast<Complex>() * a.array().conjugate() * b.array()).sum();
}

}  // namespace nelson

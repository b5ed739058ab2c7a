#include "nelson/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nelson {

namespace {

double dispersion_denominator(const ModelParams& params, Index j) {
  return params.grid.omegas(j) + params.grid.momenta.col(j).squaredNorm() / (2.0 * params.lattice.mass);
}

double norm_constant(const ModelParams& params) {
  return std::pow(2.0 * kPi, -0.5 * params.grid.dim);
}

// Builds sum_j coef(c, j) L_j on each particle block, L_j = a_j or a_j^dagger.
template <typename Coef>
SparseOperator block_field(const Model& model, Ladder kind, Coef&& coef) {
  const Index d = model.space.fock_dim();
  const Index p = model.space.particle_dim();
  const int m = model.space.basis.modes();
  Index per_block = 0;
  for (const auto& a : model.lowering) per_block += a.nonZeros();

  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(p * per_block));
  for (Index c = 0; c < p; ++c) {
    const Index offset = c * d;
    for (int j = 0; j < m; ++j) {
      const Complex k = coef(c, j);
      if (k == Complex{}) continue;
      const auto& a = model.lowering[static_cast<std::size_t>(j)];
      for (Index r = 0; r < a.outerSize(); ++r)
        for (SparseOperator::InnerIterator it(a, r); it; ++it) {
          if (kind == Ladder::annihilate)
            entries.emplace_back(offset + it.row(), offset + it.col(), k * it.value());
          else
            entries.emplace_back(offset + it.col(), offset + it.row(), k * std::conj(it.value()));
        }
    }
  }
  SparseOperator op(model.space.dim(), model.space.dim());
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

// Per-mode phase e^{-ik.x} of `particle` in configuration c.
Complex phase(const Model& model, Index c, int particle, Index j) {
  const Eigen::VectorXd x = model.params.lattice.position(c, particle);
  return std::polar(1.0, -model.params.grid.momenta.col(j).dot(x));
}

ModeVector masked(const ModeVector& v, const CutoffMask& mask) {
  return (v.array() * mask.flags.cast<Complex>()).matrix();
}

}  // namespace

void ModelParams::validate() const {
  if (!(sigma0 > 0.0) || !(sigma0 < sigma))
    throw std::invalid_argument("ModelParams: need 0 < sigma0 < sigma");
  if (!(coupling >= 0.0)) throw std::invalid_argument("ModelParams: coupling must be >= 0");
  if (n_max < 0) throw std::invalid_argument("ModelParams: n_max must be >= 0");
  if (grid.dim != lattice.dim)
    throw std::invalid_argument("ModelParams: grid dimension " + std::to_string(grid.dim) +
                                " differs from lattice dimension " + std::to_string(lattice.dim));
}

CouplingProfile coupling_profile(const ModelParams& params, Profile kind) {
  const ModeGrid& grid = params.grid;
  const CutoffMask low = CutoffMask::create(grid, params.sigma0);
  CouplingProfile profile{kind, ModeVector(grid.size())};
  for (Index j = 0; j < grid.size(); ++j) {
    const double f0 = params.coupling * norm_constant(params) / std::sqrt(2.0 * grid.omegas(j));
    profile.base(j) = kind == Profile::interaction
                          ? f0
                          : -(1.0 - low.flags(j)) * f0 / dispersion_denominator(params, j);
  }
  return profile;
}

Model Model::build(ModelParams params) {
  params.validate();
  Model model{params,
              CompositeSpace{params.lattice,
                             FockBasis::enumerate(static_cast<int>(params.grid.size()), params.n_max)},
              CutoffMask::create(params.grid, params.sigma),
              CutoffMask::create(params.grid, params.sigma0),
              {}};
  for (int j = 0; j < model.space.basis.modes(); ++j)
    model.lowering.push_back(ladder(model.space.basis, j, Ladder::annihilate));
  return model;
}

SparseOperator position_smear(const Model& model, const ModeVector& base, int particle,
                              Ladder kind) {
  const ModeGrid& grid = model.params.grid;
  if (base.size() != grid.size())
    throw std::invalid_argument("position_smear: coefficient count does not match mode count");
  if (particle < 0 || particle >= model.params.lattice.particles)
    throw std::out_of_range("position_smear: particle index out of range");
  const Eigen::VectorXd root_w = grid.weights.cwiseSqrt();
  return block_field(model, kind, [&](Index c, int j) {
    if (base(j) == Complex{}) return Complex{};
    const Complex f = root_w(j) * base(j) * phase(model, c, particle, j);
    return kind == Ladder::annihilate ? std::conj(f) : f;
  });
}

SparseOperator free_hamiltonian(const Model& model) {
  return SparseOperator(on_particles(model.space, kinetic(model.params.lattice)) +
                        on_fock(model.space, boson_energy(model.space.basis, model.params.grid)));
}

SparseOperator interaction(const Model& model, const CutoffMask& mask) {
  const ModeVector f = masked(coupling_profile(model.params, Profile::interaction).base, mask);
  SparseOperator total(model.space.dim(), model.space.dim());
  for (int l = 0; l < model.params.lattice.particles; ++l)
    total += position_smear(model, f, l, Ladder::annihilate) +
             position_smear(model, f, l, Ladder::create);
  return total;
}

SparseOperator hamiltonian(const Model& model) {
  return SparseOperator(free_hamiltonian(model) + interaction(model, model.mask));
}

double self_energy(const ModelParams& params, const CutoffMask& mask) {
  const ModeGrid& grid = params.grid;
  double sum = 0.0;
  for (Index j = 0; j < grid.size(); ++j)
    sum += grid.weights(j) * mask.flags(j) /
           (2.0 * grid.omegas(j) * dispersion_denominator(params, j));
  const double c = norm_constant(params);
  return -(params.coupling * params.coupling) * (c * c * sum);
}

double pair_potential(const ModelParams& params, const Eigen::VectorXd& x) {
  const ModeGrid& grid = params.grid;
  if (x.size() != grid.dim) throw std::invalid_argument("pair_potential: wrong coordinate length");
  const CutoffMask hi = CutoffMask::create(grid, params.sigma);
  const CutoffMask lo = CutoffMask::create(grid, params.sigma0);
  const double m = params.lattice.mass;
  double sum = 0.0;
  for (Index j = 0; j < grid.size(); ++j) {
    const double band = hi.flags(j) - lo.flags(j);
    if (band == 0.0) continue;
    const double den = dispersion_denominator(params, j);
    const double k2 = grid.momenta.col(j).squaredNorm();
    sum += grid.weights(j) * band * (grid.omegas(j) + k2 / m) *
           std::cos(grid.momenta.col(j).dot(x)) / (2.0 * grid.omegas(j) * den * den);
  }
  const double c = norm_constant(params);
  return -2.0 * (params.coupling * params.coupling) * (c * c * sum);
}

StateVector Dressing::apply(const StateVector& psi) const {
  if (!materialized()) return expm_apply(generator, psi, Complex(-1.0), krylov);
  StateVector out(psi.size());
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    const Index off = static_cast<Index>(c) * fock_dim;
    out.segment(off, fock_dim).noalias() = blocks[c] * psi.segment(off, fock_dim);
  }
  return out;
}

StateVector Dressing::apply_adjoint(const StateVector& psi) const {
  if (!materialized()) return expm_apply(generator, psi, Complex(1.0), krylov);
  StateVector out(psi.size());
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    const Index off = static_cast<Index>(c) * fock_dim;
    out.segment(off, fock_dim).noalias() = blocks[c].adjoint() * psi.segment(off, fock_dim);
  }
  return out;
}

Dressing build_dressing(const Model& model, const KrylovOptions& krylov, Index max_entries) {
  const ModeVector g = masked(coupling_profile(model.params, Profile::dressing).base, model.mask);
  Dressing dressing;
  dressing.fock_dim = model.space.fock_dim();
  dressing.krylov = krylov;
  dressing.generator = SparseOperator(model.space.dim(), model.space.dim());
  for (int l = 0; l < model.params.lattice.particles; ++l)
    dressing.generator += position_smear(model, g, l, Ladder::annihilate) -
                          position_smear(model, g, l, Ladder::create);

  const Index p = model.space.particle_dim();
  const Index d = model.space.fock_dim();
  if (p * d * d > max_entries) return dressing;
  dressing.blocks.reserve(static_cast<std::size_t>(p));
  for (Index c = 0; c < p; ++c) {
    ModeVector local = ModeVector::Zero(g.size());
    for (int l = 0; l < model.params.lattice.particles; ++l)
      for (Index j = 0; j < g.size(); ++j) local(j) += g(j) * phase(model, c, l, j);
    dressing.blocks.push_back(weyl(model.space.basis, model.params.grid, local));
  }
  return dressing;
}

SparseOperator DressedHamiltonian::total() const {
  return SparseOperator(free + low_interaction + first + second + pair);
}

DressedHamiltonian dressed_hamiltonian(const Model& model) {
  const ModelParams& params = model.params;
  const ParticleLattice& lat = params.lattice;
  const ModeVector g = masked(coupling_profile(params, Profile::dressing).base, model.mask);
  const Index n = model.space.dim();
  const Complex first_scale(0.0, 1.0 / lat.mass);
  const double second_scale = 1.0 / (2.0 * lat.mass);

  DressedHamiltonian h;
  h.free = free_hamiltonian(model);
  h.low_interaction = interaction(model, model.mask0);
  h.first = SparseOperator(n, n);
  h.second = SparseOperator(n, n);
  for (int l = 0; l < lat.particles; ++l)
    for (int axis = 0; axis < lat.dim; ++axis) {
      const ModeVector kg =
          (params.grid.momenta.row(axis).transpose().cast<Complex>().array() * g.array()).matrix();
      const SparseOperator a = position_smear(model, kg, l, Ladder::annihilate);
      const SparseOperator b = position_smear(model, kg, l, Ladder::create);
      const SparseOperator grad = on_particles(model.space, gradient(lat, axis, l));
      h.first += first_scale * SparseOperator(grad * a + b * grad);
      h.second += second_scale * SparseOperator(a * a + b * b + 2.0 * (b * a));
    }
  const auto q = [&params](const Eigen::VectorXd& x) { return Complex(pair_potential(params, x)); };
  h.pair = lat.particles > 1
               ? on_particles(model.space, position_multiplier(lat, q, Multiplier::pair_sum))
               : SparseOperator(n, n);
  return h;
}

double dressed_band_asymmetry(const Model& model) {
  const ModeVector g = masked(coupling_profile(model.params, Profile::dressing).base, model.mask);
  const ModeGrid& grid = model.params.grid;
  Eigen::VectorXd kappa = Eigen::VectorXd::Zero(grid.dim);
  for (Index j = 0; j < grid.size(); ++j)
    kappa += grid.momenta.col(j) * (grid.weights(j) * std::norm(g(j)));
  return kappa.norm();
}

SparseOperator weyl_generator(const FockBasis& basis, const ModeGrid& grid, const ModeVector& alpha) {
  return SparseOperator(smear(basis, grid, alpha, Ladder::create) -
                        smear(basis, grid, alpha, Ladder::annihilate));
}

Eigen::MatrixXcd weyl(const FockBasis& basis, const ModeGrid& grid, const ModeVector& alpha) {
  return expm_dense(Eigen::MatrixXcd(weyl_generator(basis, grid, alpha)));
}

double hermiticity_defect(const SparseOperator& op) {
  const SparseOperator adj = op.adjoint();
  return SparseOperator(op - adj).norm() / std::max(1.0, op.norm());
}

}  // namespace nelson

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "nelson/model.hpp"

using namespace nelson;

namespace {

ModeGrid grid_of(std::initializer_list<double> ks, double mu = 1.0) {
  Eigen::MatrixXd k(1, static_cast<Index>(ks.size()));
  Index j = 0;
  for (double v : ks) k(0, j++) = v;
  return ModeGrid::create(k, Eigen::VectorXd::Ones(k.cols()), mu);
}

ModelParams small_params(double coupling, Stencil stencil = Stencil::finite_difference, int particles = 1) {
  ModelParams p;
  p.lattice = ParticleLattice::create(1, 8, kPi / 4, particles, 1.0, stencil);
  p.grid = grid_of({-2.0, -1.0, 1.0, 2.0});
  p.coupling = coupling;
  p.sigma = 3.0;
  p.sigma0 = 1.5;
  p.n_max = 3;
  return p;
}

}  // namespace

TEST_CASE("parameter validation") {
  ModelParams p = small_params(0.1);
  CHECK_NOTHROW(p.validate());
  p.sigma0 = 3.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params(-0.1);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params(0.1);
  p.n_max = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params(0.1);
  p.lattice = ParticleLattice::create(2, 3, 1.0, 1, 1.0);
  CHECK_THROWS_AS(Model::build(p), std::invalid_argument);
}

TEST_CASE("coupling profiles") {
  ModelParams p;
  p.lattice = ParticleLattice::create(1, 4, 1.0, 1, 1.0);
  p.grid = grid_of({2.0});
  p.coupling = 0.1;
  p.sigma = 3.0;
  p.sigma0 = 1.0;
  const CouplingProfile g = coupling_profile(p, Profile::dressing);
  CHECK(g.base(0).real() == doctest::Approx(-0.0044533788901675599252).epsilon(1e-14));
  CHECK(g.base(0).imag() == 0.0);
  const CouplingProfile f = coupling_profile(p, Profile::interaction);
  CHECK(f.base(0).real() == doctest::Approx(0.1 / std::sqrt(2.0 * kPi) / std::sqrt(2.0 * std::sqrt(5.0))).epsilon(1e-15));
  // inside the low band the dressing amplitude vanishes
  p.sigma0 = 2.5;
  CHECK(coupling_profile(p, Profile::dressing).base(0) == Complex(0.0));
}

TEST_CASE("interaction operator") {
  const Model zero = Model::build(small_params(0.0));
  CHECK(interaction(zero, zero.mask).norm() == 0.0);
  CHECK(SparseOperator(hamiltonian(zero) - free_hamiltonian(zero)).norm() == 0.0);

  const Model model = Model::build(small_params(0.3, Stencil::finite_difference, 2));
  const SparseOperator hi = interaction(model, model.mask);
  CHECK(hermiticity_defect(hi) <= 1e-15);
  CHECK(hermiticity_defect(hamiltonian(model)) <= 1e-15);
  CHECK(hermiticity_defect(free_hamiltonian(model)) == 0.0);

  // <vac, x| H_I^2 |vac, x> = p^2 ||f chi||^2 summed coherently; for one particle it is ||f||^2
  const Model one = Model::build(small_params(0.3));
  const SparseOperator h1 = interaction(one, one.mask);
  const StateVector psi = product_state(Eigen::VectorXcd::Unit(8, 3), fock_state(one.space.basis, {0, 0, 0, 0}));
  const double expected = weighted_norm2(one.params.grid, coupling_profile(one.params, Profile::interaction).base);
  CHECK(StateVector(h1 * psi).squaredNorm() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("ground state energy matches second-order perturbation theory") {
  // spectral stencil with lattice momenta 1 so recoil energies are exactly k^2/2M
  const ModelParams p = small_params(0.02, Stencil::spectral);
  const Model model = Model::build(p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(hamiltonian(model)));
  const double e = self_energy(p, model.mask);
  CHECK(std::abs(solver.eigenvalues()(0) - e) <= 1e-3 * std::abs(e));
}

TEST_CASE("self energy") {
  ModelParams p = small_params(1.0);
  p.sigma = 3.0;
  const CutoffMask all = CutoffMask::create(p.grid, p.sigma);
  CHECK(self_energy(p, all) == doctest::Approx(-0.075593962026789184886).epsilon(1e-14));
  const CutoffMask inner = CutoffMask::create(p.grid, 1.5);
  CHECK(self_energy(p, inner) == doctest::Approx(2.0 * -0.029395763809164630406).epsilon(1e-14));
  CHECK(self_energy(p, CutoffMask::create(p.grid, 0.5)) == 0.0);

  const double base = self_energy(p, all);
  p.coupling = 2.0;
  CHECK(self_energy(p, all) == 4.0 * base);
  p.coupling = 0.0;
  CHECK(self_energy(p, all) == 0.0);

  p.coupling = 0.7;
  double previous = 0.0;
  for (double sigma : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const double e = self_energy(p, CutoffMask::create(p.grid, sigma));
    CHECK(e <= 0.0);
    CHECK(std::abs(e) >= std::abs(previous));
    previous = e;
  }
}

TEST_CASE("pair potential") {
  ModelParams p = small_params(0.4);
  for (double x : {0.0, 0.3, 1.7, 5.0}) {
    const double plus = pair_potential(p, Eigen::VectorXd::Constant(1, x));
    const double minus = pair_potential(p, Eigen::VectorXd::Constant(1, -x));
    CHECK(plus == doctest::Approx(minus).epsilon(1e-15));
  }
  CHECK(pair_potential(p, Eigen::VectorXd::Zero(1)) < 0.0);
  // with sigma0 just below sigma no grid mode lies in the dressed band
  p.sigma = 1.5;
  p.sigma0 = 1.2;
  CHECK(pair_potential(p, Eigen::VectorXd::Constant(1, 0.8)) == 0.0);
  CHECK_THROWS_AS(pair_potential(p, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("dressing transformation") {
  const Model zero = Model::build(small_params(0.0));
  const Dressing id = build_dressing(zero);
  REQUIRE(id.materialized());
  const StateVector psi = StateVector::Random(zero.space.dim());
  CHECK((id.apply(psi) - psi).norm() == 0.0);

  ModelParams p = small_params(0.5);
  p.n_max = 6;
  const Model model = Model::build(p);
  const Dressing q = build_dressing(model);
  const Dressing lazy = build_dressing(model, {}, 0);
  REQUIRE(q.materialized());
  REQUIRE_FALSE(lazy.materialized());
  const StateVector v = StateVector::Random(model.space.dim()).normalized();
  CHECK(q.apply(v).norm() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK((q.apply_adjoint(q.apply(v)) - v).norm() <= 1e-13);
  CHECK((lazy.apply(v) - q.apply(v)).norm() <= 1e-10);
  CHECK((lazy.apply_adjoint(v) - q.apply_adjoint(v)).norm() <= 1e-10);

  // Q |vac, x> is coherent with amplitude sqrt(w) g0 chi e^{-ikx}
  const Index site = 5;
  const double x = p.lattice.spacing * site;
  const StateVector dressed = q.apply(product_state(Eigen::VectorXcd::Unit(8, site), fock_state(model.space.basis, {0, 0, 0, 0})));
  const ModeVector g = coupling_profile(p, Profile::dressing).base;
  const Eigen::VectorXcd local = dressed.segment(site * model.space.fock_dim(), model.space.fock_dim());
  for (int j = 0; j < 4; ++j) {
    const Complex mean = local.dot(Eigen::VectorXcd(model.lowering[static_cast<std::size_t>(j)] * local));
    const Complex expected = std::sqrt(p.grid.weights(j)) * g(j) * model.mask.flags(j) *
                             std::polar(1.0, -p.grid.momenta(0, j) * x);
    CHECK(std::abs(mean - expected) <= 1e-10);
  }
}

TEST_CASE("dressed hamiltonian terms") {
  const Model zero = Model::build(small_params(0.0, Stencil::spectral, 2));
  const DressedHamiltonian h0 = dressed_hamiltonian(zero);
  CHECK(h0.first.norm() == 0.0);
  CHECK(h0.second.norm() == 0.0);
  CHECK(h0.pair.norm() == 0.0);
  CHECK(h0.low_interaction.norm() == 0.0);

  const Model model = Model::build(small_params(0.4, Stencil::spectral, 2));
  const DressedHamiltonian h = dressed_hamiltonian(model);
  for (const SparseOperator* term : {&h.free, &h.low_interaction, &h.first, &h.second, &h.pair})
    CHECK(hermiticity_defect(*term) <= 1e-14);
  CHECK(h.first.norm() > 0.0);
  CHECK(h.pair.norm() > 0.0);
  CHECK(dressed_band_asymmetry(model) <= 1e-15);

  ModelParams skew = small_params(0.4);
  skew.grid = grid_of({-1.0, 1.0, 2.0});
  CHECK(dressed_band_asymmetry(Model::build(skew)) > 0.0);
}

TEST_CASE("weyl operators") {
  const ModeGrid grid = ModeGrid::create((Eigen::MatrixXd(1, 2) << -0.5, 1.0).finished(),
                                         Eigen::Vector2d(0.5, 1.0), 1.0);
  const FockBasis basis = FockBasis::enumerate(2, 14);
  const Index n = basis.size();
  CHECK((weyl(basis, grid, ModeVector::Zero(2)) - Eigen::MatrixXcd::Identity(n, n)).norm() == 0.0);

  ModeVector alpha(2), beta(2);
  alpha << Complex(0.4, 0.2), Complex(-0.1, 0.3);
  beta << Complex(-0.2, 0.1), Complex(0.3, 0.0);
  const Eigen::MatrixXcd ca = weyl(basis, grid, alpha);
  CHECK((ca.adjoint() * ca - Eigen::MatrixXcd::Identity(n, n)).norm() <= 1e-12);

  const Eigen::VectorXcd vac = Eigen::VectorXcd::Unit(n, 0);
  const Eigen::VectorXcd coherent = ca * vac;
  const Eigen::MatrixXcd number = Eigen::MatrixXcd(number_operator(basis));
  CHECK(coherent.dot(number * coherent).real() == doctest::Approx(weighted_norm2(grid, alpha)).epsilon(1e-9));
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXcd lowered = Eigen::MatrixXcd(ladder(basis, j, Ladder::annihilate)) * coherent;
    // a_j C(alpha) vac = sqrt(w_j) alpha_j C(alpha) vac up to truncation
    CHECK((lowered - std::sqrt(grid.weights(j)) * alpha(j) * coherent).norm() <= 1e-6);
  }

  const Eigen::MatrixXcd cb = weyl(basis, grid, beta);
  const Eigen::MatrixXcd cab = weyl(basis, grid, alpha + beta);
  const Complex phase = std::polar(1.0, -weighted_inner(grid, alpha, beta).imag());
  CHECK((ca * (cb * vac) - phase * (cab * vac)).norm() <= 1e-8);
  CHECK(hermiticity_defect(SparseOperator(Complex(0, 1) * weyl_generator(basis, grid, alpha))) <= 1e-15);
}

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "nelson/fock.hpp"

using namespace nelson;

namespace {

ModeGrid desk_grid() {
  Eigen::MatrixXd k(1, 4);
  k << -1.5, -0.5, 0.5, 1.5;
  return ModeGrid::create(k, Eigen::VectorXd::Ones(4), 1.0);
}

Eigen::VectorXcd basis_vector(const FockBasis& b, const Occupation& n) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(b.size());
  v(*b.rank(n)) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("mode grid validation") {
  Eigen::MatrixXd k(1, 2);
  k << 0.0, 1.0;
  CHECK_THROWS_AS(ModeGrid::create(k, Eigen::VectorXd::Ones(2), 0.0), std::invalid_argument);
  CHECK_NOTHROW(ModeGrid::create(k, Eigen::VectorXd::Ones(2), 0.5));
  CHECK_THROWS_AS(ModeGrid::create(k, Eigen::VectorXd::Constant(2, -1.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ModeGrid::create(k, Eigen::VectorXd::Ones(3), 1.0), std::invalid_argument);
  Eigen::MatrixXd dup(1, 2);
  dup << 1.0, 1.0;
  CHECK_THROWS_AS(ModeGrid::create(dup, Eigen::VectorXd::Ones(2), 1.0), std::invalid_argument);

  const ModeGrid g = desk_grid();
  for (Index j = 0; j < g.size(); ++j)
    CHECK(g.omegas(j) == doctest::Approx(std::sqrt(g.momenta(0, j) * g.momenta(0, j) + 1.0)).epsilon(1e-15));

  const ModeGrid u = ModeGrid::uniform(2, 3, 0.5, 0.0);
  CHECK(u.size() == 8);
  CHECK(u.weights(0) == doctest::Approx(0.25));
}

TEST_CASE("cutoff mask flags") {
  const CutoffMask mask = CutoffMask::create(desk_grid(), 1.0);
  CHECK(mask.flags(0) == 0.0);
  CHECK(mask.flags(1) == 1.0);
  CHECK(mask.flags(2) == 1.0);
  CHECK(mask.flags(3) == 0.0);
  CHECK_THROWS_AS(CutoffMask::create(desk_grid(), 0.0), std::invalid_argument);
}

TEST_CASE("fock basis dimensions and order") {
  CHECK(FockBasis::enumerate(1, 0).size() == 1);
  CHECK(FockBasis::enumerate(2, 2).size() == 6);
  CHECK_THROWS_AS(FockBasis::enumerate(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(FockBasis::enumerate(2, -1), std::invalid_argument);

  const FockBasis b = FockBasis::enumerate(4, 6);
  REQUIRE(b.size() == 210);
  // brute force over the cube [0, 6]^4
  std::set<Occupation> expected;
  for (int a = 0; a <= 6; ++a)
    for (int c = 0; c <= 6; ++c)
      for (int d = 0; d <= 6; ++d)
        for (int e = 0; e <= 6; ++e)
          if (a + c + d + e <= 6) expected.insert({a, c, d, e});
  std::set<Occupation> got;
  for (Index i = 0; i < b.size(); ++i) got.insert(b.state(i));
  CHECK(got == expected);

  CHECK(b.state(0) == Occupation{0, 0, 0, 0});
  for (Index i = 0; i < b.size(); ++i) CHECK(*b.rank(b.state(i)) == i);
  for (Index i = 1; i < b.size(); ++i) {
    const bool graded = b.total(i - 1) < b.total(i) ||
                        (b.total(i - 1) == b.total(i) && b.state(i - 1) < b.state(i));
    CHECK(graded);
  }
  CHECK(b.sector_end(0) == 1);
  CHECK(b.sector_end(1) == 5);
  CHECK(b.sector_end(6) == 210);
  CHECK_FALSE(b.rank({7, 0, 0, 0}).has_value());
}

TEST_CASE("ladder operators") {
  const FockBasis b = FockBasis::enumerate(3, 4);
  const Eigen::VectorXcd vac = basis_vector(b, {0, 0, 0});
  for (int j = 0; j < 3; ++j) {
    const SparseOperator a = ladder(b, j, Ladder::annihilate);
    const SparseOperator ad = ladder(b, j, Ladder::create);
    CHECK(Eigen::VectorXcd(a * vac).norm() == 0.0);
    Occupation one{0, 0, 0};
    one[static_cast<std::size_t>(j)] = 1;
    CHECK((Eigen::VectorXcd(ad * vac) - basis_vector(b, one)).norm() == 0.0);
    CHECK(SparseOperator(ad - SparseOperator(a.adjoint())).norm() == 0.0);
  }
  CHECK_THROWS_AS(ladder(b, 3, Ladder::annihilate), std::out_of_range);
  CHECK_THROWS_AS(ladder(b, -1, Ladder::create), std::out_of_range);

  const FockBasis single = FockBasis::enumerate(1, 3);
  const Eigen::MatrixXcd a = Eigen::MatrixXcd(ladder(single, 0, Ladder::annihilate));
  const Eigen::MatrixXcd ad = Eigen::MatrixXcd(ladder(single, 0, Ladder::create));
  for (int n = 1; n <= 3; ++n) {
    CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt(n)).epsilon(1e-15));
    CHECK(ad(n, n - 1).real() == doctest::Approx(std::sqrt(n)).epsilon(1e-15));
  }
  CHECK(a.cwiseAbs().sum() == doctest::Approx(std::sqrt(1.0) + std::sqrt(2.0) + std::sqrt(3.0)));
}

TEST_CASE("truncated commutation relations") {
  const FockBasis b = FockBasis::enumerate(3, 5);
  const Index inner = b.sector_end(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const SparseOperator a = ladder(b, i, Ladder::annihilate);
      const SparseOperator ad = ladder(b, j, Ladder::create);
      Eigen::MatrixXcd comm = Eigen::MatrixXcd(a * ad - ad * a);
      if (i == j) comm -= Eigen::MatrixXcd::Identity(b.size(), b.size());
      CHECK(comm.leftCols(inner).cwiseAbs().maxCoeff() <= 1e-14);
      if (i != j) {
        // On the top sector a_j^dagger drops the state, leaving -a_j^dagger a_i.
        const Eigen::MatrixXcd top = comm.rightCols(b.size() - inner);
        const Eigen::MatrixXcd expected = -Eigen::MatrixXcd(ad * a).rightCols(b.size() - inner);
        CHECK((top - expected).cwiseAbs().maxCoeff() <= 1e-14);
      }
    }
}

TEST_CASE("number and field energy operators") {
  const ModeGrid g = desk_grid();
  const FockBasis b = FockBasis::enumerate(4, 3);
  const SparseOperator n = number_operator(b);
  const SparseOperator h = boson_energy(b, g);
  for (int j = 0; j < 4; ++j) {
    const Eigen::MatrixXcd nj = Eigen::MatrixXcd(ladder(b, j, Ladder::create) * ladder(b, j, Ladder::annihilate));
    for (Index s = 0; s < b.size(); ++s) {
      CHECK(std::abs(nj(s, s) - double(b.state(s)[static_cast<std::size_t>(j)])) <= 1e-14);
      CHECK(nj.col(s).cwiseAbs().sum() == doctest::Approx(std::abs(nj(s, s))));
    }
  }
  CHECK(Eigen::MatrixXcd(h)(0, 0) == Complex(0.0));
  CHECK(Eigen::MatrixXcd(h)(*b.rank({2, 0, 0, 0}), *b.rank({2, 0, 0, 0})).real() ==
        doctest::Approx(2.0 * g.omegas(0)));
  for (Index s = 0; s < b.size(); ++s) {
    double e = 0.0;
    for (int j = 0; j < 4; ++j) e += b.state(s)[static_cast<std::size_t>(j)] * g.omegas(j);
    CHECK(Eigen::MatrixXcd(h)(s, s).real() == doctest::Approx(e).epsilon(1e-15));
    CHECK(Eigen::MatrixXcd(n)(s, s).real() == b.total(s));
  }
  CHECK_THROWS_AS(boson_energy(FockBasis::enumerate(3, 2), g), std::invalid_argument);
}

TEST_CASE("smeared operators") {
  Eigen::MatrixXd k(1, 3);
  k << -1.0, 0.5, 2.0;
  const ModeGrid g = ModeGrid::create(k, Eigen::Vector3d(0.5, 1.0, 2.0), 1.0);
  const FockBasis b = FockBasis::enumerate(3, 4);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  const auto random_modes = [&] {
    ModeVector f(3);
    for (auto& c : f) c = Complex(gauss(rng), gauss(rng));
    return f;
  };

  CHECK(smear(b, g, ModeVector::Zero(3), Ladder::annihilate).norm() == 0.0);
  ModeVector e1 = ModeVector::Zero(3);
  e1(1) = 1.0;
  CHECK(SparseOperator(smear(b, g, e1, Ladder::annihilate) - std::sqrt(g.weights(1)) * ladder(b, 1, Ladder::annihilate)).norm() == 0.0);
  CHECK_THROWS_AS(smear(b, g, ModeVector::Zero(2), Ladder::create), std::invalid_argument);

  const Eigen::VectorXcd vac = Eigen::VectorXcd::Unit(b.size(), 0);
  for (int trial = 0; trial < 10; ++trial) {
    const ModeVector f = random_modes(), h = random_modes();
    const Complex alpha(gauss(rng), gauss(rng)), beta(gauss(rng), gauss(rng));
    const SparseOperator create = smear(b, g, f, Ladder::create);
    const SparseOperator annihilate = smear(b, g, f, Ladder::annihilate);
    CHECK(SparseOperator(create - SparseOperator(annihilate.adjoint())).norm() <= 1e-14);
    CHECK(Eigen::VectorXcd(create * vac).squaredNorm() == doctest::Approx(weighted_norm2(g, f)).epsilon(1e-13));
    // conjugate-linear in f for the annihilating kind
    const SparseOperator lhs = smear(b, g, alpha * f + beta * h, Ladder::annihilate);
    const SparseOperator rhs = std::conj(alpha) * annihilate + std::conj(beta) * smear(b, g, h, Ladder::annihilate);
    CHECK(SparseOperator(lhs - rhs).norm() <= 1e-13 * (1.0 + rhs.norm()));
    // [a(conj f), a*(f)] = ||f||^2 below the top sector
    const Eigen::MatrixXcd comm = Eigen::MatrixXcd(annihilate * create - create * annihilate);
    const Index inner = b.sector_end(3);
    const Eigen::MatrixXcd expected =
        weighted_norm2(g, f) * Eigen::MatrixXcd::Identity(b.size(), b.size()).leftCols(inner);
    CHECK((comm.leftCols(inner) - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("weighted norms and inner products") {
  const ModeGrid g = desk_grid();
  ModeVector f(4);
  f << 1.0, Complex(0, 2), 0.5, Complex(1, -1);
  CHECK(weighted_norm2(g, f) == doctest::Approx(1.0 + 4.0 + 0.25 + 2.0));
  double expected = 0.0;
  for (Index j = 0; j < 4; ++j) expected += std::norm(f(j)) / g.omegas(j);
  CHECK(weighted_norm2(g, f, -1.0) == doctest::Approx(expected));
  CHECK(weighted_inner(g, f, f).real() == doctest::Approx(weighted_norm2(g, f)));
  CHECK(weighted_inner(g, f, f).imag() == 0.0);
}

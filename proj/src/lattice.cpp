#include "nelson/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "nelson/fock.hpp"

namespace nelson {

namespace {

Index ipow(Index base, int exp) {
  Index r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

SparseOperator identity(Index n) {
  SparseOperator id(n, n);
  id.setIdentity();
  return id;
}

// Lattice momenta 2 pi fftfreq(L, h).
Eigen::VectorXd lattice_momenta(int sites, double spacing) {
  Eigen::VectorXd p(sites);
  for (int n = 0; n < sites; ++n) {
    const int folded = n < (sites + 1) / 2 ? n : n - sites;
    p(n) = 2.0 * kPi * folded / (sites * spacing);
  }
  return p;
}

SparseOperator dense_to_sparse(const Eigen::MatrixXd& m) {
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) entries.emplace_back(i, j, m(i, j));
  SparseOperator op(m.rows(), m.cols());
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

SparseOperator kinetic_1d(const ParticleLattice& lat) {
  const int L = lat.sites;
  const double h = lat.spacing;
  if (lat.stencil == Stencil::spectral) {
    const Eigen::VectorXd p = lattice_momenta(L, h);
    Eigen::MatrixXd k(L, L);
    for (int x = 0; x < L; ++x)
      for (int y = 0; y < L; ++y)
        k(x, y) = (p.array().square() * (p.array() * ((x - y) * h)).cos()).sum() /
                  (2.0 * lat.mass * L);
    return dense_to_sparse(k);
  }
  const double c = 1.0 / (2.0 * lat.mass * h * h);
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int x = 0; x < L; ++x) {
    entries.emplace_back(x, x, 2.0 * c);
    entries.emplace_back(x, (x + 1) % L, -c);
    entries.emplace_back(x, (x + L - 1) % L, -c);
  }
  SparseOperator op(L, L);
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

SparseOperator gradient_1d(const ParticleLattice& lat) {
  const int L = lat.sites;
  const double h = lat.spacing;
  if (lat.stencil == Stencil::spectral) {
    Eigen::VectorXd p = lattice_momenta(L, h);
    if (L % 2 == 0) p(L / 2) = 0.0;
    Eigen::MatrixXd g(L, L);
    for (int x = 0; x < L; ++x)
      for (int y = 0; y < L; ++y)
        g(x, y) = x == y ? 0.0 : -(p.array() * (p.array() * ((x - y) * h)).sin()).sum() / L;
    // Exact antisymmetry regardless of summation order.
    const Eigen::MatrixXd anti = 0.5 * (g - g.transpose());
    return dense_to_sparse(anti);
  }
  const double c = 1.0 / (2.0 * h);
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int x = 0; x < L; ++x) {
    entries.emplace_back(x, (x + 1) % L, c);
    entries.emplace_back(x, (x + L - 1) % L, -c);
  }
  SparseOperator op(L, L);
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

// Places a single-coordinate operator at digit `slot` of the d p digit string.
SparseOperator embed_coordinate(const ParticleLattice& lat, const SparseOperator& op, int slot) {
  const int digits = lat.dim * lat.particles;
  const SparseOperator left = identity(ipow(lat.sites, slot));
  const SparseOperator right = identity(ipow(lat.sites, digits - slot - 1));
  SparseOperator inner = Eigen::kroneckerProduct(left, op);
  SparseOperator full = Eigen::kroneckerProduct(inner, right);
  full.makeCompressed();
  return full;
}

SparseOperator diagonal_operator(const Eigen::VectorXcd& diag) {
  SparseOperator op(diag.size(), diag.size());
  op.reserve(Eigen::VectorXi::Constant(diag.size(), 1));
  for (Index i = 0; i < diag.size(); ++i) op.insert(i, i) = diag(i);
  op.makeCompressed();
  return op;
}

}  // namespace

ParticleLattice ParticleLattice::create(int dim, int sites, double spacing, int particles,
                                        double mass, Stencil stencil) {
  if (dim < 1) throw std::invalid_argument("ParticleLattice: dim must be >= 1");
  if (sites < 2) throw std::invalid_argument("ParticleLattice: need at least 2 sites per axis");
  if (!(spacing > 0.0)) throw std::invalid_argument("ParticleLattice: spacing must be positive");
  if (particles < 1) throw std::invalid_argument("ParticleLattice: need at least one particle");
  if (!(mass > 0.0)) throw std::invalid_argument("ParticleLattice: mass must be positive");
  return ParticleLattice{dim, sites, spacing, particles, mass, stencil};
}

Index ParticleLattice::site_count() const { return ipow(sites, dim); }

Index ParticleLattice::config_count() const { return ipow(sites, dim * particles); }

Index ParticleLattice::site_of(Index config, int particle) const {
  const Index s = site_count();
  return (config / ipow(s, particles - 1 - particle)) % s;
}

Eigen::VectorXi ParticleLattice::site_coords(Index site) const {
  Eigen::VectorXi n(dim);
  for (int a = dim - 1; a >= 0; --a) {
    n(a) = static_cast<int>(site % sites);
    site /= sites;
  }
  return n;
}

Eigen::VectorXd ParticleLattice::position(Index config, int particle) const {
  return spacing * site_coords(site_of(config, particle)).cast<double>();
}

SparseOperator kinetic(const ParticleLattice& lat) {
  const SparseOperator k1 = kinetic_1d(lat);
  const Index n = lat.config_count();
  SparseOperator total(n, n);
  for (int slot = 0; slot < lat.dim * lat.particles; ++slot)
    total += embed_coordinate(lat, k1, slot);
  return total;
}

SparseOperator gradient(const ParticleLattice& lat, int axis, int particle) {
  if (axis < 0 || axis >= lat.dim)
    throw std::out_of_range("gradient: axis " + std::to_string(axis) + " out of range");
  if (particle < 0 || particle >= lat.particles)
    throw std::out_of_range("gradient: particle " + std::to_string(particle) + " out of range");
  return embed_coordinate(lat, gradient_1d(lat), particle * lat.dim + axis);
}

SparseOperator position_multiplier(const ParticleLattice& lat, const Eigen::VectorXcd& samples,
                                   Multiplier mode) {
  const Index n = lat.config_count();
  Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(n);
  if (mode == Multiplier::sum_over_particles) {
    if (samples.size() != lat.site_count())
      throw std::invalid_argument("position_multiplier: expected " +
                                  std::to_string(lat.site_count()) + " site samples, got " +
                                  std::to_string(samples.size()));
    for (Index c = 0; c < n; ++c)
      for (int l = 0; l < lat.particles; ++l) diag(c) += samples(lat.site_of(c, l));
    return diagonal_operator(diag);
  }

  const Index span = 2 * lat.sites - 1;
  if (samples.size() != ipow(span, lat.dim))
    throw std::invalid_argument("position_multiplier: expected " +
                                std::to_string(ipow(span, lat.dim)) +
                                " difference samples, got " + std::to_string(samples.size()));
  for (Index c = 0; c < n; ++c)
    for (int j = 0; j < lat.particles; ++j)
      for (int l = j + 1; l < lat.particles; ++l) {
        const Eigen::VectorXi diff =
            lat.site_coords(lat.site_of(c, j)) - lat.site_coords(lat.site_of(c, l));
        Index flat = 0;
        for (int a = 0; a < lat.dim; ++a) flat = flat * span + diff(a) + lat.sites - 1;
        diag(c) += samples(flat);
      }
  return diagonal_operator(diag);
}

Eigen::VectorXcd position_diagonal(const ParticleLattice& lat,
                                   const std::function<Complex(const Eigen::VectorXd&)>& f,
                                   Multiplier mode) {
  const Index n = lat.config_count();
  Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(n);
  if (mode == Multiplier::sum_over_particles) {
    Eigen::VectorXcd per_site(lat.site_count());
    for (Index s = 0; s < lat.site_count(); ++s)
      per_site(s) = f(lat.spacing * lat.site_coords(s).cast<double>());
    for (Index c = 0; c < n; ++c)
      for (int l = 0; l < lat.particles; ++l) diag(c) += per_site(lat.site_of(c, l));
    return diag;
  }
  for (Index c = 0; c < n; ++c)
    for (int j = 0; j < lat.particles; ++j)
      for (int l = j + 1; l < lat.particles; ++l)
        diag(c) += f(lat.position(c, j) - lat.position(c, l));
  return diag;
}

SparseOperator position_multiplier(const ParticleLattice& lat,
                                   const std::function<Complex(const Eigen::VectorXd&)>& f,
                                   Multiplier mode) {
  return diagonal_operator(position_diagonal(lat, f, mode));
}

Eigen::VectorXcd plane_wave(const ParticleLattice& lat, const Eigen::VectorXi& n) {
  if (n.size() != lat.dim) throw std::invalid_argument("plane_wave: wave vector has wrong length");
  const Index s = lat.site_count();
  Eigen::VectorXcd v(s);
  for (Index i = 0; i < s; ++i) {
    const double phase = 2.0 * kPi * n.dot(lat.site_coords(i)) / lat.sites;
    v(i) = std::polar(1.0, phase);
  }
  return v / std::sqrt(static_cast<double>(s));
}

bool commensurate(const ParticleLattice& lat, const ModeGrid& grid, double tol) {
  const double unit = 2.0 * kPi / (lat.sites * lat.spacing);
  for (Index j = 0; j < grid.size(); ++j)
    for (int a = 0; a < grid.dim; ++a) {
      const double q = grid.momenta(a, j) / unit;
      if (std::abs(q - std::round(q)) > tol) return false;
    }
  return true;
}

}  // namespace nelson

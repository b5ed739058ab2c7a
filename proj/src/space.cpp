#include "nelson/space.hpp"

#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace nelson {

namespace {

SparseOperator identity(Index n) {
  SparseOperator id(n, n);
  id.setIdentity();
  return id;
}

void check_square(const SparseOperator& op, Index n, const char* where) {
  if (op.rows() != n || op.cols() != n)
    throw std::invalid_argument(std::string(where) + ": operator is " + std::to_string(op.rows()) +
                                "x" + std::to_string(op.cols()) + ", factor dimension is " +
                                std::to_string(n));
}

}  // namespace

SparseOperator on_particles(const CompositeSpace& space, const SparseOperator& op) {
  check_square(op, space.particle_dim(), "on_particles");
  SparseOperator out = Eigen::kroneckerProduct(op, identity(space.fock_dim()));
  out.makeCompressed();
  return out;
}

SparseOperator on_fock(const CompositeSpace& space, const SparseOperator& op) {
  check_square(op, space.fock_dim(), "on_fock");
  SparseOperator out = Eigen::kroneckerProduct(identity(space.particle_dim()), op);
  out.makeCompressed();
  return out;
}

StateVector product_state(const Eigen::VectorXcd& particle_state,
                          const Eigen::VectorXcd& fock_state) {
  StateVector out(particle_state.size() * fock_state.size());
  for (Index c = 0; c < particle_state.size(); ++c)
    out.segment(c * fock_state.size(), fock_state.size()) = particle_state(c) * fock_state;
  return out;
}

Eigen::VectorXcd fock_state(const FockBasis& basis, const Occupation& n) {
  const auto idx = basis.rank(n);
  if (!idx) throw std::invalid_argument("fock_state: occupation outside the truncated basis");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.size());
  v(*idx) = 1.0;
  return v;
}

StateVector apply_on_fock(const CompositeSpace& space, const Eigen::MatrixXcd& op,
                          const StateVector& psi) {
  const Index p = space.particle_dim();
  const Index d = space.fock_dim();
  if (op.rows() != d || op.cols() != d || psi.size() != space.dim())
    throw std::invalid_argument("apply_on_fock: dimension mismatch");
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> in(psi.data(), p, d);
  StateVector out(psi.size());
  Eigen::Map<RowMajor> res(out.data(), p, d);
  res.noalias() = in * op.transpose();
  return out;
}

Eigen::VectorXcd spread_diagonal(const CompositeSpace& space,
                                 const Eigen::VectorXcd& particle_diag) {
  if (particle_diag.size() != space.particle_dim())
    throw std::invalid_argument("spread_diagonal: particle diagonal has wrong length");
  Eigen::VectorXcd out(space.dim());
  for (Index c = 0; c < particle_diag.size(); ++c)
    out.segment(c * space.fock_dim(), space.fock_dim()).setConstant(particle_diag(c));
  return out;
}

}  // namespace nelson

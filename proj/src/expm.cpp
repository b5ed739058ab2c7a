#include "nelson/expm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace nelson {

Eigen::MatrixXcd expm_dense(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("expm_dense: matrix is not square");
  if (a.size() == 0) return a;
  return a.exp();
}

StateVector expm_apply(const LinearMap& apply, const StateVector& psi, Complex z,
                       const KrylovOptions& opts) {
  if (opts.dim < 1 || !(opts.tol > 0.0))
    throw std::invalid_argument("expm_apply: need Krylov dimension >= 1 and tolerance > 0");
  const double norm0 = psi.norm();
  if (z == Complex{} || norm0 == 0.0) return psi;

  const Index n = psi.size();
  const int m_cap = static_cast<int>(std::min<Index>(opts.dim, n));
  StateVector w = psi;
  std::vector<Eigen::VectorXcd> basis(static_cast<std::size_t>(m_cap) + 1);
  Eigen::VectorXcd scratch(n);

  // Fraction of the unit interval still to cover; the substep is tau in (0, remaining].
  double remaining = 1.0;
  double tau = 1.0;
  int substeps = 0;
  while (remaining > 0.0) {
    const double beta = w.norm();
    if (beta == 0.0) break;

    Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m_cap + 1, m_cap);
    basis[0] = w / beta;
    int m = m_cap;
    bool invariant = false;
    for (int j = 0; j < m_cap; ++j) {
      apply(basis[static_cast<std::size_t>(j)], scratch);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const Complex c = basis[static_cast<std::size_t>(i)].dot(scratch);
          hess(i, j) += c;
          scratch -= c * basis[static_cast<std::size_t>(i)];
        }
      const double next = scratch.norm();
      hess(j + 1, j) = next;
      if (next <= 1e-14 * std::max(1.0, hess.col(j).norm())) {
        m = j + 1;
        invariant = true;
        break;
      }
      basis[static_cast<std::size_t>(j) + 1] = scratch / next;
      // Stop early once the current substep already meets the tolerance.
      const int k = j + 1;
      if (k % 5 == 0 && k < m_cap) {
        const double step = std::min(tau, remaining);
        const Eigen::MatrixXcd e = expm_dense(Complex(step) * z * hess.topLeftCorner(k, k));
        const double est = beta * std::abs(step * z) * next * std::abs(e(k - 1, 0));
        if (est <= opts.tol * norm0 * step) {
          m = k;
          break;
        }
      }
    }

    const Eigen::MatrixXcd hm = hess.topLeftCorner(m, m);
    const double h_next = invariant ? 0.0 : std::abs(hess(m, m - 1));
    tau = invariant ? remaining : std::min(tau, remaining);
    Eigen::VectorXcd coeffs;
    double err = 0.0;
    for (;;) {
      if (++substeps > opts.max_substeps || tau < 1e-15)
        throw ConvergenceError("expm_apply: substep collapsed", err / norm0);
      const Eigen::MatrixXcd e = expm_dense(Complex(tau) * z * hm);
      coeffs = e.col(0);
      err = beta * std::abs(tau * z) * h_next * std::abs(coeffs(m - 1));
      if (invariant || err <= opts.tol * norm0 * tau) break;
      tau *= std::max(0.1, 0.9 * std::pow(opts.tol * norm0 * tau / err, 1.0 / m));
    }

    StateVector next_w = StateVector::Zero(n);
    for (int i = 0; i < m; ++i) next_w += (beta * coeffs(i)) * basis[static_cast<std::size_t>(i)];
    w = std::move(next_w);
    remaining -= tau;
    if (invariant) {
      tau = remaining;
    } else if (err > 0.0) {
      tau *= std::min(2.0, std::max(1.0, 0.9 * std::pow(opts.tol * norm0 * tau / err, 1.0 / m)));
    } else {
      tau *= 2.0;
    }
    if (remaining < 1e-15) remaining = 0.0;
  }
  return w;
}

StateVector expm_apply(const SparseOperator& h, const StateVector& psi, Complex z,
                       const KrylovOptions& opts) {
  if (h.rows() != h.cols() || h.cols() != psi.size())
    throw std::invalid_argument("expm_apply: operator and state dimensions differ");
  const LinearMap apply = [&h](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    y.noalias() = h * x;
  };
  return expm_apply(apply, psi, z, opts);
}

}  // namespace nelson

#pragma once

#include <string>
#include <vector>

#include "nelson/config.hpp"

namespace nelson {

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  /// "exact" for closed-form identities and theorem inequalities, "measured"
  /// for empirical pass bars.
  std::string provenance;
  std::string detail;
};

struct Report {
  std::string experiment;
  std::vector<Check> checks;

  bool passed() const;
  void add(Check c) { checks.push_back(std::move(c)); }
};

/// Band-limited periodic packet prod_a (1 + cos(2 pi (x_a - c_a) / (L h)))^2
/// for one particle centred at `centre`, normalized.
Eigen::VectorXcd bump_packet(const ParticleLattice& lat, const Eigen::VectorXd& centre);

/// Product packet for all particles; particle l is centred at L h / 2^{l+1}
/// along every axis.
Eigen::VectorXcd particle_packet(const ParticleLattice& lat);

struct IdentityRow {
  std::string label;
  int n_max = 0;
  int state = 0;
  double residual = 0.0;
};

struct IdentityResult {
  Report report;
  std::vector<IdentityRow> rows;
};

/// Dressing-identity residuals over the N_max list for the configuration and
/// for each of its identity cases.
IdentityResult run_dressing_identity(const RunConfig& config);

/// Residual triple of one configuration (no cases), appended to `out`.
void dressing_identity_case(const RunConfig& config, const std::string& label, IdentityResult& out);

/// Fock-space laws plus the six field-operator estimates on random draws.
Report run_inequality_suite(const RunConfig& config, int trials, std::uint64_t seed);

struct ObservableRow {
  double lambda = 0.0;
  double t = 0.0;
  int mode = 0;
  double abs_err = 0.0;
};

struct ObservablesResult {
  Report report;
  std::vector<ObservableRow> rows;
};

ObservablesResult run_classical_observables(const RunConfig& config);

struct SweepRow {
  double lambda = 0.0;
  double t = 0.0;
  double err_wv = 0.0;
  double err_zv = 0.0;
  double bound_ratio = 0.0;
  double wall_ms = 0.0;
};

struct SweepStateRow {
  double lambda = 0.0;
  double t = 0.0;
  int state = 0;
  double err_wv = 0.0;
  double err_zv = 0.0;
  double bound_ratio = 0.0;
};

struct SweepResult {
  /// Per (lambda, t), the maximum over the battery; lambda descending, t ascending.
  std::vector<SweepRow> rows;
  std::vector<SweepStateRow> state_rows;
  std::vector<double> battery_energy_norms;
  double slope_wv = 0.0;
  double slope_zv = 0.0;
  std::string config_hash;
  int n_max = 0;
  Report report;
};

SweepResult run_convergence_sweep(const RunConfig& config);

/// Norm preservation of Q, C, U, V, W, Z, the V composition law and V's
/// self-convergence order.
Report run_propagator_laws(const RunConfig& config);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Worker count: NELSON_LAB_THREADS when set and positive, else hardware concurrency.
unsigned worker_count();

}  // namespace nelson

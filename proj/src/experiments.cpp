#include "nelson/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

namespace nelson {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Check make_check(std::string name, bool pass, double value, double tol, std::string provenance,
                 std::string detail = {}) {
  return Check{std::move(name), pass, value, tol, std::move(provenance), std::move(detail)};
}

// Runs body(i) for i in [0, n) on up to worker_count() threads.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Occupation occupation(int modes, std::initializer_list<int> excited) {
  Occupation n(static_cast<std::size_t>(modes), 0);
  for (int j : excited) ++n[static_cast<std::size_t>(std::min(j, modes - 1))];
  return n;
}

// Packet (x) {vacuum, one boson in mode 1, one boson in modes 1 and m-1}.
std::vector<StateVector> identity_battery(const Model& model) {
  const Eigen::VectorXcd packet = particle_packet(model.params.lattice);
  const FockBasis& basis = model.space.basis;
  const int m = basis.modes();
  std::vector<StateVector> out{product_state(packet, fock_state(basis, occupation(m, {})))};
  if (basis.n_max() >= 1) out.push_back(product_state(packet, fock_state(basis, occupation(m, {1}))));
  if (basis.n_max() >= 2)
    out.push_back(product_state(packet, fock_state(basis, occupation(m, {1, m - 1}))));
  return out;
}

// Packet (x) {vacuum, one boson in mode 1, one boson in mode 2}.
std::vector<StateVector> sweep_battery(const Model& model) {
  const Eigen::VectorXcd packet = particle_packet(model.params.lattice);
  const FockBasis& basis = model.space.basis;
  const int m = basis.modes();
  std::vector<StateVector> out{product_state(packet, fock_state(basis, occupation(m, {})))};
  if (basis.n_max() >= 1) {
    out.push_back(product_state(packet, fock_state(basis, occupation(m, {1}))));
    out.push_back(product_state(packet, fock_state(basis, occupation(m, {2}))));
  }
  return out;
}

void require_sizing(const RunConfig& config) {
  const double norm2 = config.field.norm2();
  for (double lambda : config.model.couplings) {
    if (!(lambda > 0.0)) throw ConfigError({"coupling list must be positive for field experiments"});
    if (norm2 / (lambda * lambda) > 0.5 * config.n_max)
      throw ConfigError({"coherent occupancy exceeds n_max/2 at coupling " + std::to_string(lambda)});
  }
}

std::string state_tag(int b) { return "[state " + std::to_string(b) + "]"; }

// Largest consecutive ratio y[i+1]/y[i]; below 1 means strictly decreasing.
double worst_ratio(const std::vector<double>& y) {
  double worst = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i)
    worst = std::max(worst, y[i - 1] > 0.0 ? y[i] / y[i - 1] : std::numeric_limits<double>::infinity());
  return worst;
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

unsigned worker_count() {
  if (const char* env = std::getenv("NELSON_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Eigen::VectorXcd bump_packet(const ParticleLattice& lat, const Eigen::VectorXd& centre) {
  const double period = lat.sites * lat.spacing;
  Eigen::VectorXcd v(lat.site_count());
  for (Index s = 0; s < lat.site_count(); ++s) {
    const Eigen::VectorXd x = lat.spacing * lat.site_coords(s).cast<double>();
    double amp = 1.0;
    for (int a = 0; a < lat.dim; ++a) amp *= std::pow(1.0 + std::cos(2.0 * kPi * (x(a) - centre(a)) / period), 2);
    v(s) = amp;
  }
  return v.normalized();
}

Eigen::VectorXcd particle_packet(const ParticleLattice& lat) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Ones(1);
  const double period = lat.sites * lat.spacing;
  for (int l = 0; l < lat.particles; ++l) {
    const Eigen::VectorXcd one =
        bump_packet(lat, Eigen::VectorXd::Constant(lat.dim, period / std::pow(2.0, l + 1)));
    Eigen::VectorXcd next(out.size() * one.size());
    for (Index i = 0; i < out.size(); ++i) next.segment(i * one.size(), one.size()) = out(i) * one;
    out = std::move(next);
  }
  return out;
}

void dressing_identity_case(const RunConfig& config, const std::string& label, IdentityResult& out) {
  const double lambda = config.experiments.identity_coupling;
  std::vector<double> worst;
  double asymmetry = 0.0;
  for (int n : config.experiments.identity_n_max) {
    const Model model = Model::build(config.params(lambda, n));
    const SparseOperator h = hamiltonian(model);
    const SparseOperator dressed = dressed_hamiltonian(model).total();
    const Dressing q = build_dressing(model, config.propagation.krylov);
    const int p = model.params.lattice.particles;
    const double shift = p * self_energy(model.params, model.mask);
    const double shift0 = p * self_energy(model.params, model.mask0);
    asymmetry = dressed_band_asymmetry(model);
    const auto battery = identity_battery(model);
    double r = 0.0;
    for (std::size_t b = 0; b < battery.size(); ++b) {
      const StateVector& psi = battery[b];
      const StateVector qpsi = q.apply(psi);
      const StateVector lhs = h * qpsi - shift * qpsi;
      const StateVector rhs = q.apply(StateVector(dressed * psi - shift0 * psi));
      const double res = (lhs - rhs).norm();
      out.rows.push_back(IdentityRow{label, n, static_cast<int>(b), res});
      r = std::max(r, res);
    }
    worst.push_back(r);
  }
  const std::string tag = "identity[" + label + "]";
  // A vanishing first residual means the identity holds exactly (zero coupling).
  const bool exact = worst.front() == 0.0 && worst.back() == 0.0;
  const double decrease = exact ? 0.0 : worst_ratio(worst);
  out.report.add(make_check(tag + ".residual_decreasing", decrease < 1.0, decrease, 1.0, "measured",
                            "largest R(next)/R(previous) over the n_max list"));
  const double shrink = exact ? 0.0 : worst.back() / worst.front();
  out.report.add(make_check(tag + ".residual_shrink", shrink <= 0.2, shrink, 0.2, "measured",
                            "R(last n_max) / R(first n_max)"));
  out.report.add(make_check(tag + ".band_symmetric", asymmetry <= 1e-12, asymmetry, 1e-12, "exact",
                            "|sum_j k_j w_j g_j^2| over the dressed band"));
}

IdentityResult run_dressing_identity(const RunConfig& config) {
  IdentityResult out;
  out.report.experiment = "identity";
  if (config.experiments.identity_cases.empty()) {
    dressing_identity_case(config, "base", out);
    return out;
  }
  for (const auto& c : config.experiments.identity_cases)
    dressing_identity_case(resolve_case(config, c), c.label, out);
  return out;
}

Report run_inequality_suite(const RunConfig& config, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("run_inequality_suite: trials must be >= 1");
  Report report;
  report.experiment = "inequalities";
  const ModeGrid& grid = config.grid;
  const FockBasis basis = FockBasis::enumerate(static_cast<int>(grid.size()), config.n_max);
  const int m = basis.modes();
  const Index d = basis.size();

  std::vector<SparseOperator> lower, raise;
  for (int j = 0; j < m; ++j) {
    lower.push_back(ladder(basis, j, Ladder::annihilate));
    raise.push_back(ladder(basis, j, Ladder::create));
  }
  double adjoint = 0.0;
  for (int j = 0; j < m; ++j)
    adjoint = std::max(adjoint, SparseOperator(raise[j] - SparseOperator(lower[j].adjoint())).norm());
  report.add(make_check("fock.adjoint", adjoint == 0.0, adjoint, 0.0, "exact",
                        "Frobenius norm of a_j^dagger - (a_j)^dagger"));

  const Index inner = basis.sector_end(config.n_max - 1);
  double ccr = 0.0, cross = 0.0, number = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Eigen::MatrixXcd comm = Eigen::MatrixXcd(lower[i] * raise[j] - raise[j] * lower[i]);
      if (i == j) {
        comm -= Eigen::MatrixXcd::Identity(d, d);
        if (inner > 0) ccr = std::max(ccr, comm.leftCols(inner).cwiseAbs().maxCoeff());
        const Eigen::MatrixXcd n_j = Eigen::MatrixXcd(raise[j] * lower[j]);
        for (Index s = 0; s < d; ++s) {
          Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(d, 1);
          expected(s, 0) = basis.state(s)[static_cast<std::size_t>(j)];
          number = std::max(number, (n_j.col(s) - expected).cwiseAbs().maxCoeff());
        }
      } else if (inner > 0) {
        cross = std::max(cross, comm.leftCols(inner).cwiseAbs().maxCoeff());
      }
    }
  report.add(make_check("fock.ccr_low_sectors", ccr <= 1e-12, ccr, 1e-12, "exact",
                        "max |([a_i,a_j^dagger] - delta_ij) e_s| for total(s) <= n_max - 1"));
  report.add(make_check("fock.ccr_cross_modes", cross <= 1e-12, cross, 1e-12, "exact",
                        "max |[a_i,a_j^dagger] e_s| for i != j and total(s) <= n_max - 1"));
  report.add(make_check("fock.number_diagonal", number <= 1e-12, number, 1e-12, "exact",
                        "a_j^dagger a_j against diag(n_j)"));

  const SparseOperator h02 = boson_energy(basis, grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto random_vector = [&](Index n) {
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    return v;
  };

  constexpr int kCount = 6;
  const char* names[kCount] = {"lemma.annihilation",        "lemma.creation",
                               "lemma.annihilation_squared", "lemma.number_like",
                               "lemma.creation_squared",     "lemma.matrix_element"};
  int violations[kCount] = {};
  double worst[kCount] = {};
  const auto record = [&](int k, double lhs, double rhs) {
    if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) ++violations[k];
    if (rhs > 0.0) worst[k] = std::max(worst[k], lhs / rhs);
  };

  for (int trial = 0; trial < trials; ++trial) {
    ModeVector f = random_vector(m) * std::exp(2.0 * gauss(rng));
    for (Index j = 0; j < m; ++j)
      if (unit(rng) < 0.2) f(j) = 0.0;
    // Shape the states so that every sector carries weight in some draws.
    Eigen::VectorXcd psi = random_vector(d), phi = random_vector(d);
    const double tilt = 3.0 * gauss(rng);
    for (Index s = 0; s < d; ++s) {
      psi(s) *= std::exp(tilt * basis.total(s) / std::max(1, config.n_max));
      phi(s) *= std::exp(-tilt * basis.total(s) / std::max(1, config.n_max));
    }
    psi.normalize();
    phi.normalize();

    const SparseOperator a = smear(basis, grid, f.conjugate(), Ladder::annihilate);
    const SparseOperator a_star = smear(basis, grid, f, Ladder::create);
    const double n0 = weighted_norm2(grid, f);
    const double n1 = weighted_norm2(grid, f, -1.0);
    const double nq = weighted_norm2(grid, f, -0.5);
    const Eigen::VectorXcd h_psi = h02 * psi;
    const double e_psi = psi.dot(h_psi).real();
    const double e_phi = phi.dot(h02 * phi).real();
    const double h2 = h_psi.squaredNorm();
    const double p2 = psi.squaredNorm();

    const Eigen::VectorXcd a_psi = a * psi;
    const Eigen::VectorXcd a2_psi = a * a_psi;
    const Eigen::VectorXcd as_psi = a_star * psi;
    record(0, a_psi.squaredNorm(), n1 * e_psi);
    record(1, as_psi.squaredNorm(), n1 * e_psi + n0 * p2);
    record(2, a2_psi.squaredNorm(), n1 * n1 * h2);
    record(3, Eigen::VectorXcd(a_star * a_psi).squaredNorm(), n1 * n1 * h2 + n0 * n1 * e_psi);
    record(4, Eigen::VectorXcd(a_star * as_psi).squaredNorm(),
           n1 * n1 * h2 + 4.0 * n0 * n1 * e_psi + 2.0 * n0 * n0 * p2);
    record(5, std::abs(phi.dot(a2_psi)),
           std::sqrt(1.5) * (n1 * std::sqrt(e_psi * e_phi) + nq * std::sqrt(e_psi) * phi.norm()));
  }
  for (int k = 0; k < kCount; ++k)
    report.add(make_check(names[k], violations[k] == 0, worst[k], 1.0, "exact",
                          std::to_string(violations[k]) + " violations in " +
                              std::to_string(trials) + " trials; value is the largest lhs/rhs"));
  return report;
}

ObservablesResult run_classical_observables(const RunConfig& config) {
  require_sizing(config);
  ObservablesResult out;
  out.report.experiment = "observables";
  const auto& lambdas = config.model.couplings;
  std::vector<double> times{0.0};
  times.insert(times.end(), config.propagation.times.begin(), config.propagation.times.end());
  const int m = static_cast<int>(config.grid.size());

  // err[l][t][j]
  std::vector<std::vector<std::vector<double>>> err(
      lambdas.size(), std::vector<std::vector<double>>(times.size(), std::vector<double>(m)));
  parallel_for(lambdas.size(), [&](std::size_t li) {
    const double lambda = lambdas[li];
    const Dynamics dyn = Dynamics::build(Model::build(config.params(lambda)), config.field,
                                         config.propagation);
    const CompositeSpace& space = dyn.model.space;
    const StateVector phi0 = product_state(particle_packet(space.lattice),
                                           fock_state(space.basis, occupation(m, {})));
    const StateVector start = apply_on_fock(space, coherent_frame(dyn, 0.0, false), phi0);
    std::vector<SparseOperator> a;
    for (int j = 0; j < m; ++j) a.push_back(on_fock(space, dyn.model.lowering[static_cast<std::size_t>(j)]));
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const StateVector phi = times[ti] == 0.0 ? start : propagate_U(dyn, times[ti], start);
      const ModeVector alpha_t = evolve_alpha(config.field, times[ti]);
      for (int j = 0; j < m; ++j) {
        const Complex moment = lambda * phi.dot(a[static_cast<std::size_t>(j)] * phi);
        err[li][ti][static_cast<std::size_t>(j)] =
            std::abs(moment - std::sqrt(config.grid.weights(j)) * alpha_t(j));
      }
    }
  });

  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (int j = 0; j < m; ++j)
        out.rows.push_back(ObservableRow{lambdas[li], times[ti], j, err[li][ti][static_cast<std::size_t>(j)]});

  double initial = 0.0;
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (int j = 0; j < m; ++j) initial = std::max(initial, err[li][0][static_cast<std::size_t>(j)]);
  out.report.add(make_check("observables.initial", initial <= 1e-6, initial, 1e-6, "measured",
                            "max_j,lambda e_j(lambda, 0)"));
  double worst = 0.0;
  std::string where;
  for (std::size_t ti = 1; ti < times.size(); ++ti)
    for (int j = 0; j < m; ++j) {
      std::vector<double> series;
      for (std::size_t li = 0; li < lambdas.size(); ++li) series.push_back(err[li][ti][static_cast<std::size_t>(j)]);
      const double r = worst_ratio(series);
      if (r > worst) {
        worst = r;
        where = "mode " + std::to_string(j) + ", t " + std::to_string(times[ti]);
      }
    }
  out.report.add(make_check("observables.decreasing", worst < 1.0, worst, 1.0, "measured",
                            "largest e(next lambda)/e(lambda); worst at " + where));
  return out;
}

SweepResult run_convergence_sweep(const RunConfig& config) {
  require_sizing(config);
  SweepResult out;
  out.report.experiment = "sweep";
  out.config_hash = config_hash(config);
  out.n_max = config.n_max;
  const auto& lambdas = config.model.couplings;
  const auto& times = config.propagation.times;

  // V does not depend on the coupling.
  const Dynamics reference = Dynamics::build(Model::build(config.params(lambdas.front())),
                                             config.field, config.propagation);
  const auto battery = sweep_battery(reference.model);
  const std::size_t nb = battery.size();
  for (const auto& psi : battery) out.battery_energy_norms.push_back(energy_norm(reference.h0, psi));
  std::vector<std::vector<StateVector>> limit(times.size(), std::vector<StateVector>(nb));
  parallel_for(times.size() * nb, [&](std::size_t k) {
    limit[k / nb][k % nb] = propagate_V(reference, times[k / nb], 0.0, battery[k % nb]).state;
  });

  struct Cell {
    std::vector<double> wv, zv, ratio;
    double wall_ms = 0.0;
  };
  std::vector<std::vector<Cell>> cells(lambdas.size(), std::vector<Cell>(times.size()));
  parallel_for(lambdas.size(), [&](std::size_t li) {
    const Dynamics dyn = Dynamics::build(Model::build(config.params(lambdas[li])), config.field,
                                         config.propagation);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const auto start = Clock::now();
      Cell& cell = cells[li][ti];
      for (std::size_t b = 0; b < nb; ++b) {
        const StateVector w = propagate_W(dyn, times[ti], 0.0, battery[b]);
        const StateVector z = propagate_Z(dyn, times[ti], 0.0, battery[b]);
        cell.wv.push_back((w - limit[ti][b]).norm());
        cell.zv.push_back((z - limit[ti][b]).norm());
        cell.ratio.push_back(energy_norm(dyn.h0, z) / out.battery_energy_norms[b]);
      }
      cell.wall_ms = elapsed_ms(start);
    }
  });

  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const Cell& c = cells[li][ti];
      out.rows.push_back(SweepRow{lambdas[li], times[ti], *std::max_element(c.wv.begin(), c.wv.end()),
                                  *std::max_element(c.zv.begin(), c.zv.end()),
                                  *std::max_element(c.ratio.begin(), c.ratio.end()), c.wall_ms});
      for (std::size_t b = 0; b < nb; ++b)
        out.state_rows.push_back(SweepStateRow{lambdas[li], times[ti], static_cast<int>(b), c.wv[b],
                                               c.zv[b], c.ratio[b]});
    }

  // max over t, per lambda and state
  const auto max_t = [&](bool z, std::size_t b) {
    std::vector<double> series;
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      double v = 0.0;
      for (std::size_t ti = 0; ti < times.size(); ++ti)
        v = std::max(v, z ? cells[li][ti].zv[b] : cells[li][ti].wv[b]);
      series.push_back(v);
    }
    return series;
  };

  bool bounded = true;
  for (const auto& r : out.state_rows)
    bounded = bounded && std::isfinite(r.err_wv) && std::isfinite(r.err_zv) &&
              r.err_wv <= 2.0 + 1e-12 && r.err_zv <= 2.0 + 1e-12;
  out.report.add(make_check("sweep.errors_bounded", bounded, bounded ? 1.0 : 0.0, 1.0, "exact",
                            "every error finite and at most 2 ||psi||"));

  const bool fit = lambdas.size() >= 2;
  for (int kind = 0; kind < 2; ++kind) {
    const std::string tag = kind == 0 ? "sweep.wv" : "sweep.zv";
    std::vector<double> overall(lambdas.size(), 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto series = max_t(kind == 1, b);
      for (std::size_t li = 0; li < lambdas.size(); ++li) overall[li] = std::max(overall[li], series[li]);
      const double r = worst_ratio(series);
      out.report.add(make_check(tag + ".decreasing" + state_tag(static_cast<int>(b)), r < 1.0, r, 1.0,
                                "measured", "largest max_t err(next lambda) / max_t err(lambda)"));
      if (fit) {
        const double s = loglog_slope(lambdas, series);
        out.report.add(make_check(tag + ".slope" + state_tag(static_cast<int>(b)), s >= 0.45, s, 0.45,
                                  "measured", "log-log slope of max_t err against lambda"));
      }
    }
    if (fit) (kind == 0 ? out.slope_wv : out.slope_zv) = loglog_slope(lambdas, overall);
  }

  double first = 0.0, all = 0.0;
  for (std::size_t li = 0; li < lambdas.size(); ++li)
    for (std::size_t ti = 0; ti < times.size(); ++ti)
      for (double r : cells[li][ti].ratio) {
        all = std::max(all, r);
        if (li == 0) first = std::max(first, r);
      }
  const double growth = all / first;
  out.report.add(make_check("sweep.uniform_bound", growth <= 3.0, growth, 3.0, "measured",
                            "max energy-norm ratio over the sweep / its value at the first coupling"));
  return out;
}

Report run_propagator_laws(const RunConfig& config) {
  Report report;
  report.experiment = "propagators";
  const double lambda = config.model.couplings.front();
  const double t = config.propagation.times.back();
  const Dynamics dyn = Dynamics::build(Model::build(config.params(lambda)), config.field,
                                       config.propagation);
  const auto battery = sweep_battery(dyn.model);
  constexpr double kNormTol = 1e-8;

  double q = 0.0, c = 0.0, u = 0.0, v = 0.0, w = 0.0, z = 0.0, comp = 0.0;
  const Eigen::MatrixXcd frame = coherent_frame(dyn, 0.0, false);
  c = (frame.adjoint() * frame - Eigen::MatrixXcd::Identity(frame.rows(), frame.cols())).norm();
  for (const auto& psi : battery) {
    const double n = psi.norm();
    const StateVector qpsi = dyn.dressing.apply(psi);
    q = std::max({q, std::abs(qpsi.norm() - n), (dyn.dressing.apply_adjoint(qpsi) - psi).norm()});
    c = std::max(c, std::abs(apply_on_fock(dyn.model.space, frame, psi).norm() - n));
    u = std::max(u, std::abs(propagate_U(dyn, t, psi).norm() - n));
    const StateVector full = propagate_V(dyn, t, 0.0, psi).state;
    v = std::max(v, std::abs(full.norm() - n));
    w = std::max(w, std::abs(propagate_W(dyn, t, 0.0, psi).norm() - n));
    z = std::max(z, std::abs(propagate_Z(dyn, t, 0.0, psi).norm() - n));
    const StateVector half = propagate_V(dyn, 0.5 * t, 0.0, psi).state;
    comp = std::max(comp, (propagate_V(dyn, t, 0.5 * t, half).state - full).norm());
  }
  report.add(make_check("unitary.Q", q <= kNormTol, q, kNormTol, "exact"));
  report.add(make_check("unitary.C", c <= kNormTol, c, kNormTol, "exact"));
  report.add(make_check("unitary.U", u <= kNormTol, u, kNormTol, "exact"));
  report.add(make_check("unitary.V", v <= kNormTol, v, kNormTol, "exact"));
  report.add(make_check("unitary.W", w <= kNormTol, w, kNormTol, "exact"));
  report.add(make_check("unitary.Z", z <= kNormTol, z, kNormTol, "exact"));
  const double comp_tol = config.propagation.step_tol;
  report.add(make_check("V.composition", comp <= comp_tol, comp, comp_tol, "measured",
                        "||V(t,t/2)V(t/2,0)psi - V(t,0)psi|| at the step tolerance"));

  // Self-convergence from coarse step counts, where the increments sit well
  // above the Krylov tolerance. Without a field every midpoint step is exact,
  // so there is no truncation error to measure.
  if (config.field.norm2() == 0.0) {
    report.add(make_check("V.order", true, 0.0, 2.0, "exact",
                          "field is zero; midpoint steps are exact and the order is undefined"));
    return report;
  }
  const StateVector& psi = battery.front();
  const int base = std::max(1, config.propagation.steps / 8);
  const StateVector v1 = propagate_V_fixed(dyn, t, 0.0, psi, base);
  const StateVector v2 = propagate_V_fixed(dyn, t, 0.0, psi, 2 * base);
  const StateVector v4 = propagate_V_fixed(dyn, t, 0.0, psi, 4 * base);
  const double order = std::log2((v1 - v2).norm() / (v2 - v4).norm());
  report.add(make_check("V.order", order >= 1.8 && order <= 2.2, order, 2.0, "measured",
                        "log2 of successive increments at " + std::to_string(base) + ", " +
                            std::to_string(2 * base) + ", " + std::to_string(4 * base) +
                            " steps; pass band [1.8, 2.2]"));
  return report;
}

}  // namespace nelson

#include "nelson/cli.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nelson/emit.hpp"

namespace nelson {

namespace {

void print_checks(const Report& report, std::ostream& out) {
  for (const auto& c : report.checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g (tol %.3g)", c.value, c.tolerance);
    out << (c.pass ? "PASS " : "FAIL ") << c.name << " " << buf << '\n';
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cutoff Nelson model numerical lab", "nelson-lab"};
  std::string experiment, config_path, out_dir, format;
  std::uint64_t seed = 0;
  bool dry_run = false;
  app.add_option("experiment", experiment, "identity | inequalities | observables | sweep | all")
      ->required()
      ->check(CLI::IsMember({"identity", "inequalities", "observables", "sweep", "all"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* format_opt = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_flag("--dry-run", dry_run, "print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  RunConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "invalid configuration " << config_path << ":\n";
    for (const auto& v : e.violations()) err << "  " << v << '\n';
    return 2;
  }
  if (*out_opt) config.out_dir = out_dir;
  if (*format_opt) config.format = format;
  if (*seed_opt) config.seed = seed;

  if (dry_run) {
    out << echo(config).dump(2) << '\n';
    return 0;
  }

  const bool all = experiment == "all";
  std::vector<Report> reports;
  try {
    if (all || experiment == "identity") {
      auto r = run_dressing_identity(config);
      emit(identity_table(r), config.out_dir, "identity", config.format);
      reports.push_back(std::move(r.report));
    }
    if (all || experiment == "inequalities")
      reports.push_back(run_inequality_suite(config, config.experiments.trials, config.seed));
    if (all || experiment == "observables") {
      auto r = run_classical_observables(config);
      emit(observables_table(r), config.out_dir, "observables", config.format);
      reports.push_back(std::move(r.report));
    }
    if (all || experiment == "sweep") {
      auto r = run_convergence_sweep(config);
      emit(sweep_table(r), config.out_dir, "sweep", config.format);
      emit(sweep_states_table(r), config.out_dir, "sweep_states", config.format);
      char buf[96];
      std::snprintf(buf, sizeof buf, "fitted slopes: W-V %.4f, Z-V %.4f\n", r.slope_wv, r.slope_zv);
      out << buf;
      reports.push_back(std::move(r.report));
      reports.push_back(run_propagator_laws(config));
    }
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    if (!reports.empty()) emit_report(reports, config, config.out_dir);
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    if (!reports.empty()) emit_report(reports, config, config.out_dir);
    return 1;
  }

  emit_report(reports, config, config.out_dir);
  bool pass = true;
  for (const auto& r : reports) {
    print_checks(r, out);
    pass = pass && r.passed();
  }
  out << (pass ? "all checks passed" : "some checks failed") << " (results in "
      << config.out_dir.string() << ")\n";
  return pass ? 0 : 1;
}

}  // namespace nelson

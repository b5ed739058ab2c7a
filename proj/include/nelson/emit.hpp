#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "nelson/experiments.hpp"

namespace nelson {

using Cell = std::variant<double, long long, std::string>;

/// Column-ordered result table; doubles serialize with 17 significant digits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_double(double v);

Table identity_table(const IdentityResult& result);
Table observables_table(const ObservablesResult& result);
/// Columns lambda,t,err_wv,err_zv,bound_ratio,wall_ms.
Table sweep_table(const SweepResult& result);
Table sweep_states_table(const SweepResult& result);

/// Writes `<dir>/<stem>.csv` or `<dir>/<stem>.json` (array of row objects).
/// Throws std::runtime_error on I/O failure. Returns the written path.
std::filesystem::path emit(const Table& table, const std::filesystem::path& dir,
                           const std::string& stem, const std::string& format);

/// Reads a CSV written by emit back as strings.
Table read_csv(const std::filesystem::path& path);

/// {"config": echo, "config_hash": ..., "checks": [{check, pass, value, tolerance, provenance}]}.
nlohmann::ordered_json report_json(const std::vector<Report>& reports, const RunConfig& config);
std::filesystem::path emit_report(const std::vector<Report>& reports, const RunConfig& config,
                                  const std::filesystem::path& dir);

}  // namespace nelson

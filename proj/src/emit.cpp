#include "nelson/emit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nelson {

namespace {

std::string render(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::ordered_json to_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Table identity_table(const IdentityResult& result) {
  Table t{{"case", "n_max", "state", "residual"}, {}};
  for (const auto& r : result.rows)
    t.rows.push_back({r.label, static_cast<long long>(r.n_max), static_cast<long long>(r.state), r.residual});
  return t;
}

Table observables_table(const ObservablesResult& result) {
  Table t{{"lambda", "t", "mode", "abs_err"}, {}};
  for (const auto& r : result.rows) t.rows.push_back({r.lambda, r.t, static_cast<long long>(r.mode), r.abs_err});
  return t;
}

Table sweep_table(const SweepResult& result) {
  Table t{{"lambda", "t", "err_wv", "err_zv", "bound_ratio", "wall_ms"}, {}};
  for (const auto& r : result.rows)
    t.rows.push_back({r.lambda, r.t, r.err_wv, r.err_zv, r.bound_ratio, r.wall_ms});
  return t;
}

Table sweep_states_table(const SweepResult& result) {
  Table t{{"lambda", "t", "state", "err_wv", "err_zv", "bound_ratio"}, {}};
  for (const auto& r : result.state_rows)
    t.rows.push_back({r.lambda, r.t, static_cast<long long>(r.state), r.err_wv, r.err_zv, r.bound_ratio});
  return t;
}

std::filesystem::path emit(const Table& table, const std::filesystem::path& dir,
                           const std::string& stem, const std::string& format) {
  if (format != "csv" && format != "json") throw std::invalid_argument("emit: unknown format " + format);
  const std::filesystem::path path = dir / (stem + "." + format);
  std::ofstream out = open_for_write(path);
  if (format == "csv") {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << render(row[i]);
      out << '\n';
    }
  } else {
    nlohmann::ordered_json ordered = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = to_json(row[i]);
      ordered.push_back(obj);
    }
    out << ordered.dump(1) << '\n';
  }
  finish(out, path);
  return path;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Table t;
  std::string line;
  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  if (std::getline(in, line)) t.columns = split(line);
  while (std::getline(in, line)) {
    std::vector<Cell> row;
    for (auto& s : split(line)) row.emplace_back(s);
    t.rows.push_back(std::move(row));
  }
  return t;
}

nlohmann::ordered_json report_json(const std::vector<Report>& reports, const RunConfig& config) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& r : reports)
    for (const auto& c : r.checks)
      checks.push_back({{"check", c.name},
                        {"pass", c.pass},
                        {"value", c.value},
                        {"tolerance", c.tolerance},
                        {"provenance", c.provenance},
                        {"detail", c.detail}});
  nlohmann::ordered_json doc;
  doc["config"] = nlohmann::ordered_json::parse(echo(config).dump());
  doc["config_hash"] = config_hash(config);
  doc["checks"] = checks;
  return doc;
}

std::filesystem::path emit_report(const std::vector<Report>& reports, const RunConfig& config,
                                  const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / "report.json";
  std::ofstream out = open_for_write(path);
  out << report_json(reports, config).dump(1) << '\n';
  finish(out, path);
  return path;
}

}  // namespace nelson

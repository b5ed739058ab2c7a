#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nelson/classical.hpp"
#include "nelson/model.hpp"
#include "nelson/propagators.hpp"

namespace nelson {

/// Every violation found while parsing or validating a document.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct ModelBlock {
  int dim = 1;
  int sites = 16;
  double spacing = 1.0;
  int particles = 1;
  double mass = 1.0;
  double mu = 1.0;
  /// Descending coupling list; single-coupling experiments use the first entry.
  std::vector<double> couplings{0.2};
  double sigma = 2.0;
  double sigma0 = 1.0;
  Stencil stencil = Stencil::finite_difference;
};

/// A labelled merge patch applied to the whole document before resolution.
struct ConfigCase {
  std::string label;
  nlohmann::json patch;
};

struct ExperimentsBlock {
  std::vector<int> identity_n_max{4, 6, 8};
  double identity_coupling = 0.2;
  std::vector<ConfigCase> identity_cases;
  int trials = 100;
};

struct RunConfig {
  ModelBlock model;
  ModeGrid grid;
  int n_max = 6;
  /// Field amplitudes after occupancy scaling.
  ClassicalFieldSpec field;
  std::optional<double> occupancy;
  PropagationConfig propagation;
  ExperimentsBlock experiments;
  std::filesystem::path out_dir = "results";
  std::string format = "csv";
  std::uint64_t seed = 0;
  /// Document as given, kept so cases can be re-resolved against it.
  nlohmann::json source;

  ParticleLattice lattice() const;
  ModelParams params(double coupling, std::optional<int> n_max = std::nullopt) const;
};

/// Parses and validates a JSON document. Throws ConfigError listing every
/// violation; syntax errors carry line and column.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Re-resolves the original document with a case patch merged in.
RunConfig resolve_case(const RunConfig& base, const ConfigCase& c);

/// Resolved document with every default filled in.
nlohmann::json echo(const RunConfig& config);

/// FNV-1a 64 of the compact echo, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Parses "pi/12", "3*pi/4", "2*pi" or a plain number.
std::optional<double> parse_pi_expression(std::string_view text);

}  // namespace nelson

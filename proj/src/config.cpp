#include "nelson/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nelson {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : "; ") + s;
  return out;
}

// Typed field access that records violations instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void fail(const std::string& msg) { errors_.push_back(msg); }

  const json* object(const json& parent, const std::string& key, const std::string& path) {
    if (!parent.contains(key)) return nullptr;
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(path + ": expected an object");
      return nullptr;
    }
    return &v;
  }

  void known_keys(const json* obj, const std::string& path, std::set<std::string> keys) {
    if (!obj) return;
    for (const auto& [k, v] : obj->items())
      if (!keys.count(k)) fail(path + "." + k + ": unknown key");
  }

  double number(const json* obj, const std::string& key, double def, const std::string& path) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string())
      if (auto p = parse_pi_expression(v.get<std::string>())) return *p;
    fail(path + "." + key + ": expected a number");
    return def;
  }

  int integer(const json* obj, const std::string& key, int def, const std::string& path) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (v.is_number_integer()) return v.get<int>();
    fail(path + "." + key + ": expected an integer");
    return def;
  }

  std::string string(const json* obj, const std::string& key, std::string def,
                     const std::string& path) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (v.is_string()) return v.get<std::string>();
    fail(path + "." + key + ": expected a string");
    return def;
  }

  std::vector<double> numbers(const json* obj, const std::string& key, std::vector<double> def,
                              const std::string& path) {
    if (!obj || !obj->contains(key)) return def;
    const json& v = obj->at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) {
      fail(path + "." + key + ": expected a number or an array of numbers");
      return def;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        fail(path + "." + key + ": expected numeric entries");
        return def;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  std::vector<std::string>& errors_;
};

Complex read_complex(const json& v, bool& ok) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex(v[0].get<double>(), v[1].get<double>());
  ok = false;
  return {};
}

json without_cases(json doc) {
  if (doc.contains("experiments") && doc["experiments"].is_object() &&
      doc["experiments"].contains("identity") && doc["experiments"]["identity"].is_object())
    doc["experiments"]["identity"].erase("cases");
  return doc;
}

RunConfig resolve(const json& doc, std::vector<std::string>& errors, bool allow_cases);

void read_model(Reader& r, const json& doc, RunConfig& cfg) {
  const json* m = r.object(doc, "model", "model");
  r.known_keys(m, "model",
               {"dim", "sites", "spacing", "particles", "mass", "mu", "coupling", "sigma", "sigma0",
                "stencil"});
  ModelBlock& b = cfg.model;
  b.dim = r.integer(m, "dim", b.dim, "model");
  b.sites = r.integer(m, "sites", b.sites, "model");
  b.spacing = r.number(m, "spacing", b.spacing, "model");
  b.particles = r.integer(m, "particles", b.particles, "model");
  b.mass = r.number(m, "mass", b.mass, "model");
  b.mu = r.number(m, "mu", b.mu, "model");
  b.couplings = r.numbers(m, "coupling", b.couplings, "model");
  b.sigma = r.number(m, "sigma", b.sigma, "model");
  b.sigma0 = r.number(m, "sigma0", b.sigma0, "model");
  const std::string stencil = r.string(m, "stencil", "finite_difference", "model");
  if (stencil == "spectral")
    b.stencil = Stencil::spectral;
  else if (stencil != "finite_difference")
    r.fail("model.stencil: expected \"finite_difference\" or \"spectral\", got \"" + stencil + "\"");

  if (b.dim < 1 || b.dim > 3) r.fail("model.dim: must be 1, 2 or 3");
  if (b.sites < 2) r.fail("model.sites: need at least 2 sites per axis");
  if (!(b.spacing > 0.0)) r.fail("model.spacing: must be positive");
  if (b.particles < 1) r.fail("model.particles: need at least one particle");
  if (!(b.mass > 0.0)) r.fail("model.mass: must be positive");
  if (!(b.mu >= 0.0)) r.fail("model.mu: must be >= 0");
  if (b.couplings.empty()) r.fail("model.coupling: list is empty");
  for (std::size_t i = 0; i < b.couplings.size(); ++i) {
    if (!(b.couplings[i] >= 0.0)) r.fail("model.coupling: entries must be >= 0");
    if (i > 0 && !(b.couplings[i] < b.couplings[i - 1]))
      r.fail("model.coupling: list must be strictly descending");
  }
  if (!(b.sigma0 > 0.0)) r.fail("model.sigma0: must be positive");
  if (!(b.sigma0 < b.sigma)) r.fail("model.sigma0: must be below model.sigma");
}

void read_grid(Reader& r, const json& doc, RunConfig& cfg, bool& grid_ok) {
  const json* g = r.object(doc, "grid", "grid");
  r.known_keys(g, "grid", {"modes", "weights", "uniform"});
  grid_ok = false;
  const int dim = cfg.model.dim;
  Eigen::MatrixXd momenta;
  Eigen::VectorXd weights;
  if (g && g->contains("uniform")) {
    const json* u = r.object(*g, "uniform", "grid.uniform");
    r.known_keys(u, "grid.uniform", {"count", "spacing"});
    const int count = r.integer(u, "count", 4, "grid.uniform");
    const double spacing = r.number(u, "spacing", 1.0, "grid.uniform");
    if (g->contains("modes")) r.fail("grid: give either modes or uniform, not both");
    try {
      cfg.grid = ModeGrid::uniform(dim, count, spacing, cfg.model.mu);
      grid_ok = true;
    } catch (const std::invalid_argument& e) {
      r.fail(std::string("grid: ") + e.what());
    }
    return;
  }
  if (!g || !g->contains("modes")) {
    r.fail("grid: needs a modes list or a uniform block");
    return;
  }
  const json& modes = g->at("modes");
  if (!modes.is_array() || modes.empty()) {
    r.fail("grid.modes: expected a nonempty array");
    return;
  }
  momenta.resize(dim, static_cast<Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const json& k = modes[j];
    const std::string where = "grid.modes[" + std::to_string(j) + "]";
    if (k.is_number() && dim == 1) {
      momenta(0, static_cast<Index>(j)) = k.get<double>();
    } else if (k.is_array() && static_cast<int>(k.size()) == dim) {
      for (int a = 0; a < dim; ++a) {
        if (!k[static_cast<std::size_t>(a)].is_number()) {
          r.fail(where + ": components must be numbers");
          return;
        }
        momenta(a, static_cast<Index>(j)) = k[static_cast<std::size_t>(a)].get<double>();
      }
    } else {
      r.fail(where + ": expected a momentum with " + std::to_string(dim) + " components");
      return;
    }
  }
  const std::vector<double> w =
      r.numbers(g, "weights", std::vector<double>(modes.size(), 1.0), "grid");
  if (w.size() != modes.size()) {
    r.fail("grid.weights: " + std::to_string(w.size()) + " weights for " +
           std::to_string(modes.size()) + " modes");
    return;
  }
  weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Index>(w.size()));
  try {
    cfg.grid = ModeGrid::create(momenta, weights, cfg.model.mu);
    grid_ok = true;
  } catch (const std::invalid_argument& e) {
    r.fail(std::string("grid: ") + e.what());
  }
}

void read_field(Reader& r, const json& doc, RunConfig& cfg, bool grid_ok) {
  const json* f = r.object(doc, "field", "field");
  r.known_keys(f, "field", {"alpha", "occupancy"});
  if (!grid_ok) return;
  const Index m = cfg.grid.size();
  ModeVector alpha = ModeVector::Zero(m);
  if (f && f->contains("alpha")) {
    const json& a = f->at("alpha");
    if (!a.is_array() || static_cast<Index>(a.size()) != m) {
      r.fail("field.alpha: expected " + std::to_string(m) + " amplitudes");
    } else {
      bool ok = true;
      for (Index j = 0; j < m; ++j) alpha(j) = read_complex(a[static_cast<std::size_t>(j)], ok);
      if (!ok) r.fail("field.alpha: entries must be numbers or [re, im] pairs");
    }
  }
  if (f && f->contains("occupancy")) {
    const double occ = r.number(f, "occupancy", 0.0, "field");
    cfg.occupancy = occ;
    const double base = weighted_norm2(cfg.grid, alpha);
    const double lambda_min = cfg.model.couplings.empty() ? 0.0 : cfg.model.couplings.back();
    if (!(occ > 0.0))
      r.fail("field.occupancy: must be positive");
    else if (base == 0.0)
      r.fail("field.occupancy: cannot rescale a zero field");
    else if (!(lambda_min > 0.0))
      r.fail("field.occupancy: smallest coupling must be positive to rescale");
    else
      alpha *= std::sqrt(occ * lambda_min * lambda_min / base);
  }
  cfg.field = ClassicalFieldSpec{cfg.grid, alpha};

  const double norm2 = cfg.field.norm2();
  if (norm2 > 0.0)
    for (double lambda : cfg.model.couplings) {
      if (!(lambda > 0.0)) continue;
      const double occ = norm2 / (lambda * lambda);
      if (occ > 0.5 * cfg.n_max) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "field: coherent occupancy %.6g at coupling %.6g exceeds n_max/2 = %.6g; "
                      "scale alpha down or raise truncation.n_max",
                      occ, lambda, 0.5 * cfg.n_max);
        r.fail(buf);
      }
    }
}

void read_propagation(Reader& r, const json& doc, RunConfig& cfg) {
  const json* p = r.object(doc, "propagation", "propagation");
  r.known_keys(p, "propagation",
               {"times", "steps", "step_tol", "max_doublings", "krylov_dim", "krylov_tol"});
  PropagationConfig& c = cfg.propagation;
  c.times = r.numbers(p, "times", c.times, "propagation");
  c.steps = r.integer(p, "steps", c.steps, "propagation");
  c.step_tol = r.number(p, "step_tol", c.step_tol, "propagation");
  c.max_doublings = r.integer(p, "max_doublings", c.max_doublings, "propagation");
  c.krylov.dim = r.integer(p, "krylov_dim", c.krylov.dim, "propagation");
  c.krylov.tol = r.number(p, "krylov_tol", c.krylov.tol, "propagation");
  if (c.times.empty()) r.fail("propagation.times: list is empty");
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    if (!(c.times[i] > 0.0)) r.fail("propagation.times: entries must be positive");
    if (i > 0 && !(c.times[i] > c.times[i - 1]))
      r.fail("propagation.times: list must be strictly ascending");
  }
  if (c.steps < 1) r.fail("propagation.steps: must be >= 1");
  if (!(c.step_tol > 0.0)) r.fail("propagation.step_tol: must be positive");
  if (c.max_doublings < 1) r.fail("propagation.max_doublings: must be >= 1");
  if (c.krylov.dim < 2) r.fail("propagation.krylov_dim: must be >= 2");
  if (!(c.krylov.tol > 0.0)) r.fail("propagation.krylov_tol: must be positive");
}

void read_experiments(Reader& r, const json& doc, RunConfig& cfg, bool allow_cases,
                      std::vector<std::string>& errors) {
  const json* e = r.object(doc, "experiments", "experiments");
  r.known_keys(e, "experiments", {"identity", "inequalities", "observables", "sweep"});
  ExperimentsBlock& x = cfg.experiments;
  const json* id = e ? r.object(*e, "identity", "experiments.identity") : nullptr;
  r.known_keys(id, "experiments.identity", {"n_max", "coupling", "cases"});
  const std::vector<double> ns = r.numbers(id, "n_max", {4, 6, 8}, "experiments.identity");
  x.identity_n_max.clear();
  for (double n : ns) {
    if (n != std::floor(n) || n < 0) r.fail("experiments.identity.n_max: entries must be integers >= 0");
    x.identity_n_max.push_back(static_cast<int>(n));
  }
  if (x.identity_n_max.size() < 2) r.fail("experiments.identity.n_max: need at least two entries");
  for (std::size_t i = 1; i < x.identity_n_max.size(); ++i)
    if (x.identity_n_max[i] <= x.identity_n_max[i - 1])
      r.fail("experiments.identity.n_max: list must be strictly ascending");
  x.identity_coupling = r.number(id, "coupling", x.identity_coupling, "experiments.identity");
  if (!(x.identity_coupling >= 0.0)) r.fail("experiments.identity.coupling: must be >= 0");

  if (id && id->contains("cases")) {
    const json& cases = id->at("cases");
    if (!cases.is_array()) {
      r.fail("experiments.identity.cases: expected an array");
    } else {
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string where = "experiments.identity.cases[" + std::to_string(i) + "]";
        const json& c = cases[i];
        if (!c.is_object() || !c.contains("label") || !c["label"].is_string() ||
            !c.contains("override") || !c["override"].is_object()) {
          r.fail(where + ": expected {\"label\": string, \"override\": object}");
          continue;
        }
        for (const auto& [k, v] : c.items())
          if (k != "label" && k != "override") r.fail(where + "." + k + ": unknown key");
        ConfigCase cc{c["label"].get<std::string>(), c["override"]};
        if (allow_cases) {
          json patched = without_cases(doc);
          patched.merge_patch(cc.patch);
          std::vector<std::string> sub;
          resolve(without_cases(patched), sub, false);
          for (const auto& s : sub) errors.push_back(where + " (" + cc.label + "): " + s);
        }
        x.identity_cases.push_back(std::move(cc));
      }
    }
  }

  const json* iq = e ? r.object(*e, "inequalities", "experiments.inequalities") : nullptr;
  r.known_keys(iq, "experiments.inequalities", {"trials"});
  x.trials = r.integer(iq, "trials", x.trials, "experiments.inequalities");
  if (x.trials < 1) r.fail("experiments.inequalities.trials: must be >= 1");
  const json* ob = e ? r.object(*e, "observables", "experiments.observables") : nullptr;
  r.known_keys(ob, "experiments.observables", {});
  const json* sw = e ? r.object(*e, "sweep", "experiments.sweep") : nullptr;
  r.known_keys(sw, "experiments.sweep", {});
}

RunConfig resolve(const json& doc, std::vector<std::string>& errors, bool allow_cases) {
  Reader r(errors);
  RunConfig cfg;
  cfg.source = doc;
  if (!doc.is_object()) {
    r.fail("document: expected a JSON object");
    return cfg;
  }
  r.known_keys(&doc, "document",
               {"model", "grid", "truncation", "field", "propagation", "experiments", "output",
                "seed"});
  read_model(r, doc, cfg);

  const json* t = r.object(doc, "truncation", "truncation");
  r.known_keys(t, "truncation", {"n_max"});
  cfg.n_max = r.integer(t, "n_max", cfg.n_max, "truncation");
  if (cfg.n_max < 0) r.fail("truncation.n_max: must be >= 0");

  bool grid_ok = false;
  read_grid(r, doc, cfg, grid_ok);
  if (grid_ok) {
    for (Index j = 0; j < cfg.grid.size(); ++j)
      if (!(cfg.grid.momentum_norm(j) * cfg.model.spacing < kPi))
        r.fail("grid.modes[" + std::to_string(j) + "]: |k| h must be below pi");
    if (cfg.model.stencil == Stencil::spectral && cfg.model.sites >= 2 && cfg.model.spacing > 0.0 &&
        !commensurate(cfg.lattice(), cfg.grid))
      r.fail("grid: spectral stencil needs every mode to be a multiple of 2 pi / (sites * spacing)");
    bool band = false;
    for (Index j = 0; j < cfg.grid.size(); ++j) {
      const double k = cfg.grid.momentum_norm(j);
      band = band || (k > cfg.model.sigma0 && k <= cfg.model.sigma);
    }
    if (!band) r.fail("grid: no mode lies in the dressed band (sigma0, sigma]");
  }
  read_field(r, doc, cfg, grid_ok);
  read_propagation(r, doc, cfg);
  read_experiments(r, doc, cfg, allow_cases, errors);

  const json* o = r.object(doc, "output", "output");
  r.known_keys(o, "output", {"dir", "format"});
  cfg.out_dir = r.string(o, "dir", cfg.out_dir.string(), "output");
  cfg.format = r.string(o, "format", cfg.format, "output");
  if (cfg.format != "csv" && cfg.format != "json")
    r.fail("output.format: expected \"csv\" or \"json\", got \"" + cfg.format + "\"");

  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned())
      cfg.seed = doc["seed"].get<std::uint64_t>();
    else if (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0)
      cfg.seed = static_cast<std::uint64_t>(doc["seed"].get<std::int64_t>());
    else
      r.fail("seed: expected a non-negative integer");
  }
  return cfg;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error("invalid configuration: " + join(violations)),
      violations_(std::move(violations)) {}

std::optional<double> parse_pi_expression(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ') s += ch;
  if (s.empty()) return std::nullopt;
  const auto number = [](const std::string& t) -> std::optional<double> {
    if (t.empty()) return std::nullopt;
    std::size_t used = 0;
    try {
      const double v = std::stod(t, &used);
      if (used != t.size()) return std::nullopt;
      return v;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  const std::size_t pi = s.find("pi");
  if (pi == std::string::npos) return number(s);
  double scale = 1.0;
  if (pi > 0) {
    if (s[pi - 1] != '*') return std::nullopt;
    const auto a = number(s.substr(0, pi - 1));
    if (!a) return std::nullopt;
    scale = *a;
  }
  const std::string rest = s.substr(pi + 2);
  if (rest.empty()) return scale * kPi;
  if (rest[0] != '/') return std::nullopt;
  const auto b = number(rest.substr(1));
  if (!b || *b == 0.0) return std::nullopt;
  return scale * kPi / *b;
}

ParticleLattice RunConfig::lattice() const {
  return ParticleLattice{model.dim, model.sites, model.spacing, model.particles, model.mass,
                         model.stencil};
}

ModelParams RunConfig::params(double coupling, std::optional<int> n) const {
  return ModelParams{lattice(), grid, coupling, model.sigma, model.sigma0, n.value_or(n_max)};
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError({"syntax error at line " + std::to_string(line) + ", column " +
                       std::to_string(col) + ": " + e.what()});
  }
  std::vector<std::string> errors;
  RunConfig cfg = resolve(doc, errors, true);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

RunConfig resolve_case(const RunConfig& base, const ConfigCase& c) {
  json patched = without_cases(base.source);
  patched.merge_patch(c.patch);
  std::vector<std::string> errors;
  RunConfig cfg = resolve(without_cases(patched), errors, false);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

json echo(const RunConfig& cfg) {
  json modes = json::array();
  for (Index j = 0; j < cfg.grid.size(); ++j) {
    json k = json::array();
    for (int a = 0; a < cfg.grid.dim; ++a) k.push_back(cfg.grid.momenta(a, j));
    modes.push_back(k);
  }
  json alpha = json::array();
  for (Index j = 0; j < cfg.field.alpha.size(); ++j) alpha.push_back(complex_json(cfg.field.alpha(j)));
  json cases = json::array();
  for (const auto& c : cfg.experiments.identity_cases)
    cases.push_back({{"label", c.label}, {"override", c.patch}});
  json field = {{"alpha", alpha}};
  if (cfg.occupancy) field["occupancy"] = *cfg.occupancy;

  return json{
      {"model",
       {{"dim", cfg.model.dim},
        {"sites", cfg.model.sites},
        {"spacing", cfg.model.spacing},
        {"particles", cfg.model.particles},
        {"mass", cfg.model.mass},
        {"mu", cfg.model.mu},
        {"coupling", cfg.model.couplings},
        {"sigma", cfg.model.sigma},
        {"sigma0", cfg.model.sigma0},
        {"stencil", cfg.model.stencil == Stencil::spectral ? "spectral" : "finite_difference"}}},
      {"grid",
       {{"modes", modes},
        {"weights", std::vector<double>(cfg.grid.weights.data(),
                                        cfg.grid.weights.data() + cfg.grid.weights.size())}}},
      {"truncation", {{"n_max", cfg.n_max}}},
      {"field", field},
      {"propagation",
       {{"times", cfg.propagation.times},
        {"steps", cfg.propagation.steps},
        {"step_tol", cfg.propagation.step_tol},
        {"max_doublings", cfg.propagation.max_doublings},
        {"krylov_dim", cfg.propagation.krylov.dim},
        {"krylov_tol", cfg.propagation.krylov.tol}}},
      {"experiments",
       {{"identity",
         {{"n_max", cfg.experiments.identity_n_max},
          {"coupling", cfg.experiments.identity_coupling},
          {"cases", cases}}},
        {"inequalities", {{"trials", cfg.experiments.trials}}},
        {"observables", json::object()},
        {"sweep", json::object()}}},
      {"output", {{"dir", cfg.out_dir.string()}, {"format", cfg.format}}},
      {"seed", cfg.seed}};
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = echo(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nelson

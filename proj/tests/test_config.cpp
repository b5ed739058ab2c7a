#include <doctest.h>

#include <fstream>
#include <sstream>

#include "nelson/config.hpp"

using namespace nelson;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = NELSON_SOURCE_DIR;

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal document takes defaults") {
  const RunConfig cfg = parse_config(R"({"grid": {"modes": [-1.5, 1.5]}})");
  CHECK(cfg.propagation.steps == 64);
  CHECK(cfg.propagation.step_tol == 1e-6);
  CHECK(cfg.n_max == 6);
  CHECK(cfg.format == "csv");
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.model.couplings == std::vector<double>{0.2});
  CHECK(cfg.model.stencil == Stencil::finite_difference);
  CHECK(cfg.grid.size() == 2);
  CHECK(cfg.grid.weights == Eigen::VectorXd::Ones(2));
  CHECK(cfg.experiments.identity_n_max == std::vector<int>{4, 6, 8});
  CHECK(cfg.experiments.trials == 100);
  const ModelParams p = cfg.params(0.1, 3);
  CHECK(p.coupling == 0.1);
  CHECK(p.n_max == 3);
  CHECK(cfg.params(0.1).n_max == 6);
}

TEST_CASE("invalid documents name every violation") {
  const auto v = violations_of(R"({"model": {"sigma": 1.0, "sigma0": 1.0}, "grid": {"modes": [-1.5, 1.5]}})");
  CHECK(mentions(v, "model.sigma0"));

  const auto many = violations_of(
      R"({"model": {"mass": -1, "coupling": [0.1, 0.2]}, "grid": {"modes": [-1.5, 1.5]},
          "propagation": {"steps": 0}, "output": {"format": "xml"}})");
  CHECK(many.size() >= 4);
  CHECK(mentions(many, "model.mass"));
  CHECK(mentions(many, "model.coupling"));
  CHECK(mentions(many, "propagation.steps"));
  CHECK(mentions(many, "output.format"));

  CHECK(mentions(violations_of(R"({"grid": {"modes": [-1.5, 1.5]}, "colour": 1})"), "colour"));
  CHECK(mentions(violations_of(R"({"grid": {"modes": [-1.5, 4.0]}})"), "|k| h"));
  CHECK(mentions(violations_of(R"({"grid": {"modes": [-0.5, 0.5]}})"), "dressed band"));
  CHECK(mentions(violations_of(R"({"model": {"stencil": "spectral"}, "grid": {"modes": [-1.5, 1.5]}})"),
                 "spectral"));
  CHECK(mentions(violations_of(R"({"grid": {"modes": [-1.5, 1.5]}, "field": {"alpha": [3, 3], "occupancy": 40}})"),
                 "occupancy"));
}

TEST_CASE("syntax errors report the line") {
  const auto v = violations_of("{\n  \"grid\": {\n    \"modes\": [1.5,, 2]\n  }\n}");
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "line 3"));
  CHECK_THROWS_AS(load_config(kSource / "configs" / "does_not_exist.json"), ConfigError);
}

TEST_CASE("pi expressions") {
  CHECK(*parse_pi_expression("pi/12") == doctest::Approx(kPi / 12).epsilon(1e-15));
  CHECK(*parse_pi_expression("3*pi/4") == doctest::Approx(0.75 * kPi).epsilon(1e-15));
  CHECK(*parse_pi_expression("2*pi") == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(*parse_pi_expression("pi") == kPi);
  CHECK(*parse_pi_expression("0.25") == 0.25);
  CHECK_FALSE(parse_pi_expression("pie").has_value());
  CHECK_FALSE(parse_pi_expression("pi/0").has_value());
  CHECK_FALSE(parse_pi_expression("").has_value());
  const RunConfig cfg = parse_config(R"({"model": {"spacing": "pi/4"}, "grid": {"modes": [-1.5, 1.5]}})");
  CHECK(cfg.model.spacing == doctest::Approx(kPi / 4).epsilon(1e-15));
}

TEST_CASE("field occupancy rescaling") {
  const RunConfig cfg = parse_config(
      R"({"model": {"coupling": [0.4, 0.1]}, "grid": {"modes": [-1.5, 1.5]},
          "field": {"alpha": [1, [0, 1]], "occupancy": 0.5}})");
  // occupancy is measured at the smallest coupling
  CHECK(cfg.field.norm2() / (0.1 * 0.1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cfg.field.alpha(1).real() == 0.0);
}

TEST_CASE("identity cases resolve as merge patches") {
  const RunConfig desk = load_config(kSource / "configs" / "acceptance_desk.json");
  REQUIRE(desk.experiments.identity_cases.size() == 2);
  const ConfigCase& p2 = desk.experiments.identity_cases[1];
  CHECK(p2.label == "p2");
  const RunConfig resolved = resolve_case(desk, p2);
  CHECK(resolved.model.particles == 2);
  CHECK(resolved.model.sites == 16);
  CHECK(resolved.model.spacing == doctest::Approx(kPi / 4).epsilon(1e-15));
  CHECK(resolved.model.stencil == Stencil::spectral);
  CHECK(resolved.grid.size() == 3);
  CHECK(resolved.model.couplings == desk.model.couplings);
  CHECK(resolved.experiments.identity_cases.empty());

  const auto bad = violations_of(R"({"grid": {"modes": [-1.5, 1.5]},
      "experiments": {"identity": {"cases": [{"label": "x", "override": {"model": {"sigma0": 5}}}]}}})");
  CHECK(mentions(bad, "(x)"));
}

TEST_CASE("echo matches the golden resolution") {
  const RunConfig desk = load_config(kSource / "configs" / "acceptance_desk.json");
  std::ifstream in(kSource / "tests" / "golden" / "acceptance_desk.echo.json");
  REQUIRE(in);
  const json golden = json::parse(in);
  CHECK(echo(desk) == golden);
  // the echo is itself a valid document resolving to the same echo up to rescaling roundoff
  const RunConfig again = parse_config(echo(desk).dump());
  json lhs = echo(again), rhs = echo(desk);
  lhs.erase("field");
  rhs.erase("field");
  CHECK(lhs == rhs);
  CHECK((again.field.alpha - desk.field.alpha).norm() <= 1e-15 * desk.field.alpha.norm());
}

TEST_CASE("config hash") {
  const RunConfig a = load_config(kSource / "configs" / "smoke.json");
  const RunConfig b = load_config(kSource / "configs" / "smoke.json");
  const std::string h = config_hash(a);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  CHECK(h == config_hash(b));
  json doc = a.source;
  doc["seed"] = 8;
  CHECK(config_hash(parse_config(doc.dump())) != h);
}

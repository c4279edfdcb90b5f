#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "ousparse/errors.hpp"
#include "ousparse/scenario.hpp"

using namespace ousparse;
using nlohmann::json;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal config and defaults") {
  const Scenario sc = parse_scenario_text(R"({"d": 4})");
  CHECK(sc.d == 4);
  CHECK(sc.s == 4);
  CHECK(sc.big_t == 100.0);
  CHECK(sc.dt_fine == 0.01);
  CHECK(std::holds_alternative<AutoTruncation>(sc.truncation));
  CHECK(std::holds_alternative<CvTuning>(sc.tuning));
  CHECK(sc.estimators.size() == 4);
  CHECK(sc.seeds == std::vector<std::uint64_t>{1});
  CHECK(sc.tuning_label() == "cv");
  CHECK(std::isnan(sc.sweep_values().front()));
  CHECK(sc.model().sigma == Matrix::Identity(4, 4));
}

TEST_CASE("full config") {
  const Scenario sc = parse_scenario_text(R"({
    "name": "b sweep",
    "d": 3, "s": 5, "big_t": 20, "n_obs": 400,
    "value_range": [-0.8, 0.8],
    "model": {"sigma": [[1, 0, 0], [0.5, 1, 0], [0, 0, 2]],
              "jumps": {"law": "pareto", "alpha": 4.5, "intensity": 2}},
    "truncation": {"mode": "fixed", "b": 1000, "eta": "inf"},
    "estimators": ["lasso", "true_mle"],
    "tuning": {"mode": "cv", "train_fraction": 0.7, "grid": {"lo": 0.01, "hi": 1, "points": 5}},
    "solver": {"max_iters": 500, "rel_tol": 1e-10},
    "seeds": {"count": 3, "start": 7},
    "sweep": {"param": "b", "values": [2, 5, 10]}
  })");
  CHECK(sc.name == "b sweep");
  CHECK(*sc.n_obs == 400);
  CHECK(sc.sigma_matrix->coeff(1, 0) == 0.5);
  CHECK(std::get<SymmetricParetoJumps>(sc.jumps.law).alpha == 4.5);
  CHECK(sc.jumps.intensity == 2.0);
  CHECK(std::isinf(std::get<FixedTruncation>(sc.truncation).eta));
  CHECK(std::get<CvTuning>(sc.tuning).cv.grid.size() == 5);
  CHECK(sc.solver.max_iters == 500);
  CHECK(sc.seeds == std::vector<std::uint64_t>{7, 8, 9});
  CHECK(sc.sweep_values() == std::vector<double>{2, 5, 10});

  const Scenario at5 = sc.at(5.0);
  CHECK_FALSE(at5.sweep.has_value());
  const auto& f = std::get<FixedTruncation>(at5.truncation);
  CHECK(f.b_radius == 5.0);
  CHECK(std::isinf(f.eta));
}

TEST_CASE("sweep application") {
  const Scenario sc = parse_scenario_text(
      R"({"d": 10, "s": 55, "delta_n": 0.1, "sweep": {"param": "d", "values": [10, 20, 50]}})");
  CHECK(sc.at(50).d == 50);
  CHECK(sc.at(50).s == 55);
  const Scenario n = parse_scenario_text(
      R"({"d": 2, "delta_n": 0.1, "sweep": {"param": "n_obs", "values": [80, 100]}})");
  CHECK(*n.at(80).n_obs == 80);
  CHECK_FALSE(n.at(80).delta_n.has_value());
  const Scenario tf = parse_scenario_text(
      R"({"d": 2, "truncation": {"mode": "fixed", "b": 3}, "sweep": {"param": "target_fraction", "values": [0.05]}})");
  CHECK(std::get<AutoTruncation>(tf.at(0.05).truncation).target_fraction == 0.05);
}

TEST_CASE("config errors name the field") {
  CHECK(contains(config_error(R"({"s": 3})"), "'d'"));
  CHECK(contains(config_error(R"({"d": 3, "s": 10})"), "'s'"));
  CHECK(contains(config_error(R"({"d": 3, "s": 2})"), "'s'"));
  CHECK(contains(config_error(R"({"d": 3, "colour": 1})"), "'colour'"));
  CHECK(contains(config_error(R"({"d": 3, "model": {"jumps": {"law": "cauchy"}}})"), "model.jumps.law"));
  CHECK(contains(config_error(R"({"d": 3, "model": {"jumps": {"law": "pareto", "alpha": 2}}})"), "model.jumps"));
  CHECK(contains(config_error(R"({"d": 3, "tuning": {"mode": "fixed"}})"), "tuning.lambda"));
  CHECK(contains(config_error(R"({"d": 3, "tuning": {"mode": "cv", "grid": [0.1, -1]}})"), "tuning"));
  CHECK(contains(config_error(R"({"d": 3, "estimators": ["lasso", "ridge"]})"), "estimators[1]"));
  CHECK(contains(config_error(R"({"d": 3, "seeds": []})"), "seeds"));
  CHECK(contains(config_error(R"({"d": 3, "n_obs": 10, "delta_n": 0.1})"), "n_obs"));
  CHECK(contains(config_error(R"({"d": 3, "sweep": {"param": "colour", "values": [1]}})"), "sweep.param"));
  CHECK(contains(config_error(R"({"d": 3, "s": 3, "sweep": {"param": "d", "values": [2.5]}})"), "sweep"));
  CHECK(contains(config_error(R"({"d": 2, "truncation": {"mode": "fixed", "b": 0}})"), "truncation"));
  CHECK(contains(config_error(R"({"d": "three"})"), "'d'"));
  CHECK(contains(config_error("[1, 2]"), "object"));
}

TEST_CASE("syntax errors carry the line number") {
  const std::string msg = config_error("{\n  \"d\": 3,\n  \"s\": ,\n}");
  CHECK(contains(msg, "line 3"));
  CHECK_THROWS_AS(load_scenario(std::filesystem::path("/nonexistent/config.json")), ConfigError);
}

TEST_CASE("scenario hash ignores key order and whitespace") {
  const json a = json::parse(R"({"d": 3, "s": 5, "model": {"sigma": 1, "jumps": {"law": "laplace", "intensity": 1}}})");
  const json b = json::parse(R"({"model": {"jumps": {"intensity": 1, "law": "laplace"}, "sigma": 1},
                                 "s": 5,   "d": 3})");
  CHECK(scenario_hash(a) == scenario_hash(b));
  CHECK(scenario_hash(a).size() == 16);
  const json c = json::parse(R"({"d": 3, "s": 6, "model": {"sigma": 1, "jumps": {"law": "laplace", "intensity": 1}}})");
  CHECK(scenario_hash(a) != scenario_hash(c));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("shipped configs parse") {
  const std::filesystem::path dir = std::filesystem::path(OUSPARSE_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    CHECK_NOTHROW(load_scenario(entry.path()));
    ++count;
  }
  CHECK(count >= 5);
}

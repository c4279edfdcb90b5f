#include "ousparse/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ousparse/errors.hpp"

namespace ousparse {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError("config field '" + field + "': " + msg);
}

double as_number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  fail(field, "expected a number (or \"inf\")");
}

double number_or(const json& obj, const char* key, double fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  return as_number(obj.at(key), path + key);
}

Eigen::Index as_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() && !(j.is_number() && std::floor(j.get<double>()) == j.get<double>())) {
    fail(field, "expected an integer");
  }
  const auto v = j.get<long long>();
  if (v < 0) fail(field, "expected a nonnegative integer");
  return static_cast<Eigen::Index>(v);
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) fail(path + key, "unknown field");
  }
}

JumpSpec parse_jumps(const json& j) {
  const std::string path = "model.jumps.";
  if (!j.is_object()) fail("model.jumps", "expected an object");
  reject_unknown(j, {"law", "intensity", "scale", "alpha", "x_min"}, path);
  JumpSpec spec;
  const std::string law = j.contains("law") ? as_string(j.at("law"), path + "law") : "none";
  spec.intensity = number_or(j, "intensity", law == "none" ? 0.0 : 1.0, path);
  if (law == "none") {
    spec.law = NoJumps{};
  } else if (law == "laplace") {
    spec.law = LaplaceJumps{number_or(j, "scale", 1.0, path)};
  } else if (law == "pareto" || law == "symmetric_pareto") {
    spec.law = SymmetricParetoJumps{number_or(j, "alpha", 4.5, path), number_or(j, "x_min", 1.0, path)};
  } else {
    fail(path + "law", "expected one of none, laplace, pareto");
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    fail("model.jumps", e.what());
  }
  return spec;
}

TailClass parse_tail(const json& j) {
  const std::string path = "truncation.tail.";
  if (!j.is_object()) fail("truncation.tail", "expected an object");
  const std::string cls = as_string(j.value("class", json("")), path + "class");
  if (cls == "continuous") return ContinuousTail{};
  if (cls == "bounded") return BoundedJumpsTail{number_or(j, "a0", 1.0, path)};
  if (cls == "sub_weibull") {
    return SubWeibullTail{number_or(j, "alpha", 1.0, path), number_or(j, "c_alpha", 1.0, path)};
  }
  if (cls == "poly_moment") return PolyMomentTail{number_or(j, "p", 2.0, path)};
  fail(path + "class", "expected one of continuous, bounded, sub_weibull, poly_moment");
}

TruncationMode parse_truncation(const json& j) {
  if (!j.is_object()) fail("truncation", "expected an object");
  const std::string mode = j.contains("mode") ? as_string(j.at("mode"), "truncation.mode") : "auto";
  const std::string path = "truncation.";
  if (mode == "auto") {
    reject_unknown(j, {"mode", "target_fraction"}, path);
    return AutoTruncation{number_or(j, "target_fraction", 0.10, path)};
  }
  if (mode == "fixed") {
    reject_unknown(j, {"mode", "b", "eta"}, path);
    return FixedTruncation{number_or(j, "b", kNoTruncation, path),
                           number_or(j, "eta", kNoTruncation, path)};
  }
  if (mode == "theoretical") {
    reject_unknown(j, {"mode", "tail", "b_scale", "delta_exponent"}, path);
    TheoreticalTruncation t;
    if (!j.contains("tail")) fail("truncation.tail", "required in theoretical mode");
    t.theory.tail = parse_tail(j.at("tail"));
    t.theory.delta_exponent = number_or(j, "delta_exponent", 1.0, path);
    t.b_scale = number_or(j, "b_scale", 3.0, path);
    return t;
  }
  fail("truncation.mode", "expected one of auto, fixed, theoretical");
}

TuningMode parse_tuning(const json& j) {
  if (!j.is_object()) fail("tuning", "expected an object");
  const std::string mode = j.contains("mode") ? as_string(j.at("mode"), "tuning.mode") : "cv";
  const std::string path = "tuning.";
  if (mode == "cv") {
    reject_unknown(j, {"mode", "train_fraction", "grid"}, path);
    CvTuning cv;
    cv.cv.train_fraction = number_or(j, "train_fraction", 0.8, path);
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (g.is_array()) {
        cv.cv.grid.clear();
        for (std::size_t k = 0; k < g.size(); ++k) {
          cv.cv.grid.push_back(as_number(g[k], path + "grid[" + std::to_string(k) + "]"));
        }
      } else if (g.is_object()) {
        reject_unknown(g, {"lo", "hi", "points"}, path + "grid.");
        const int points = g.contains("points") ? static_cast<int>(as_count(g.at("points"), path + "grid.points")) : 30;
        try {
          cv.cv.grid = log_grid(number_or(g, "lo", 1e-3, path + "grid."),
                                number_or(g, "hi", 10.0, path + "grid."), points);
        } catch (const std::exception& e) {
          fail(path + "grid", e.what());
        }
      } else {
        fail(path + "grid", "expected an array or {lo, hi, points}");
      }
    }
    return cv;
  }
  if (mode == "fixed") {
    reject_unknown(j, {"mode", "lambda"}, path);
    if (!j.contains("lambda")) fail("tuning.lambda", "required in fixed mode");
    return FixedLambda{as_number(j.at("lambda"), "tuning.lambda")};
  }
  if (mode == "theoretical") {
    reject_unknown(j, {"mode", "c_star"}, path);
    return TheoreticalLambda{number_or(j, "c_star", 1.0, path)};
  }
  fail("tuning.mode", "expected one of cv, fixed, theoretical");
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "d") return SweepParam::D;
  if (name == "s") return SweepParam::S;
  if (name == "big_t") return SweepParam::BigT;
  if (name == "n_obs") return SweepParam::NObs;
  if (name == "delta_n") return SweepParam::DeltaN;
  if (name == "b") return SweepParam::BRadius;
  if (name == "eta") return SweepParam::Eta;
  if (name == "intensity") return SweepParam::Intensity;
  if (name == "target_fraction") return SweepParam::TargetFraction;
  fail("sweep.param", "unknown sweep parameter '" + name + "'");
}

}  // namespace

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::D: return "d";
    case SweepParam::S: return "s";
    case SweepParam::BigT: return "big_t";
    case SweepParam::NObs: return "n_obs";
    case SweepParam::DeltaN: return "delta_n";
    case SweepParam::BRadius: return "b";
    case SweepParam::Eta: return "eta";
    case SweepParam::Intensity: return "intensity";
    case SweepParam::TargetFraction: return "target_fraction";
  }
  return "unknown";
}

Scenario parse_scenario(const json& config) {
  if (!config.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown(config,
                 {"name", "d", "s", "big_t", "dt_fine", "n_obs", "delta_n", "value_range", "model",
                  "truncation", "estimators", "tuning", "solver", "seeds", "sweep", "zero_tol",
                  "mc_draws"},
                 "");
  Scenario sc;
  sc.source = config;
  if (config.contains("name")) sc.name = as_string(config.at("name"), "name");
  if (!config.contains("d")) fail("d", "required");
  sc.d = as_count(config.at("d"), "d");
  sc.s = config.contains("s") ? as_count(config.at("s"), "s") : sc.d;
  sc.big_t = number_or(config, "big_t", 100.0, "");
  sc.dt_fine = number_or(config, "dt_fine", 1e-2, "");
  if (config.contains("n_obs") && !config.at("n_obs").is_null()) sc.n_obs = as_count(config.at("n_obs"), "n_obs");
  if (config.contains("delta_n") && !config.at("delta_n").is_null()) sc.delta_n = as_number(config.at("delta_n"), "delta_n");
  if (config.contains("value_range")) {
    const json& vr = config.at("value_range");
    if (!vr.is_array() || vr.size() != 2) fail("value_range", "expected [lo, hi]");
    sc.value_range = {as_number(vr[0], "value_range[0]"), as_number(vr[1], "value_range[1]")};
  }
  if (config.contains("model")) {
    const json& m = config.at("model");
    if (!m.is_object()) fail("model", "expected an object");
    reject_unknown(m, {"sigma", "jumps"}, "model.");
    if (m.contains("sigma")) {
      const json& sg = m.at("sigma");
      if (sg.is_number()) {
        sc.sigma_scale = sg.get<double>();
      } else if (sg.is_array()) {
        const auto rows = static_cast<Eigen::Index>(sg.size());
        Matrix sigma(rows, rows);
        for (Eigen::Index i = 0; i < rows; ++i) {
          const json& row = sg[static_cast<std::size_t>(i)];
          if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            fail("model.sigma", "expected a square matrix");
          }
          for (Eigen::Index k = 0; k < rows; ++k) {
            sigma(i, k) = as_number(row[static_cast<std::size_t>(k)], "model.sigma");
          }
        }
        sc.sigma_matrix = sigma;
      } else {
        fail("model.sigma", "expected a scale or a square matrix");
      }
    }
    if (m.contains("jumps")) sc.jumps = parse_jumps(m.at("jumps"));
  }
  if (config.contains("truncation")) sc.truncation = parse_truncation(config.at("truncation"));
  if (config.contains("estimators")) {
    const json& e = config.at("estimators");
    if (!e.is_array() || e.empty()) fail("estimators", "expected a nonempty array");
    sc.estimators.clear();
    for (std::size_t k = 0; k < e.size(); ++k) {
      const std::string field = "estimators[" + std::to_string(k) + "]";
      try {
        sc.estimators.push_back(estimator_from_string(as_string(e[k], field)));
      } catch (const DomainError& err) {
        fail(field, err.what());
      }
    }
  }
  if (config.contains("tuning")) sc.tuning = parse_tuning(config.at("tuning"));
  if (config.contains("solver")) {
    const json& sv = config.at("solver");
    if (!sv.is_object()) fail("solver", "expected an object");
    reject_unknown(sv, {"max_iters", "rel_tol"}, "solver.");
    if (sv.contains("max_iters")) sc.solver.max_iters = static_cast<int>(as_count(sv.at("max_iters"), "solver.max_iters"));
    sc.solver.rel_tol = number_or(sv, "rel_tol", sc.solver.rel_tol, "solver.");
  }
  if (config.contains("seeds")) {
    const json& sd = config.at("seeds");
    sc.seeds.clear();
    if (sd.is_array()) {
      for (std::size_t k = 0; k < sd.size(); ++k) {
        sc.seeds.push_back(static_cast<std::uint64_t>(as_count(sd[k], "seeds[" + std::to_string(k) + "]")));
      }
    } else if (sd.is_object()) {
      reject_unknown(sd, {"count", "start"}, "seeds.");
      const auto count = sd.contains("count") ? as_count(sd.at("count"), "seeds.count") : 10;
      const auto start = sd.contains("start") ? as_count(sd.at("start"), "seeds.start") : 1;
      for (Eigen::Index k = 0; k < count; ++k) sc.seeds.push_back(static_cast<std::uint64_t>(start + k));
    } else {
      fail("seeds", "expected an array or {count, start}");
    }
  }
  if (config.contains("sweep") && !config.at("sweep").is_null()) {
    const json& sw = config.at("sweep");
    if (!sw.is_object()) fail("sweep", "expected an object");
    reject_unknown(sw, {"param", "values"}, "sweep.");
    Sweep sweep;
    sweep.param = parse_sweep_param(as_string(sw.value("param", json("")), "sweep.param"));
    const json& vals = sw.value("values", json::array());
    if (!vals.is_array() || vals.empty()) fail("sweep.values", "expected a nonempty array");
    for (std::size_t k = 0; k < vals.size(); ++k) {
      sweep.values.push_back(as_number(vals[k], "sweep.values[" + std::to_string(k) + "]"));
    }
    sc.sweep = sweep;
  }
  sc.zero_tol = number_or(config, "zero_tol", 1e-6, "");
  if (config.contains("mc_draws")) sc.mc_draws = as_count(config.at("mc_draws"), "mc_draws");

  sc.validate();
  if (sc.sweep) {
    for (double v : sc.sweep->values) {
      try {
        sc.at(v).validate();
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " (at sweep value " + std::to_string(v) + ")");
      }
    }
  }
  return sc;
}

void Scenario::validate() const {
  if (d < 1) fail("d", "must be >= 1");
  if (!sweep || (sweep->param != SweepParam::D && sweep->param != SweepParam::S)) {
    if (s < d || s > d * d) fail("s", "must satisfy d <= s <= d^2");
  }
  if (!(big_t > 0.0)) fail("big_t", "must be > 0");
  if (!(dt_fine > 0.0)) fail("dt_fine", "must be > 0");
  if (n_obs && delta_n) fail("n_obs", "give either n_obs or delta_n, not both");
  if (n_obs && *n_obs < 2) fail("n_obs", "must be >= 2");
  if (delta_n && !(*delta_n > 0.0)) fail("delta_n", "must be > 0");
  if (!(value_range.first < value_range.second)) fail("value_range", "must satisfy lo < hi");
  if (sigma_matrix && sigma_matrix->rows() != d) fail("model.sigma", "dimension differs from d");
  if (!std::isfinite(sigma_scale)) fail("model.sigma", "must be finite");
  if (seeds.empty()) fail("seeds", "must be nonempty");
  if (!(zero_tol >= 0.0)) fail("zero_tol", "must be >= 0");
  if (mc_draws < 1) fail("mc_draws", "must be >= 1");
  try {
    solver.validate();
    jumps.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (const auto* a = std::get_if<AutoTruncation>(&truncation);
      a && !(a->target_fraction > 0.0 && a->target_fraction < 1.0)) {
    fail("truncation.target_fraction", "must lie in (0, 1)");
  }
  if (const auto* f = std::get_if<FixedTruncation>(&truncation);
      f && (!(f->b_radius > 0.0) || !(f->eta > 0.0))) {
    fail("truncation", "b and eta must be > 0");
  }
  if (const auto* t = std::get_if<TheoreticalTruncation>(&truncation)) {
    try {
      t->theory.validate();
    } catch (const std::exception& e) {
      fail("truncation.tail", e.what());
    }
    if (!(t->b_scale > 0.0)) fail("truncation.b_scale", "must be > 0");
  }
  if (const auto* cv = std::get_if<CvTuning>(&tuning)) {
    try {
      cv->cv.validate();
    } catch (const std::exception& e) {
      fail("tuning", e.what());
    }
  }
  if (const auto* fl = std::get_if<FixedLambda>(&tuning); fl && !(fl->lambda >= 0.0)) {
    fail("tuning.lambda", "must be >= 0");
  }
  if (const auto* th = std::get_if<TheoreticalLambda>(&tuning); th && !(th->c_star > 0.0)) {
    fail("tuning.c_star", "must be > 0");
  }
}

Scenario Scenario::at(double value) const {
  Scenario sc = *this;
  sc.sweep.reset();
  if (!sweep) return sc;
  const auto as_index = [&](const char* field) {
    if (!(value >= 0.0) || std::floor(value) != value) fail(field, "sweep value must be an integer");
    return static_cast<Eigen::Index>(value);
  };
  switch (sweep->param) {
    case SweepParam::D: sc.d = as_index("sweep.values"); break;
    case SweepParam::S: sc.s = as_index("sweep.values"); break;
    case SweepParam::BigT: sc.big_t = value; break;
    case SweepParam::NObs:
      sc.n_obs = as_index("sweep.values");
      sc.delta_n.reset();
      break;
    case SweepParam::DeltaN:
      sc.delta_n = value;
      sc.n_obs.reset();
      break;
    case SweepParam::BRadius:
    case SweepParam::Eta: {
      FixedTruncation f;
      if (const auto* cur = std::get_if<FixedTruncation>(&truncation)) f = *cur;
      (sweep->param == SweepParam::BRadius ? f.b_radius : f.eta) = value;
      sc.truncation = f;
      break;
    }
    case SweepParam::Intensity: sc.jumps.intensity = value; break;
    case SweepParam::TargetFraction: sc.truncation = AutoTruncation{value}; break;
  }
  return sc;
}

std::vector<double> Scenario::sweep_values() const {
  if (!sweep) return {std::numeric_limits<double>::quiet_NaN()};
  return sweep->values;
}

LevyModel Scenario::model() const {
  LevyModel m;
  m.sigma = sigma_matrix ? *sigma_matrix : Matrix(Matrix::Identity(d, d) * sigma_scale);
  m.jumps = jumps;
  return m;
}

std::string Scenario::tuning_label() const {
  if (std::holds_alternative<CvTuning>(tuning)) return "cv";
  if (std::holds_alternative<FixedLambda>(tuning)) return "fixed";
  return "oracle";
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

Scenario parse_scenario_text(const std::string& text) {
  json config;
  try {
    config = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw ConfigError("config parse error at line " + std::to_string(line) + ": " + e.what());
  }
  return parse_scenario(config);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k) {
    out[static_cast<std::size_t>(k)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

std::string scenario_hash(const json& config) { return fnv1a_hex(config.dump()); }

}  // namespace ousparse

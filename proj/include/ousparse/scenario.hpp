#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ousparse/estimators.hpp"
#include "ousparse/levy.hpp"
#include "ousparse/tuning.hpp"

namespace ousparse {

struct AutoTruncation {
  double target_fraction = 0.10;
};
struct FixedTruncation {
  double b_radius = kNoTruncation;
  double eta = kNoTruncation;
};
/// eta from the tail-class formula, b = b_scale * sqrt(d). Needs the truth.
struct TheoreticalTruncation {
  TheoryInputs theory;
  double b_scale = 3.0;
};
using TruncationMode = std::variant<AutoTruncation, FixedTruncation, TheoreticalTruncation>;

struct CvTuning {
  CvConfig cv;
};
struct FixedLambda {
  double lambda = 0.0;
};
/// "Oracle tuning": Theorem-style lambda computed from the true model.
struct TheoreticalLambda {
  double c_star = 1.0;
};
using TuningMode = std::variant<CvTuning, FixedLambda, TheoreticalLambda>;

enum class SweepParam { D, S, BigT, NObs, DeltaN, BRadius, Eta, Intensity, TargetFraction };
std::string_view to_string(SweepParam p);

struct Sweep {
  SweepParam param = SweepParam::D;
  std::vector<double> values;
};

/// One experiment: model, sampling design, estimators and their tuning.
struct Scenario {
  std::string name = "scenario";
  Eigen::Index d = 1;
  Eigen::Index s = 1;
  double big_t = 100.0;
  double dt_fine = 1e-2;
  /// Number of observation windows; defaults to every fine step.
  std::optional<Eigen::Index> n_obs;
  /// Alternative to n_obs: coarse spacing, n = round(T / delta_n).
  std::optional<double> delta_n;
  std::pair<double, double> value_range{-0.5, 0.5};
  /// Sigma = sigma_scale * I unless an explicit matrix is given.
  double sigma_scale = 1.0;
  std::optional<Matrix> sigma_matrix;
  JumpSpec jumps;
  TruncationMode truncation = AutoTruncation{};
  std::vector<EstimatorKind> estimators{EstimatorKind::Lasso, EstimatorKind::Slope,
                                        EstimatorKind::TruncatedMle, EstimatorKind::TrueMle};
  TuningMode tuning = CvTuning{};
  SolverConfig solver;
  std::vector<std::uint64_t> seeds{1};
  std::optional<Sweep> sweep;
  double zero_tol = 1e-6;
  Eigen::Index mc_draws = 1'000'000;

  /// Canonical JSON echo of the configuration (keys sorted).
  nlohmann::json source;

  void validate() const;
  /// Scenario with the sweep parameter fixed to `value` (and no sweep).
  [[nodiscard]] Scenario at(double value) const;
  [[nodiscard]] std::vector<double> sweep_values() const;
  [[nodiscard]] LevyModel model() const;
  [[nodiscard]] std::string tuning_label() const;
};

Scenario parse_scenario(const nlohmann::json& config);
/// Reads a JSON config file; parse errors carry the line number.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text);

/// 64-bit FNV-1a of the canonical JSON, as 16 hex digits. Insensitive to key order.
std::string scenario_hash(const nlohmann::json& config);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace ousparse

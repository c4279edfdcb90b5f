#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ousparse/estimators.hpp"
#include "ousparse/ou.hpp"
#include "ousparse/scenario.hpp"
#include "ousparse/tuning.hpp"

namespace ousparse {

/// One row of runs.csv: a (sweep value, seed, estimator) cell.
struct RunRecord {
  std::string scenario_hash;
  std::string sweep_param;  // empty without a sweep
  double sweep_value = 0.0; // NaN without a sweep
  std::uint64_t seed = 0;
  std::string estimator;
  std::string tuning;
  std::string status = "ok";
  double lambda = 0.0;
  double b_radius = 0.0;
  double eta = 0.0;
  double kept_fraction = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  Eigen::Index correct = 0;
  Eigen::Index missed = 0;
  Eigen::Index spurious = 0;
  int iters = 0;
  double wall_time = 0.0;  // seconds; reported in timings.csv only
};

struct CvTrace {
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::string family;
  CvResult result;
};

/// Everything one (sweep value, seed) cell produced.
struct CellResult {
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::optional<DriftMatrix> truth;
  TruncationConfig truncation;
  std::vector<RunRecord> records;
  std::vector<DriftEstimate> estimates;  // parallel to records; empty a_hat on failure
  std::vector<CvTrace> cv;
};

struct RunOptions {
  int workers = 1;
  std::uint64_t seed_offset = 0;
};

/// Observation count implied by the scenario (n_obs, T / delta_n, or every fine step).
Eigen::Index observation_count(const Scenario& sc);

/// Runs a single cell of a scenario at one sweep value (ignored without a
/// sweep). `only` restricts the estimators, as replay does.
CellResult run_cell(const Scenario& sc, double sweep_value, std::uint64_t seed,
                    std::uint64_t seed_offset, std::optional<EstimatorKind> only = std::nullopt);

/// All cells of a scenario in canonical order (sweep value major, then seed).
std::vector<CellResult> run_cells(const Scenario& sc, const RunOptions& opts);

/// Runs a scenario and writes runs.csv, summary.csv, timings.csv, cv.csv,
/// plots/*.svg and manifest.json into `out_dir`.
std::vector<RunRecord> run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                                    const RunOptions& opts);
std::vector<RunRecord> run_scenario(const std::filesystem::path& config,
                                    const std::filesystem::path& out_dir, const RunOptions& opts);

struct ReplayResult {
  RunRecord recorded;
  RunRecord replayed;
  DriftEstimate estimate;
};

/// Re-executes one recorded cell from an output directory and checks that l1
/// and l2 match the record to 1e-12. Throws LookupError when the record is
/// missing or the manifest, config hash or metrics disagree.
ReplayResult replay(const std::filesystem::path& out_dir, std::uint64_t seed,
                    EstimatorKind estimator, std::optional<double> sweep_value = std::nullopt);

}  // namespace ousparse

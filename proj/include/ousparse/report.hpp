#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ousparse/runner.hpp"

namespace ousparse::report {

inline constexpr const char* kRunsHeader =
    "scenario_hash,sweep_param,sweep_value,seed,estimator,tuning,status,lambda,b,eta,"
    "kept_fraction,l1,l2,correct,missed,spurious,iters";

void write_runs_csv(const std::vector<RunRecord>& records, std::ostream& out);
std::vector<RunRecord> read_runs_csv(std::istream& in);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  double median = 0.0;
};
Stat describe(std::vector<double> values);

struct SummaryRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string estimator;
  int ok = 0;
  int failed = 0;
  Stat l1;
  Stat l2;
  Stat kept_fraction;
  Stat lambda;
  Stat spurious;
  Stat missed;
};

/// Aggregates successful rows per (sweep value, estimator) in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
void write_timings_csv(const std::vector<RunRecord>& records, std::ostream& out);
void write_cv_csv(const std::vector<CellResult>& cells, std::ostream& out);

/// Line chart of one summary statistic against the sweep value with shaded
/// +-1 std bands, one series per estimator.
enum class PlotMetric { L1, L2, KeptFraction };
std::string svg_plot(const std::vector<SummaryRow>& rows, PlotMetric metric, const std::string& title);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

}  // namespace ousparse::report

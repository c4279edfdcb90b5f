#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>

#include "ousparse/errors.hpp"
#include "ousparse/report.hpp"
#include "ousparse/runner.hpp"
#include "ousparse/scenario.hpp"
#include "ousparse/trajectory_io.hpp"

namespace {

int cmd_run(const std::string& config, const std::string& out, int workers, std::uint64_t offset) {
  const ousparse::Scenario sc = ousparse::load_scenario(config);
  ousparse::RunOptions opts;
  opts.workers = workers;
  opts.seed_offset = offset;
  const auto records = ousparse::run_scenario(sc, out, opts);
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.status != "ok";
  std::cout << sc.name << ": " << records.size() << " records (" << failed << " failed), hash "
            << ousparse::scenario_hash(sc.source) << ", written to " << out << "\n";
  for (const auto& row : ousparse::report::summarize(records)) {
    std::cout << "  ";
    if (!row.sweep_param.empty()) {
      std::cout << row.sweep_param << "=" << ousparse::io::format_double(row.sweep_value) << " ";
    }
    std::cout << row.estimator << ": median l2 " << row.l2.median << ", mean l2 " << row.l2.mean
              << " +- " << row.l2.std << " (" << row.ok << " ok)\n";
  }
  return 0;
}

int cmd_replay(const std::string& dir, std::uint64_t seed, const std::string& estimator,
               std::optional<double> sweep_value) {
  const auto kind = ousparse::estimator_from_string(estimator);
  const auto res = ousparse::replay(dir, seed, kind, sweep_value);
  std::cout.precision(17);
  std::cout << "seed " << seed << ", " << estimator;
  if (!res.recorded.sweep_param.empty()) {
    std::cout << ", " << res.recorded.sweep_param << "=" << res.recorded.sweep_value;
  }
  std::cout << "\n  recorded: status " << res.recorded.status << " l1 " << res.recorded.l1 << " l2 "
            << res.recorded.l2 << "\n  replayed: status " << res.replayed.status << " l1 "
            << res.replayed.l1 << " l2 " << res.replayed.l2 << "\n  match\n";
  if (res.estimate.a_hat.size() > 0) {
    std::cout.precision(6);
    std::cout << "estimate (lambda " << res.estimate.lambda << "):\n" << res.estimate.a_hat << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse drift estimation for Levy-driven OU processes"};
  app.set_version_flag("--version", std::string(OUSPARSE_VERSION));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario config and write its artifacts");
  std::string config;
  std::string out_dir;
  int workers = 1;
  std::uint64_t seed_offset = 0;
  run->add_option("config", config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed-offset", seed_offset, "Added to every seed");

  auto* rep = app.add_subcommand("replay", "Re-execute one recorded cell and verify it");
  std::string replay_dir;
  std::uint64_t seed = 0;
  std::string estimator;
  std::optional<double> sweep_value;
  rep->add_option("dir", replay_dir, "Output directory of a previous run")->required();
  rep->add_option("--seed", seed, "Seed of the record")->required();
  rep->add_option("--estimator", estimator, "lasso, slope, truncated_mle or true_mle")->required();
  rep->add_option("--sweep-value", sweep_value, "Sweep value of the record");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config, out_dir, workers, seed_offset);
    return cmd_replay(replay_dir, seed, estimator, sweep_value);
  } catch (const ousparse::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ousparse::LookupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

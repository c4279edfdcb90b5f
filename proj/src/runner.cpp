#include "ousparse/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "ousparse/contrast.hpp"
#include "ousparse/errors.hpp"
#include "ousparse/metrics.hpp"
#include "ousparse/report.hpp"

namespace ousparse {

namespace {

constexpr std::uint64_t kDriftStream = 1;
constexpr std::uint64_t kSimulationStream = 2;
constexpr std::uint64_t kMonteCarloStream = 3;

std::string status_of(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return "diverged";
  if (dynamic_cast<const RankError*>(&e)) return "rank_deficient";
  if (dynamic_cast<const StabilityError*>(&e)) return "unstable";
  return "error";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunRecord blank_record(const Scenario& sc, const std::string& hash, const std::string& sweep_param,
                       double sweep_value, std::uint64_t seed, EstimatorKind kind) {
  RunRecord r;
  r.scenario_hash = hash;
  r.sweep_param = sweep_param;
  r.sweep_value = sweep_value;
  r.seed = seed;
  r.estimator = std::string(to_string(kind));
  const bool penalized = kind == EstimatorKind::Lasso || kind == EstimatorKind::Slope;
  r.tuning = penalized ? sc.tuning_label() : "none";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.lambda = nan;
  r.b_radius = nan;
  r.eta = nan;
  r.kept_fraction = nan;
  r.l1 = nan;
  r.l2 = nan;
  return r;
}

PenaltyFamily family_of(EstimatorKind kind) {
  return kind == EstimatorKind::Lasso ? PenaltyFamily::Lasso : PenaltyFamily::Slope;
}

}  // namespace

Eigen::Index observation_count(const Scenario& sc) {
  if (sc.n_obs) return *sc.n_obs;
  const double step = sc.delta_n ? *sc.delta_n : sc.dt_fine;
  return static_cast<Eigen::Index>(std::llround(sc.big_t / step));
}

CellResult run_cell(const Scenario& scenario, double sweep_value, std::uint64_t seed,
                    std::uint64_t seed_offset, std::optional<EstimatorKind> only) {
  const auto cell_start = std::chrono::steady_clock::now();
  const std::string hash = scenario_hash(scenario.source);
  const std::string sweep_param =
      scenario.sweep ? std::string(to_string(scenario.sweep->param)) : std::string();
  const Scenario sc = scenario.sweep ? scenario.at(sweep_value) : scenario;
  CellResult cell;
  cell.sweep_value = sweep_value;
  cell.seed = seed;

  std::vector<EstimatorKind> kinds;
  for (EstimatorKind k : sc.estimators) {
    if (!only || *only == k) kinds.push_back(k);
  }
  const auto fail_all = [&](const std::exception& e) {
    for (EstimatorKind k : kinds) {
      RunRecord r = blank_record(sc, hash, sweep_param, sweep_value, seed, k);
      r.status = status_of(e);
      r.b_radius = cell.truncation.b_radius;
      r.eta = cell.truncation.eta;
      r.wall_time = seconds_since(cell_start);
      cell.records.push_back(std::move(r));
      cell.estimates.emplace_back();
    }
  };

  const Rng root(seed + seed_offset);
  const LevyModel model = sc.model();
  ObservationSet obs;
  try {
    Rng drift_rng = root.split(kDriftStream);
    cell.truth = generate_sparse_stable_drift(sc.d, sc.s, sc.value_range, drift_rng);
    Rng sim_rng = root.split(kSimulationStream);
    const Vector x0 = stationary_start(*cell.truth, model, sim_rng, sc.dt_fine);
    const Trajectory traj = simulate_euler(*cell.truth, model, x0, sc.big_t, sim_rng, sc.dt_fine);
    obs = subsample(traj, observation_count(sc));

    if (const auto* a = std::get_if<AutoTruncation>(&sc.truncation)) {
      cell.truncation = pick_truncation(obs, a->target_fraction);
    } else if (const auto* f = std::get_if<FixedTruncation>(&sc.truncation)) {
      cell.truncation = {f->b_radius, f->eta};
    } else {
      const auto& t = std::get<TheoreticalTruncation>(sc.truncation);
      cell.truncation.b_radius = t.b_scale * std::sqrt(static_cast<double>(sc.d));
      cell.truncation.eta = theoretical_eta(t.theory, obs.big_t, obs.delta_n, sc.d,
                                            model_bounds(*cell.truth, model));
    }
  } catch (const std::exception& e) {
    fail_all(e);
    return cell;
  }

  std::optional<EmpiricalMoments> moments;
  std::optional<GammaInputs> gamma;
  for (EstimatorKind kind : kinds) {
    const auto start = std::chrono::steady_clock::now();
    RunRecord r = blank_record(sc, hash, sweep_param, sweep_value, seed, kind);
    r.b_radius = cell.truncation.b_radius;
    r.eta = cell.truncation.eta;
    DriftEstimate est;
    try {
      if (!moments) moments = empirical_moments(obs, cell.truncation);
      switch (kind) {
        case EstimatorKind::Lasso:
        case EstimatorKind::Slope: {
          const PenaltyFamily fam = family_of(kind);
          double lambda = 0.0;
          if (const auto* cv = std::get_if<CvTuning>(&sc.tuning)) {
            CvResult res = cross_validate(obs, cell.truncation, fam, cv->cv, sc.solver);
            lambda = res.best_lambda;
            cell.cv.push_back({sweep_value, seed, r.estimator, std::move(res)});
          } else if (const auto* fl = std::get_if<FixedLambda>(&sc.tuning)) {
            lambda = fl->lambda;
          } else {
            const auto& th = std::get<TheoreticalLambda>(sc.tuning);
            if (!gamma) {
              Rng mc_rng = root.split(kMonteCarloStream);
              gamma = model_gamma_inputs(*cell.truth, model, cell.truncation.b_radius, mc_rng,
                                         sc.mc_draws);
            }
            lambda = theoretical_lambda(fam, obs.big_t, obs.delta_n, sc.d, cell.truth->sparsity,
                                        *gamma, th.c_star);
          }
          est = kind == EstimatorKind::Lasso ? lasso(*moments, lambda, sc.solver)
                                             : slope(*moments, lambda, sc.solver);
          break;
        }
        case EstimatorKind::TruncatedMle: est = truncated_mle(*moments); break;
        case EstimatorKind::TrueMle: est = true_mle(obs); break;
      }
      r.lambda = est.lambda;
      r.kept_fraction = est.kept_fraction;
      r.iters = est.iters_used;
      const ErrorPair err = l1_l2_errors(est.a_hat, cell.truth->a0);
      r.l1 = err.l1;
      r.l2 = err.l2;
      const SupportReport sup = support_report(est.a_hat, cell.truth->a0, sc.zero_tol);
      r.correct = sup.correct;
      r.missed = sup.missed;
      r.spurious = sup.spurious;
    } catch (const std::exception& e) {
      r.status = status_of(e);
      est = DriftEstimate{};
      est.kind = kind;
    }
    r.wall_time = seconds_since(start);
    cell.records.push_back(std::move(r));
    cell.estimates.push_back(std::move(est));
  }
  return cell;
}

std::vector<CellResult> run_cells(const Scenario& sc, const RunOptions& opts) {
  if (opts.workers < 1) throw ConfigError("workers must be >= 1");
  struct Job {
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (double v : sc.sweep_values()) {
    for (std::uint64_t seed : sc.seeds) jobs.push_back({v, seed});
  }

  std::vector<CellResult> cells(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        cells[k] = run_cell(sc, jobs[k].value, jobs[k].seed, opts.seed_offset);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(opts.workers);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(n_threads, jobs.size()); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return cells;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

std::vector<RunRecord> run_scenario(const Scenario& sc, const std::filesystem::path& out_dir,
                                    const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<CellResult> cells = run_cells(sc, opts);
  std::vector<RunRecord> records;
  for (const auto& c : cells) records.insert(records.end(), c.records.begin(), c.records.end());

  std::filesystem::create_directories(out_dir / "plots");
  std::ostringstream runs;
  report::write_runs_csv(records, runs);
  const auto summary_rows = report::summarize(records);
  std::ostringstream summary;
  report::write_summary_csv(summary_rows, summary);
  std::ostringstream timings;
  report::write_timings_csv(records, timings);
  std::ostringstream cv;
  report::write_cv_csv(cells, cv);

  write_text(out_dir / "runs.csv", runs.str());
  write_text(out_dir / "summary.csv", summary.str());
  write_text(out_dir / "timings.csv", timings.str());
  write_text(out_dir / "cv.csv", cv.str());
  const std::string label = sc.name + (sc.sweep ? " vs " + std::string(to_string(sc.sweep->param)) : "");
  write_text(out_dir / "plots" / "l1.svg",
             report::svg_plot(summary_rows, report::PlotMetric::L1, "L1 error, " + label));
  write_text(out_dir / "plots" / "l2.svg",
             report::svg_plot(summary_rows, report::PlotMetric::L2, "L2 error, " + label));
  write_text(out_dir / "plots" / "kept_fraction.svg",
             report::svg_plot(summary_rows, report::PlotMetric::KeptFraction,
                              "kept fraction, " + label));

  std::size_t failures = 0;
  for (const auto& r : records) failures += r.status != "ok";
  nlohmann::json manifest;
  manifest["tool"] = "ousparse";
  manifest["version"] = OUSPARSE_VERSION;
  manifest["scenario_hash"] = scenario_hash(sc.source);
  manifest["config"] = sc.source;
  manifest["seed_offset"] = opts.seed_offset;
  manifest["cells"] = cells.size();
  manifest["records"] = records.size();
  manifest["failures"] = failures;
  manifest["files"] = {{"runs.csv", fnv1a_hex(runs.str())},
                       {"summary.csv", fnv1a_hex(summary.str())},
                       {"cv.csv", fnv1a_hex(cv.str())}};
  manifest["elapsed_seconds"] = seconds_since(start);
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return records;
}

std::vector<RunRecord> run_scenario(const std::filesystem::path& config,
                                    const std::filesystem::path& out_dir, const RunOptions& opts) {
  return run_scenario(load_scenario(config), out_dir, opts);
}

ReplayResult replay(const std::filesystem::path& out_dir, std::uint64_t seed,
                    EstimatorKind estimator, std::optional<double> sweep_value) {
  std::ifstream mf(out_dir / "manifest.json");
  if (!mf) throw LookupError("no manifest.json in '" + out_dir.string() + "'");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(mf);
  } catch (const nlohmann::json::exception& e) {
    throw LookupError(std::string("manifest.json is unreadable: ") + e.what());
  }
  if (!manifest.contains("config") || !manifest.contains("scenario_hash")) {
    throw LookupError("manifest.json lacks the config echo or scenario hash");
  }
  const std::string hash = scenario_hash(manifest.at("config"));
  if (manifest.at("scenario_hash").get<std::string>() != hash) {
    throw LookupError("scenario hash mismatch: manifest says " +
                      manifest.at("scenario_hash").get<std::string>() + ", config hashes to " + hash);
  }
  std::ifstream rf(out_dir / "runs.csv", std::ios::binary);
  if (!rf) throw LookupError("no runs.csv in '" + out_dir.string() + "'");
  const std::vector<RunRecord> records = report::read_runs_csv(rf);

  const std::string name(to_string(estimator));
  std::optional<RunRecord> found;
  for (const auto& r : records) {
    if (r.scenario_hash != hash) {
      throw LookupError("scenario hash mismatch in runs.csv: " + r.scenario_hash + " vs " + hash);
    }
    if (r.seed != seed || r.estimator != name) continue;
    if (sweep_value && !(r.sweep_value == *sweep_value)) continue;
    if (found) {
      throw LookupError("several records match seed " + std::to_string(seed) + " and estimator " +
                        name + "; pass a sweep value");
    }
    found = r;
  }
  if (!found) {
    throw LookupError("no record for seed " + std::to_string(seed) + " and estimator " + name);
  }

  const Scenario sc = parse_scenario(manifest.at("config"));
  const std::uint64_t offset = manifest.value("seed_offset", std::uint64_t{0});
  CellResult cell = run_cell(sc, found->sweep_value, seed, offset, estimator);
  if (cell.records.size() != 1) throw LookupError("replay produced no record");

  ReplayResult result{*found, cell.records.front(), std::move(cell.estimates.front())};
  if (result.replayed.status != found->status) {
    throw LookupError("replay status '" + result.replayed.status + "' differs from recorded '" +
                      found->status + "'");
  }
  if (found->status == "ok") {
    const bool l1_ok = std::abs(result.replayed.l1 - found->l1) <= 1e-12;
    const bool l2_ok = std::abs(result.replayed.l2 - found->l2) <= 1e-12;
    if (!l1_ok || !l2_ok) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "replay mismatch: recorded l1=" << found->l1 << " l2=" << found->l2
          << ", replayed l1=" << result.replayed.l1 << " l2=" << result.replayed.l2;
      throw LookupError(msg.str());
    }
  }
  return result;
}

}  // namespace ousparse

#include "ousparse/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ousparse/errors.hpp"
#include "ousparse/linalg.hpp"

namespace ousparse {

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw DomainError("log_grid: bad range");
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < points; ++k) {
    grid[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

void CvConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train_fraction must lie in (0, 1)");
  }
  if (grid.empty()) throw DomainError("cross-validation grid is empty");
  for (double l : grid) {
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("grid values must be positive and finite");
  }
}

CvResult cross_validate(const ObservationSet& obs, const TruncationConfig& trunc,
                        PenaltyFamily family, const CvConfig& cfg, const SolverConfig& solver) {
  cfg.validate();
  const Eigen::Index n = obs.windows();
  const auto n_train = static_cast<Eigen::Index>(
      std::floor(cfg.train_fraction * static_cast<double>(n) + 1e-9));
  if (n_train < 1 || n_train >= n) {
    throw DomainError("cross_validate: training or validation segment is empty (n=" +
                      std::to_string(n) + ")");
  }
  const EmpiricalMoments train = empirical_moments(obs.segment(0, n_train), trunc);
  const EmpiricalMoments valid = empirical_moments(obs.segment(n_train, n - n_train), trunc);

  CvResult result;
  result.table.reserve(cfg.grid.size());
  double best_score = std::numeric_limits<double>::infinity();
  result.best_lambda = cfg.grid.front();
  for (double lambda : cfg.grid) {
    const DriftEstimate est = family == PenaltyFamily::Lasso ? lasso(train, lambda, solver)
                                                             : slope(train, lambda, solver);
    const double score = pseudo_likelihood(est.a_hat, valid);
    result.table.push_back({lambda, score, est.iters_used});
    if (score < best_score || (score == best_score && lambda < result.best_lambda)) {
      best_score = score;
      result.best_lambda = lambda;
    }
  }
  return result;
}

namespace {

double smallest_admissible_threshold(std::vector<double> values, double target_fraction) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  const auto allowed = static_cast<std::size_t>(
      std::floor(target_fraction * static_cast<double>(n) + 1e-9));
  // Everything up to and including the (n - allowed)-th smallest value is kept.
  const double r = values[n - allowed - 1];
  return std::max(r + 1e-12, std::nextafter(r, std::numeric_limits<double>::infinity()));
}

}  // namespace

TruncationConfig pick_truncation(const ObservationSet& obs, double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction < 1.0)) {
    throw DomainError("target_fraction must lie in (0, 1)");
  }
  const Eigen::Index n = obs.windows();
  if (n < 10) throw DomainError("pick_truncation: need at least 10 windows");
  std::vector<double> state_norms(static_cast<std::size_t>(n));
  std::vector<double> incr_norms(static_cast<std::size_t>(n));
  for (Eigen::Index i = 1; i <= n; ++i) {
    state_norms[static_cast<std::size_t>(i - 1)] = obs.obs.col(i - 1).norm();
    incr_norms[static_cast<std::size_t>(i - 1)] = (obs.obs.col(i) - obs.obs.col(i - 1)).norm();
  }
  TruncationConfig trunc;
  trunc.b_radius = smallest_admissible_threshold(std::move(state_norms), target_fraction);
  trunc.eta = smallest_admissible_threshold(std::move(incr_norms), target_fraction);
  return trunc;
}

void TheoryInputs::validate() const {
  if (!(delta_exponent > 0.0)) throw DomainError("delta exponent must be > 0");
  if (!(c_star > 0.0)) throw DomainError("c_star must be > 0");
  if (const auto* b = std::get_if<BoundedJumpsTail>(&tail); b && !(b->a0 > 0.0)) {
    throw DomainError("bounded-jump radius a0 must be > 0");
  }
  if (const auto* w = std::get_if<SubWeibullTail>(&tail);
      w && (!(w->alpha > 0.0) || !(w->c_alpha > 0.0))) {
    throw DomainError("sub-Weibull parameters must be > 0");
  }
  if (const auto* p = std::get_if<PolyMomentTail>(&tail); p && !(p->p >= 2.0)) {
    throw DomainError("polynomial moment order p must be >= 2");
  }
}

double theoretical_eta(const TheoryInputs& inputs, double big_t, double delta_n, Eigen::Index d,
                       const ModelBounds& bounds) {
  inputs.validate();
  if (!(big_t > 1.0)) throw DomainError("theoretical_eta: T must exceed 1");
  if (!(delta_n >= 0.0) || d < 1 || !(bounds.a0_norm >= 0.0) || !(bounds.lambda_max_noise >= 0.0)) {
    throw DomainError("theoretical_eta: parameters must be nonnegative");
  }
  const double dim = static_cast<double>(d);
  const double log_t = std::log(big_t);
  const double delta = inputs.delta_exponent;
  const double lam = bounds.lambda_max_noise;
  const double growth = std::exp(delta_n * bounds.a0_norm);

  if (std::holds_alternative<ContinuousTail>(inputs.tail)) {
    return std::sqrt(32.0 * delta * log_t * dim * delta_n * growth * growth * lam);
  }
  if (const auto* b = std::get_if<BoundedJumpsTail>(&inputs.tail)) {
    const double gauss = std::sqrt(32.0 * delta_n * lam);
    const double jump = 8.0 / 3.0 * b->a0 * std::sqrt(delta * log_t);
    return std::sqrt(dim * delta * log_t) * growth * std::max(gauss, jump);
  }
  if (const auto* w = std::get_if<SubWeibullTail>(&inputs.tail)) {
    const double gauss = std::sqrt(32.0 * delta * log_t * lam);
    const double jump = 8.0 * delta * std::pow(log_t, 1.0 + 1.0 / w->alpha) /
                        (3.0 * std::pow(w->c_alpha, 1.0 / w->alpha));
    return std::sqrt(dim) * growth * std::max(gauss, jump);
  }
  const auto& p = std::get<PolyMomentTail>(inputs.tail);
  return std::pow(big_t, 1.0 / p.p) * std::pow(dim, 0.5 - 1.0 / p.p);
}

double gamma_factor(const GammaInputs& g, double delta_n) {
  return g.lambda_max_noise * std::max(g.lambda_max_cinf_b, 1.0) * std::exp(delta_n * g.a0_norm);
}

double theoretical_lambda(PenaltyFamily kind, double big_t, double delta_n, Eigen::Index d,
                          Eigen::Index s, const GammaInputs& gamma, double c_star) {
  if (d < 1 || s < 1 || s > d * d) throw DomainError("theoretical_lambda: s must lie in [1, d^2]");
  if (!(big_t > 0.0)) throw DomainError("theoretical_lambda: T must be > 0");
  const double g = gamma_factor(gamma, delta_n);
  if (kind == PenaltyFamily::Slope) return 2.0 * c_star * std::sqrt(g / big_t);
  const double dd = static_cast<double>(d) * static_cast<double>(d);
  const double log_term = std::log(2.0 * std::numbers::e * dd / static_cast<double>(s));
  return 2.0 * c_star * std::sqrt(log_term * g / big_t);
}

ModelBounds model_bounds(const DriftMatrix& drift, const LevyModel& model) {
  ModelBounds b;
  b.a0_norm = linalg::spectral_norm(drift.a0);
  b.lambda_max_noise = linalg::lambda_max_sym((cov_brownian(model) + nu2_matrix(model)).eval());
  return b;
}

GammaInputs model_gamma_inputs(const DriftMatrix& drift, const LevyModel& model, double b_radius,
                               Rng& rng, Eigen::Index mc_draws) {
  const ModelBounds b = model_bounds(drift, model);
  GammaInputs g;
  g.a0_norm = b.a0_norm;
  g.lambda_max_noise = b.lambda_max_noise;
  const Matrix c_inf = stationary_covariance(drift, model);
  const Matrix c_b = truncated_stationary_covariance(c_inf, b_radius, rng, mc_draws);
  g.lambda_max_cinf_b = linalg::lambda_max_sym(c_b);
  return g;
}

}  // namespace ousparse

#include "ousparse/estimators.hpp"

#include <cmath>
#include <limits>

#include "ousparse/errors.hpp"
#include "ousparse/linalg.hpp"

namespace ousparse {

namespace {

constexpr double kRankTol = 1e-12;

double frob_dot(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

Matrix solve_first_order(const Matrix& h, const Matrix& c) {
  const auto [lo, hi] = linalg::eig_extremes_sym(c);
  if (!(hi > 0.0) || !(lo > kRankTol * hi)) {
    throw RankError(
        "likelihood design matrix is numerically singular; increase b or eta, or observe longer");
  }
  Eigen::LDLT<Matrix> ldlt(c);
  return -ldlt.solve(h.transpose()).transpose();
}

}  // namespace

double penalty_value(const Penalty& pen, const Matrix& a) {
  if (const auto* l1 = std::get_if<L1Penalty>(&pen)) return l1->lambda * a.cwiseAbs().sum();
  if (const auto* sl = std::get_if<SlopePenalty>(&pen)) return sorted_l1_norm(a, sl->weights);
  return 0.0;
}

Matrix penalty_prox(const Penalty& pen, const Matrix& v, double step) {
  const Eigen::Map<const Vector> flat(v.data(), v.size());
  Vector out;
  if (const auto* l1 = std::get_if<L1Penalty>(&pen)) {
    out = prox_l1(flat, l1->lambda * step);
  } else if (const auto* sl = std::get_if<SlopePenalty>(&pen)) {
    out = prox_sorted_l1(flat, sl->weights.weights * step);
  } else {
    return v;
  }
  return Eigen::Map<const Matrix>(out.data(), v.rows(), v.cols());
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Lasso: return "lasso";
    case EstimatorKind::Slope: return "slope";
    case EstimatorKind::TruncatedMle: return "truncated_mle";
    case EstimatorKind::TrueMle: return "true_mle";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(std::string_view name) {
  if (name == "lasso") return EstimatorKind::Lasso;
  if (name == "slope") return EstimatorKind::Slope;
  if (name == "truncated_mle") return EstimatorKind::TruncatedMle;
  if (name == "true_mle") return EstimatorKind::TrueMle;
  throw DomainError("unknown estimator '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
}

double composite_objective(const EmpiricalMoments& moments, const Penalty& penalty, const Matrix& a) {
  return pseudo_likelihood(a, moments) + penalty_value(penalty, a);
}

DriftEstimate fista_minimize(const EmpiricalMoments& m, const Penalty& penalty,
                             const SolverConfig& cfg, const Matrix& init) {
  cfg.validate();
  const Eigen::Index d = m.dim();
  if (init.rows() != d || init.cols() != d) throw DimensionError("fista_minimize: init shape");
  if (!m.c_hat_eta.allFinite() || !m.h_hat.allFinite()) {
    throw DomainError("fista_minimize: non-finite moments");
  }
  const Matrix& c = m.c_hat_eta;
  const Matrix& h = m.h_hat;

  double lip = linalg::lambda_max_sym(c);
  if (!(lip > 0.0)) lip = 1.0;  // no kept data: objective is the penalty alone

  auto smooth = [&](const Matrix& a, const Matrix& ac) { return frob_dot(a, h) + 0.5 * frob_dot(a, ac); };

  Matrix x = init;
  Matrix xc = x * c;
  double fx = smooth(x, xc) + penalty_value(penalty, x);
  if (!std::isfinite(fx)) throw DivergenceError("fista_minimize: non-finite initial objective");
  Matrix x_prev = x;
  Matrix xc_prev = xc;
  Matrix y = x;
  Matrix yc = xc;
  double t = 1.0;
  bool just_restarted = true;

  DriftEstimate est;
  if (cfg.record_trace) est.objective_trace.push_back(fx);
  int iter = 0;
  while (iter < cfg.max_iters) {
    ++iter;
    const Matrix grad = h + yc;
    const double fy = smooth(y, yc);
    Matrix z;
    Matrix zc;
    double fz_smooth = 0.0;
    for (int bt = 0;; ++bt) {
      z = penalty_prox(penalty, y - grad / lip, 1.0 / lip);
      zc.noalias() = z * c;
      fz_smooth = smooth(z, zc);
      const Matrix step = z - y;
      const double bound = fy + frob_dot(grad, step) + 0.5 * lip * step.squaredNorm();
      if (fz_smooth <= bound + 1e-12 * (std::abs(bound) + 1.0) || bt >= 60) break;
      lip *= 2.0;
    }
    const double fz = fz_smooth + penalty_value(penalty, z);
    if (!std::isfinite(fz)) throw DivergenceError("fista_minimize: objective became non-finite");

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    if (fz <= fx) {
      const double change = fx - fz;
      const double scale = std::max({std::abs(fx), std::abs(fz), std::numeric_limits<double>::min()});
      const bool restart = frob_dot(y - z, z - x) > 0.0;
      x_prev = std::move(x);
      xc_prev = std::move(xc);
      x = z;
      xc = zc;
      fx = fz;
      if (cfg.record_trace) est.objective_trace.push_back(fx);
      if (change <= cfg.rel_tol * scale) break;
      if (restart) {
        t = 1.0;
        y = x;
        yc = xc;
        just_restarted = true;
      } else {
        const double beta = (t - 1.0) / t_next;
        y = x + beta * (x - x_prev);
        yc = xc + beta * (xc - xc_prev);
        t = t_next;
        just_restarted = false;
      }
    } else {
      if (cfg.record_trace) est.objective_trace.push_back(fx);
      // A plain proximal-gradient step from x failed to decrease: x is optimal to rounding.
      if (just_restarted) break;
      // Momentum carried us uphill; restart from the accepted point.
      t = 1.0;
      y = x;
      yc = xc;
      just_restarted = true;
    }
  }

  est.a_hat = std::move(x);
  est.iters_used = iter;
  est.final_objective = fx;
  est.kept_fraction = m.kept_fraction;
  if (const auto* l1 = std::get_if<L1Penalty>(&penalty)) {
    est.kind = EstimatorKind::Lasso;
    est.lambda = l1->lambda;
  } else if (const auto* sl = std::get_if<SlopePenalty>(&penalty)) {
    est.kind = EstimatorKind::Slope;
    est.lambda = sl->lambda;
  }
  return est;
}

DriftEstimate lasso(const EmpiricalMoments& moments, double lambda, const SolverConfig& cfg) {
  if (!(lambda >= 0.0)) throw DomainError("lasso: lambda must be >= 0");
  const Eigen::Index d = moments.dim();
  return fista_minimize(moments, L1Penalty{lambda}, cfg, Matrix::Zero(d, d));
}

DriftEstimate lasso(const ObservationSet& obs, const TruncationConfig& trunc, double lambda,
                    const SolverConfig& cfg) {
  return lasso(empirical_moments(obs, trunc), lambda, cfg);
}

DriftEstimate slope(const EmpiricalMoments& moments, double lambda, const SolverConfig& cfg) {
  if (!(lambda >= 0.0)) throw DomainError("slope: lambda must be >= 0");
  const Eigen::Index d = moments.dim();
  return fista_minimize(moments, SlopePenalty{SlopeWeights::for_matrix(d, lambda), lambda}, cfg,
                        Matrix::Zero(d, d));
}

DriftEstimate slope(const ObservationSet& obs, const TruncationConfig& trunc, double lambda,
                    const SolverConfig& cfg) {
  return slope(empirical_moments(obs, trunc), lambda, cfg);
}

DriftEstimate truncated_mle(const EmpiricalMoments& moments) {
  DriftEstimate est;
  est.kind = EstimatorKind::TruncatedMle;
  est.a_hat = solve_first_order(moments.h_hat, moments.c_hat_eta);
  est.final_objective = pseudo_likelihood(est.a_hat, moments);
  est.kept_fraction = moments.kept_fraction;
  return est;
}

DriftEstimate truncated_mle(const ObservationSet& obs, const TruncationConfig& trunc) {
  return truncated_mle(empirical_moments(obs, trunc));
}

DriftEstimate true_mle(const ObservationSet& obs) {
  const EmpiricalMoments m = continuous_part_moments(obs);
  DriftEstimate est;
  est.kind = EstimatorKind::TrueMle;
  est.a_hat = solve_first_order(m.h_hat, m.c_hat);
  est.final_objective = pseudo_likelihood(est.a_hat, m);
  est.kept_fraction = 1.0;
  return est;
}

}  // namespace ousparse

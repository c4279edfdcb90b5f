#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ousparse/contrast.hpp"
#include "ousparse/ou.hpp"
#include "ousparse/prox.hpp"

namespace ousparse {

struct NoPenalty {};
struct L1Penalty {
  double lambda = 0.0;
};
/// Sorted-l1 penalty; the weights already include the tuning parameter.
struct SlopePenalty {
  SlopeWeights weights;
  double lambda = 0.0;
};
using Penalty = std::variant<NoPenalty, L1Penalty, SlopePenalty>;

double penalty_value(const Penalty& pen, const Matrix& a);
/// prox of step * penalty evaluated at v.
Matrix penalty_prox(const Penalty& pen, const Matrix& v, double step);

enum class EstimatorKind { Lasso, Slope, TruncatedMle, TrueMle };
std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);

struct SolverConfig {
  int max_iters = 10000;
  double rel_tol = 1e-8;
  /// Keep the accepted objective value of every iteration.
  bool record_trace = false;

  void validate() const;
};

struct DriftEstimate {
  Matrix a_hat;
  EstimatorKind kind = EstimatorKind::TruncatedMle;
  double lambda = 0.0;
  int iters_used = 0;
  double final_objective = 0.0;
  double kept_fraction = 0.0;
  std::vector<double> objective_trace;
};

/// Minimizes L(A) + penalty(A) given the moments, by accelerated proximal
/// gradient with step 1/L, L = lambda_max(C_eta). The accepted iterate is
/// monotone in the objective (MFISTA), momentum restarts when the step turns
/// against the last move, and the step halves whenever the quadratic upper
/// bound fails. Stops on relative objective change below rel_tol.
DriftEstimate fista_minimize(const EmpiricalMoments& moments, const Penalty& penalty,
                             const SolverConfig& cfg, const Matrix& init);

/// Composite objective L(A) + penalty(A).
double composite_objective(const EmpiricalMoments& moments, const Penalty& penalty, const Matrix& a);

DriftEstimate lasso(const EmpiricalMoments& moments, double lambda, const SolverConfig& cfg = {});
DriftEstimate lasso(const ObservationSet& obs, const TruncationConfig& trunc, double lambda,
                    const SolverConfig& cfg = {});

DriftEstimate slope(const EmpiricalMoments& moments, double lambda, const SolverConfig& cfg = {});
DriftEstimate slope(const ObservationSet& obs, const TruncationConfig& trunc, double lambda,
                    const SolverConfig& cfg = {});

/// A = -H C_eta^{-1}. Throws RankError when lambda_min(C_eta) <= 1e-12 lambda_max.
DriftEstimate truncated_mle(const EmpiricalMoments& moments);
DriftEstimate truncated_mle(const ObservationSet& obs, const TruncationConfig& trunc);

/// Unfiltered likelihood built on the continuous-part increments.
DriftEstimate true_mle(const ObservationSet& obs);

}  // namespace ousparse

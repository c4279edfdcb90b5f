#pragma once

#include <variant>
#include <vector>

#include "ousparse/contrast.hpp"
#include "ousparse/estimators.hpp"
#include "ousparse/levy.hpp"
#include "ousparse/ou.hpp"

namespace ousparse {

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

struct CvConfig {
  double train_fraction = 0.8;
  std::vector<double> grid = log_grid(1e-3, 10.0, 30);

  void validate() const;
};

enum class PenaltyFamily { Lasso, Slope };

struct CvRow {
  double lambda = 0.0;
  double validation_score = 0.0;
  int iters = 0;
};

struct CvResult {
  double best_lambda = 0.0;
  std::vector<CvRow> table;  // grid order
};

/// Fits on the leading train_fraction of the windows, scores each lambda by
/// the truncated pseudo-likelihood on the remaining windows, and returns the
/// minimizer (ties go to the smaller lambda).
CvResult cross_validate(const ObservationSet& obs, const TruncationConfig& trunc,
                        PenaltyFamily family, const CvConfig& cfg = {},
                        const SolverConfig& solver = {});

/// Smallest b and eta such that each filter on its own removes at most
/// floor(target_fraction * n) windows (strict indicators).
TruncationConfig pick_truncation(const ObservationSet& obs, double target_fraction = 0.10);

struct ContinuousTail {};
struct BoundedJumpsTail {
  double a0 = 1.0;
};
struct SubWeibullTail {
  double alpha = 1.0;
  double c_alpha = 1.0;
};
struct PolyMomentTail {
  double p = 2.0;
};
using TailClass = std::variant<ContinuousTail, BoundedJumpsTail, SubWeibullTail, PolyMomentTail>;

struct TheoryInputs {
  TailClass tail = ContinuousTail{};
  /// Growth exponent of n in T (n <= c_delta T^delta).
  double delta_exponent = 1.0;
  /// Universal constant of the oracle inequality; not known numerically.
  double c_star = 1.0;

  void validate() const;
};

/// Truth-dependent quantities the theoretical formulas need.
struct ModelBounds {
  double a0_norm = 0.0;           // spectral norm of A0
  double lambda_max_noise = 0.0;  // lambda_max(C + nu_2)
};

/// Minimal truncation level guaranteeing the truncation-bias condition for the
/// given tail class.
double theoretical_eta(const TheoryInputs& inputs, double big_t, double delta_n, Eigen::Index d,
                       const ModelBounds& bounds);

struct GammaInputs {
  double lambda_max_noise = 0.0;  // lambda_max(C + nu_2)
  double lambda_max_cinf_b = 0.0; // lambda_max(C_inf(B))
  double a0_norm = 0.0;
};

/// lambda_max(C + nu_2) * max(lambda_max(C_inf(B)), 1) * exp(delta_n ||A0||).
double gamma_factor(const GammaInputs& g, double delta_n);

/// Lower bounds of the oracle inequalities, returned with equality:
///   Lasso: 2 c* sqrt(log(2 e d^2 / s) gamma / T)
///   Slope: 2 c* sqrt(gamma / T)
double theoretical_lambda(PenaltyFamily kind, double big_t, double delta_n, Eigen::Index d,
                          Eigen::Index s, const GammaInputs& gamma, double c_star);

/// Evaluates the truth-dependent inputs for a simulated scenario. C_inf(B) comes
/// from the Lyapunov solution when b is infinite and from Monte Carlo otherwise.
GammaInputs model_gamma_inputs(const DriftMatrix& drift, const LevyModel& model, double b_radius,
                               Rng& rng, Eigen::Index mc_draws = 1'000'000);
ModelBounds model_bounds(const DriftMatrix& drift, const LevyModel& model);

}  // namespace ousparse

#pragma once

#include <optional>
#include <utility>

#include "ousparse/levy.hpp"
#include "ousparse/rng.hpp"
#include "ousparse/types.hpp"

namespace ousparse {

inline constexpr double kDefaultFineStep = 1e-2;
inline constexpr double kDivergenceNorm = 1e12;

/// Fine-grid path. Column k of `states` is X at time k*dt_fine; column k of
/// `jump_ledger` is the jump vector added during step k -> k+1.
struct Trajectory {
  double dt_fine = kDefaultFineStep;
  Matrix states;
  Matrix jump_ledger;

  [[nodiscard]] Eigen::Index dim() const { return states.rows(); }
  [[nodiscard]] Eigen::Index steps() const { return jump_ledger.cols(); }
  [[nodiscard]] double total_time() const { return static_cast<double>(steps()) * dt_fine; }
};

/// n+1 equidistant states X_{t_0..t_n} with t_i = i * delta_n and T = n * delta_n.
struct ObservationSet {
  double delta_n = 0.0;
  double big_t = 0.0;
  Matrix obs;
  /// Continuous-part increments, one column per window; simulation only.
  std::optional<Matrix> cont_increments;

  [[nodiscard]] Eigen::Index dim() const { return obs.rows(); }
  [[nodiscard]] Eigen::Index windows() const { return obs.cols() > 0 ? obs.cols() - 1 : 0; }

  /// Windows [first, first+count) as a standalone set (shares the grid step).
  [[nodiscard]] ObservationSet segment(Eigen::Index first, Eigen::Index count) const;
};

ObservationSet make_observations(Matrix obs, double delta_n,
                                 std::optional<Matrix> cont_increments = std::nullopt);

struct DriftMatrix {
  Matrix a0;
  Eigen::Index sparsity = 0;
};

/// Applies the diagonal-dominance recipe to a matrix of off-diagonal entries:
/// a_ii = sum_{j != i} |a_ij| + 0.1. The input diagonal is ignored.
DriftMatrix drift_from_offdiagonal(const Matrix& offdiag);

/// Random s-sparse drift: s - d off-diagonal slots chosen uniformly and filled
/// with U[lo, hi], then the diagonal recipe above. Stability is verified.
DriftMatrix generate_sparse_stable_drift(Eigen::Index d, Eigen::Index s,
                                         std::pair<double, double> value_range, Rng& rng);

/// Euler-Maruyama: X_{k+1} = X_k - dt A0 X_k + dZ_k.
Trajectory simulate_euler(const DriftMatrix& drift, const LevyModel& model, const Vector& x0,
                          double total_time, Rng& rng, double dt_fine = kDefaultFineStep);

/// Draw from (or approximate) the invariant law: exact Gaussian for pure
/// Brownian models, otherwise the endpoint of a burn-in of 10 / min Re(eig A0)
/// time units started at the origin.
Vector stationary_start(const DriftMatrix& drift, const LevyModel& model, Rng& rng,
                        double dt_fine = kDefaultFineStep);

/// Stationary covariance solving A0 C + C A0^T = C_brownian + nu_2.
Matrix stationary_covariance(const DriftMatrix& drift, const LevyModel& model);

/// Keeps fine-grid indices round(k * steps / n), k = 0..n, and reconstructs
/// the continuous-part increments from the jump ledger.
ObservationSet subsample(const Trajectory& traj, Eigen::Index n);

/// Exact law of X_{t+dt} given X_t = x for a pure-Brownian model:
/// N(e^{-dt A0} x, C_inf - e^{-dt A0} C_inf e^{-dt A0^T}).
class GaussianTransition {
 public:
  GaussianTransition(const DriftMatrix& drift, const LevyModel& model, double dt);

  [[nodiscard]] Vector mean(const Vector& x) const { return propagator_ * x; }
  [[nodiscard]] const Matrix& covariance() const { return covariance_; }
  Vector sample(const Vector& x, Rng& rng) const;

 private:
  double dt_;
  Matrix propagator_;
  Matrix covariance_;
  Matrix factor_;
};

Vector exact_gaussian_transition(const DriftMatrix& drift, const LevyModel& model,
                                 const Vector& x, double dt, Rng& rng);

}  // namespace ousparse

#pragma once

#include <limits>

#include "ousparse/ou.hpp"
#include "ousparse/rng.hpp"
#include "ousparse/types.hpp"

namespace ousparse {

inline constexpr double kNoTruncation = std::numeric_limits<double>::infinity();

/// Localization ball B(0, b) (open) and increment threshold eta. Infinity
/// disables the corresponding filter.
struct TruncationConfig {
  double b_radius = kNoTruncation;
  double eta = kNoTruncation;

  void validate() const;
};

/// Sufficient statistics of the truncated pseudo-likelihood.
///
///   c_hat     = (dt/T) sum X X^T 1_B
///   c_hat_eta = (dt/T) sum X X^T 1_B 1_eta
///   h_hat     = (1/T)  sum dX X^T 1_B 1_eta
///   sq_incr   = (1/T)  sum |dX|^2 1_B 1_eta
///
/// with X = X_{t_{i-1}}, dX = X_{t_i} - X_{t_{i-1}}.
struct EmpiricalMoments {
  Matrix c_hat;
  Matrix c_hat_eta;
  Matrix h_hat;
  double sq_incr = 0.0;
  double kept_fraction = 0.0;
  Eigen::Index kept = 0;
  Eigen::Index windows = 0;
  double delta_n = 0.0;
  double big_t = 0.0;

  [[nodiscard]] Eigen::Index dim() const { return c_hat.rows(); }
};

/// True when window i (1-based) passes both strict filters.
bool window_kept(const ObservationSet& obs, const TruncationConfig& trunc, Eigen::Index i);

EmpiricalMoments empirical_moments(const ObservationSet& obs, const TruncationConfig& trunc);

/// Untruncated moments with h_hat built from the continuous-part increments.
/// Throws UnsupportedError when the set carries no continuous increments.
EmpiricalMoments continuous_part_moments(const ObservationSet& obs);

/// L(A) = (1/T) sum (A X)^T dX 1 + (dt/2T) sum |A X|^2 1, summed window by window.
double pseudo_likelihood(const Matrix& a, const ObservationSet& obs, const TruncationConfig& trunc);

/// Same value from the moments: tr(A h^T) + tr(A C_eta A^T) / 2.
double pseudo_likelihood(const Matrix& a, const EmpiricalMoments& m);

/// grad L(A) = h_hat + A C_eta.
Matrix gradient(const Matrix& a, const EmpiricalMoments& m);
Matrix gradient(const Matrix& a, const ObservationSet& obs, const TruncationConfig& trunc);

/// R_T(A) = (1/T) sum |dX + dt A X|^2 1 = 2 dt L(A) + sq_incr.
double contrast_rt(const Matrix& a, const ObservationSet& obs, const TruncationConfig& trunc);

/// |M X|^2_{l2_n(B,X,eta)} = tr(M C_eta M^T).
double empirical_pred_norm(const Matrix& m, const EmpiricalMoments& moments);
double empirical_pred_norm(const Matrix& m, const ObservationSet& obs, const TruncationConfig& trunc);

/// Monte-Carlo estimate of C_inf(B) = E[Y Y^T 1{|Y| < b}] for Y ~ N(0, c_inf).
/// Returns c_inf itself when b is infinite.
Matrix truncated_stationary_covariance(const Matrix& c_inf, double b_radius, Rng& rng,
                                       Eigen::Index draws = 1'000'000);

}  // namespace ousparse

#pragma once

#include "ousparse/types.hpp"

namespace ousparse {

/// Slope weights lambda * sqrt(log(2p / j)), j = 1..p, for a p-entry vector.
/// Strictly positive and nonincreasing; the last entry is lambda * sqrt(log 2).
struct SlopeWeights {
  Vector weights;

  static SlopeWeights for_size(Eigen::Index p, double lambda);
  static SlopeWeights for_matrix(Eigen::Index d, double lambda) { return for_size(d * d, lambda); }
  [[nodiscard]] Eigen::Index size() const { return weights.size(); }
};

/// sum_j w_j |v|_(j) with |v|_(1) >= |v|_(2) >= ...; matrices are vectorized column-major.
double sorted_l1_norm(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& w);
double sorted_l1_norm(const Matrix& m, const SlopeWeights& w);

/// Soft thresholding sign(v) max(|v| - tau, 0).
Vector prox_l1(const Eigen::Ref<const Vector>& v, double tau);

/// argmin_x 0.5 |x - v|^2 + sum_j w_j |x|_(j) for nonincreasing, nonnegative w.
Vector prox_sorted_l1(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& w);

}  // namespace ousparse

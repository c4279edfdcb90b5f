#pragma once

#include "ousparse/types.hpp"

namespace ousparse {

struct ErrorPair {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Entrywise l1 and l2 norms of a_hat - a0.
ErrorPair l1_l2_errors(const Matrix& a_hat, const Matrix& a0);

/// Entry classification against the true support; |x| <= zero_tol counts as zero.
struct SupportReport {
  Eigen::Index correct = 0;   // both zero or both nonzero
  Eigen::Index missed = 0;    // true nonzero, estimated zero
  Eigen::Index spurious = 0;  // true zero, estimated nonzero
  double zero_tol = 1e-6;
};

SupportReport support_report(const Matrix& a_hat, const Matrix& a0, double zero_tol = 1e-6);

}  // namespace ousparse

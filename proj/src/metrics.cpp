#include "ousparse/metrics.hpp"

#include <cmath>

#include "ousparse/errors.hpp"
#include "ousparse/linalg.hpp"

namespace ousparse {

namespace {
void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(what) + ": matrices differ in shape");
  }
}
}  // namespace

ErrorPair l1_l2_errors(const Matrix& a_hat, const Matrix& a0) {
  require_same_shape(a_hat, a0, "l1_l2_errors");
  const Matrix diff = a_hat - a0;
  return {linalg::entrywise_norm(diff, 1.0), linalg::entrywise_norm(diff, 2.0)};
}

SupportReport support_report(const Matrix& a_hat, const Matrix& a0, double zero_tol) {
  require_same_shape(a_hat, a0, "support_report");
  if (!(zero_tol >= 0.0)) throw DomainError("support_report: zero_tol must be >= 0");
  SupportReport rep;
  rep.zero_tol = zero_tol;
  for (Eigen::Index k = 0; k < a0.size(); ++k) {
    const bool est_zero = std::abs(a_hat(k)) <= zero_tol;
    const bool true_zero = std::abs(a0(k)) <= zero_tol;
    if (est_zero == true_zero) {
      ++rep.correct;
    } else if (est_zero) {
      ++rep.missed;
    } else {
      ++rep.spurious;
    }
  }
  return rep;
}

}  // namespace ousparse

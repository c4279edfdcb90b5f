#include "ousparse/contrast.hpp"

#include <cmath>

#include "ousparse/errors.hpp"
#include "ousparse/linalg.hpp"

namespace ousparse {

namespace {

// Entrywise Neumaier summation; keeps the moment identities honest at large n.
class CompensatedSum {
 public:
  CompensatedSum(Eigen::Index rows, Eigen::Index cols)
      : sum_(Matrix::Zero(rows, cols)), comp_(Matrix::Zero(rows, cols)) {}

  void add_outer(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
    for (Eigen::Index j = 0; j < sum_.cols(); ++j) {
      for (Eigen::Index i = 0; i < sum_.rows(); ++i) add(i, j, u(i) * v(j));
    }
  }

  [[nodiscard]] Matrix value() const { return sum_ + comp_; }

 private:
  void add(Eigen::Index i, Eigen::Index j, double term) {
    double& s = sum_(i, j);
    const double t = s + term;
    if (std::abs(s) >= std::abs(term)) {
      comp_(i, j) += (s - t) + term;
    } else {
      comp_(i, j) += (term - t) + s;
    }
    s = t;
  }

  Matrix sum_;
  Matrix comp_;
};

void require_drift_shape(const Matrix& a, Eigen::Index d, const char* what) {
  if (a.rows() != d || a.cols() != d) {
    throw DimensionError(std::string(what) + ": expected a " + std::to_string(d) + "x" +
                         std::to_string(d) + " matrix");
  }
}

}  // namespace

void TruncationConfig::validate() const {
  if (!(b_radius > 0.0)) throw DomainError("localization radius b must be > 0");
  if (!(eta > 0.0)) throw DomainError("truncation level eta must be > 0");
}

bool window_kept(const ObservationSet& obs, const TruncationConfig& trunc, Eigen::Index i) {
  const auto x = obs.obs.col(i - 1);
  if (!(x.norm() < trunc.b_radius)) return false;
  return (obs.obs.col(i) - x).norm() < trunc.eta;
}

EmpiricalMoments empirical_moments(const ObservationSet& obs, const TruncationConfig& trunc) {
  trunc.validate();
  const Eigen::Index d = obs.dim();
  const Eigen::Index n = obs.windows();
  if (n < 1) throw DomainError("empirical_moments: need at least one window");

  CompensatedSum c_all(d, d);
  CompensatedSum c_eta(d, d);
  CompensatedSum h(d, d);
  double sq = 0.0;
  double sq_comp = 0.0;
  Eigen::Index kept = 0;
  Vector dx(d);
  for (Eigen::Index i = 1; i <= n; ++i) {
    const auto x = obs.obs.col(i - 1);
    if (!(x.norm() < trunc.b_radius)) continue;
    c_all.add_outer(x, x);
    dx = obs.obs.col(i) - x;
    if (!(dx.norm() < trunc.eta)) continue;
    ++kept;
    c_eta.add_outer(x, x);
    h.add_outer(dx, x);
    const double term = dx.squaredNorm();
    const double t = sq + term;
    sq_comp += (sq >= term) ? (sq - t) + term : (term - t) + sq;
    sq = t;
  }

  EmpiricalMoments m;
  m.windows = n;
  m.kept = kept;
  m.delta_n = obs.delta_n;
  m.big_t = obs.big_t;
  m.kept_fraction = static_cast<double>(kept) / static_cast<double>(n);
  const double cov_scale = obs.delta_n / obs.big_t;
  m.c_hat = c_all.value() * cov_scale;
  m.c_hat_eta = c_eta.value() * cov_scale;
  m.h_hat = h.value() / obs.big_t;
  m.sq_incr = (sq + sq_comp) / obs.big_t;
  return m;
}

EmpiricalMoments continuous_part_moments(const ObservationSet& obs) {
  if (!obs.cont_increments) {
    throw UnsupportedError("continuous-part increments are only available for simulated data");
  }
  const Eigen::Index d = obs.dim();
  const Eigen::Index n = obs.windows();
  CompensatedSum c(d, d);
  CompensatedSum h(d, d);
  double sq = 0.0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const auto x = obs.obs.col(i - 1);
    const auto dxc = obs.cont_increments->col(i - 1);
    c.add_outer(x, x);
    h.add_outer(dxc, x);
    sq += dxc.squaredNorm();
  }
  EmpiricalMoments m;
  m.windows = n;
  m.kept = n;
  m.kept_fraction = 1.0;
  m.delta_n = obs.delta_n;
  m.big_t = obs.big_t;
  m.c_hat = c.value() * (obs.delta_n / obs.big_t);
  m.c_hat_eta = m.c_hat;
  m.h_hat = h.value() / obs.big_t;
  m.sq_incr = sq / obs.big_t;
  return m;
}

double pseudo_likelihood(const Matrix& a, const ObservationSet& obs, const TruncationConfig& trunc) {
  trunc.validate();
  require_drift_shape(a, obs.dim(), "pseudo_likelihood");
  double linear = 0.0;
  double quad = 0.0;
  Vector ax(obs.dim());
  for (Eigen::Index i = 1; i <= obs.windows(); ++i) {
    if (!window_kept(obs, trunc, i)) continue;
    const auto x = obs.obs.col(i - 1);
    ax.noalias() = a * x;
    linear += ax.dot(obs.obs.col(i) - x);
    quad += ax.squaredNorm();
  }
  return linear / obs.big_t + obs.delta_n / (2.0 * obs.big_t) * quad;
}

double pseudo_likelihood(const Matrix& a, const EmpiricalMoments& m) {
  require_drift_shape(a, m.dim(), "pseudo_likelihood");
  const double linear = (a.array() * m.h_hat.array()).sum();
  const double quad = (a.array() * (a * m.c_hat_eta).array()).sum();
  return linear + 0.5 * quad;
}

Matrix gradient(const Matrix& a, const EmpiricalMoments& m) {
  require_drift_shape(a, m.dim(), "gradient");
  return m.h_hat + a * m.c_hat_eta;
}

Matrix gradient(const Matrix& a, const ObservationSet& obs, const TruncationConfig& trunc) {
  require_drift_shape(a, obs.dim(), "gradient");
  return gradient(a, empirical_moments(obs, trunc));
}

double contrast_rt(const Matrix& a, const ObservationSet& obs, const TruncationConfig& trunc) {
  trunc.validate();
  require_drift_shape(a, obs.dim(), "contrast_rt");
  double total = 0.0;
  Vector r(obs.dim());
  for (Eigen::Index i = 1; i <= obs.windows(); ++i) {
    if (!window_kept(obs, trunc, i)) continue;
    const auto x = obs.obs.col(i - 1);
    r = (obs.obs.col(i) - x) + obs.delta_n * (a * x);
    total += r.squaredNorm();
  }
  return total / obs.big_t;
}

double empirical_pred_norm(const Matrix& m, const EmpiricalMoments& moments) {
  require_drift_shape(m, moments.dim(), "empirical_pred_norm");
  return (m * moments.c_hat_eta * m.transpose()).trace();
}

double empirical_pred_norm(const Matrix& m, const ObservationSet& obs, const TruncationConfig& trunc) {
  return empirical_pred_norm(m, empirical_moments(obs, trunc));
}

Matrix truncated_stationary_covariance(const Matrix& c_inf, double b_radius, Rng& rng,
                                       Eigen::Index draws) {
  if (!(b_radius > 0.0)) throw DomainError("truncated_stationary_covariance: b must be > 0");
  if (std::isinf(b_radius)) return c_inf;
  if (draws < 1) throw DomainError("truncated_stationary_covariance: need at least one draw");
  const Eigen::Index d = c_inf.rows();
  const Matrix factor = linalg::psd_sqrt(c_inf);
  CompensatedSum acc(d, d);
  Vector g(d);
  Vector y(d);
  for (Eigen::Index k = 0; k < draws; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) g(i) = rng.normal();
    y.noalias() = factor * g;
    if (y.norm() < b_radius) acc.add_outer(y, y);
  }
  return acc.value() / static_cast<double>(draws);
}

}  // namespace ousparse

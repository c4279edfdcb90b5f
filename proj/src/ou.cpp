#include "ousparse/ou.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ousparse/errors.hpp"
#include "ousparse/linalg.hpp"

namespace ousparse {

namespace {

Eigen::Index step_count(double total_time, double dt_fine) {
  if (!(dt_fine > 0.0)) throw DomainError("fine step must be > 0");
  if (!(total_time > 0.0)) throw DomainError("total time must be > 0");
  const double ratio = total_time / dt_fine;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError("total time " + std::to_string(total_time) +
                      " is not a positive multiple of the fine step");
  }
  return static_cast<Eigen::Index>(rounded);
}

Vector gaussian_draw(const Matrix& factor, Rng& rng) {
  Vector g(factor.cols());
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
  return factor * g;
}

}  // namespace

ObservationSet make_observations(Matrix obs, double delta_n, std::optional<Matrix> cont_increments) {
  if (obs.cols() < 2) throw DomainError("an observation set needs at least one window");
  if (!(delta_n > 0.0)) throw DomainError("delta_n must be > 0");
  const Eigen::Index n = obs.cols() - 1;
  if (cont_increments &&
      (cont_increments->rows() != obs.rows() || cont_increments->cols() != n)) {
    throw DimensionError("cont_increments must be d x n");
  }
  ObservationSet set;
  set.delta_n = delta_n;
  set.big_t = static_cast<double>(n) * delta_n;
  set.obs = std::move(obs);
  set.cont_increments = std::move(cont_increments);
  return set;
}

ObservationSet ObservationSet::segment(Eigen::Index first, Eigen::Index count) const {
  if (first < 0 || count < 1 || first + count > windows()) {
    throw DomainError("observation segment out of range");
  }
  std::optional<Matrix> cont;
  if (cont_increments) cont = cont_increments->middleCols(first, count);
  return make_observations(obs.middleCols(first, count + 1), delta_n, std::move(cont));
}

DriftMatrix drift_from_offdiagonal(const Matrix& offdiag) {
  linalg::require_square(offdiag, "drift_from_offdiagonal");
  Matrix a = offdiag;
  a.diagonal().setZero();
  const Vector row_abs = a.cwiseAbs().rowwise().sum();
  a.diagonal() = row_abs.array() + 0.1;
  DriftMatrix drift{a, linalg::count_nonzero(a)};
  return drift;
}

DriftMatrix generate_sparse_stable_drift(Eigen::Index d, Eigen::Index s,
                                         std::pair<double, double> value_range, Rng& rng) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  if (s < d || s > d * d) {
    throw DomainError("sparsity s must satisfy d <= s <= d^2 (got s=" + std::to_string(s) +
                      ", d=" + std::to_string(d) + ")");
  }
  const auto [lo, hi] = value_range;
  if (!(lo < hi)) throw DomainError("value range must satisfy lo < hi");

  // Off-diagonal slots in row-major order; a partial Fisher-Yates picks s - d of them.
  std::vector<Eigen::Index> slots;
  slots.reserve(static_cast<std::size_t>(d * (d - 1)));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j) slots.push_back(i * d + j);
    }
  }
  const auto picks = static_cast<std::size_t>(s - d);
  for (std::size_t k = 0; k < picks; ++k) {
    const auto r = k + static_cast<std::size_t>(rng.below(slots.size() - k));
    std::swap(slots[k], slots[r]);
  }

  Matrix off = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < picks; ++k) {
    double v = 0.0;
    // U[lo, hi] has a zero with probability 0, but an exact zero would break ||A0||_0 = s.
    do {
      v = rng.uniform(lo, hi);
    } while (v == 0.0);
    off(slots[k] / d, slots[k] % d) = v;
  }
  DriftMatrix drift = drift_from_offdiagonal(off);
  if (!linalg::is_stable(drift.a0)) throw StabilityError("generated drift is not stable");
  return drift;
}

Trajectory simulate_euler(const DriftMatrix& drift, const LevyModel& model, const Vector& x0,
                          double total_time, Rng& rng, double dt_fine) {
  const Eigen::Index d = drift.a0.rows();
  if (model.dim() != d || x0.size() != d) {
    throw DimensionError("simulate_euler: drift, model and x0 dimensions differ");
  }
  const Eigen::Index steps = step_count(total_time, dt_fine);

  Trajectory traj;
  traj.dt_fine = dt_fine;
  traj.states.resize(d, steps + 1);
  traj.jump_ledger.resize(d, steps);
  traj.states.col(0) = x0;

  Vector x = x0;
  Vector total(d);
  Vector jump(d);
  Vector drift_term(d);
  for (Eigen::Index k = 0; k < steps; ++k) {
    sample_increment_into(model, dt_fine, rng, total, jump);
    drift_term.noalias() = drift.a0 * x;
    x = x - dt_fine * drift_term + total;
    const double norm = x.norm();
    if (!(norm <= kDivergenceNorm)) {
      throw DivergenceError("simulate_euler: state norm exceeded 1e12 at step " +
                            std::to_string(k + 1));
    }
    traj.states.col(k + 1) = x;
    traj.jump_ledger.col(k) = jump;
  }
  return traj;
}

Matrix stationary_covariance(const DriftMatrix& drift, const LevyModel& model) {
  const Matrix noise = cov_brownian(model) + nu2_matrix(model);
  return linalg::solve_lyapunov(drift.a0, noise);
}

Vector stationary_start(const DriftMatrix& drift, const LevyModel& model, Rng& rng,
                        double dt_fine) {
  const Eigen::Index d = drift.a0.rows();
  if (model.dim() != d) throw DimensionError("stationary_start: dimension mismatch");
  if (model.pure_brownian()) {
    const Matrix c_inf = linalg::solve_lyapunov(drift.a0, cov_brownian(model));
    return gaussian_draw(linalg::psd_sqrt(c_inf), rng);
  }
  const double rate = linalg::min_real_eigenvalue(drift.a0);
  if (!(rate > 0.0)) throw StabilityError("stationary_start: drift is not stable");
  const double burn = std::ceil(10.0 / rate / dt_fine) * dt_fine;
  const Trajectory warm = simulate_euler(drift, model, Vector::Zero(d), burn, rng, dt_fine);
  return warm.states.col(warm.states.cols() - 1);
}

ObservationSet subsample(const Trajectory& traj, Eigen::Index n) {
  const Eigen::Index steps = traj.steps();
  if (n < 2) throw DomainError("subsample: n must be >= 2");
  if (n > steps) throw DomainError("subsample: n exceeds the number of fine steps");
  const Eigen::Index d = traj.dim();

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n + 1));
  for (Eigen::Index k = 0; k <= n; ++k) {
    // round-half-up of k * steps / n in exact integer arithmetic
    idx[static_cast<std::size_t>(k)] = (2 * k * steps + n) / (2 * n);
  }

  Matrix obs(d, n + 1);
  Matrix cont(d, n);
  for (Eigen::Index k = 0; k <= n; ++k) obs.col(k) = traj.states.col(idx[static_cast<std::size_t>(k)]);
  Vector jump_sum(d);
  for (Eigen::Index i = 1; i <= n; ++i) {
    jump_sum.setZero();
    for (Eigen::Index j = idx[static_cast<std::size_t>(i - 1)]; j < idx[static_cast<std::size_t>(i)]; ++j) {
      jump_sum += traj.jump_ledger.col(j);
    }
    cont.col(i - 1) = (obs.col(i) - obs.col(i - 1)) - jump_sum;
  }
  return make_observations(std::move(obs), traj.total_time() / static_cast<double>(n),
                           std::move(cont));
}

GaussianTransition::GaussianTransition(const DriftMatrix& drift, const LevyModel& model, double dt)
    : dt_(dt) {
  if (!model.pure_brownian()) {
    throw UnsupportedError("exact transitions are only available for pure-Brownian models");
  }
  if (!(dt >= 0.0)) throw DomainError("transition step must be >= 0");
  const Eigen::Index d = drift.a0.rows();
  if (model.dim() != d) throw DimensionError("GaussianTransition: dimension mismatch");
  if (dt == 0.0) {
    propagator_ = Matrix::Identity(d, d);
    covariance_ = Matrix::Zero(d, d);
    factor_ = Matrix::Zero(d, d);
    return;
  }
  const Matrix c_inf = linalg::solve_lyapunov(drift.a0, cov_brownian(model));
  propagator_ = linalg::expm((-dt * drift.a0).eval());
  covariance_ = c_inf - propagator_ * c_inf * propagator_.transpose();
  covariance_ = (covariance_ + covariance_.transpose()).eval() / 2.0;
  factor_ = linalg::psd_sqrt(covariance_);
}

Vector GaussianTransition::sample(const Vector& x, Rng& rng) const {
  if (dt_ == 0.0) return x;
  return mean(x) + gaussian_draw(factor_, rng);
}

Vector exact_gaussian_transition(const DriftMatrix& drift, const LevyModel& model,
                                 const Vector& x, double dt, Rng& rng) {
  return GaussianTransition(drift, model, dt).sample(x, rng);
}

}  // namespace ousparse

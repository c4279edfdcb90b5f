#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ousparse/contrast.hpp"
#include "ousparse/errors.hpp"
#include "ousparse/linalg.hpp"

using namespace ousparse;

namespace {

/// Random-walk-like path with occasional large moves so finite b/eta bite.
ObservationSet random_path(Eigen::Index d, Eigen::Index n, std::uint64_t seed, double dt = 0.1) {
  Rng rng(seed);
  Matrix x(d, n + 1);
  x.col(0) = oracle::random_matrix(d, 1, rng);
  for (Eigen::Index i = 1; i <= n; ++i) {
    Vector step = oracle::random_matrix(d, 1, rng, std::sqrt(dt));
    if (rng.uniform() < 0.1) step *= 6.0;
    x.col(i) = 0.9 * x.col(i - 1) + step;
  }
  return make_observations(x, dt);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("moments of a two-window path") {
  Matrix x{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  const ObservationSet obs = make_observations(x, 1.0);
  CHECK(obs.big_t == 2.0);
  const EmpiricalMoments m = empirical_moments(obs, {});
  CHECK((m.c_hat - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-15);
  CHECK(m.c_hat_eta == m.c_hat);
  CHECK(m.kept == 2);
  CHECK(m.kept_fraction == 1.0);
}

TEST_CASE("everything filtered") {
  const ObservationSet obs = random_path(3, 20, 1);
  double smallest = 1e300;
  for (Eigen::Index i = 0; i < obs.windows(); ++i) smallest = std::min(smallest, obs.obs.col(i).norm());
  const TruncationConfig t{smallest * 0.5, kNoTruncation};
  const EmpiricalMoments m = empirical_moments(obs, t);
  CHECK(m.c_hat.isZero(0.0));
  CHECK(m.c_hat_eta.isZero(0.0));
  CHECK(m.h_hat.isZero(0.0));
  CHECK(m.kept_fraction == 0.0);
  CHECK(gradient(Matrix::Identity(3, 3), obs, t).isZero(0.0));
}

TEST_CASE("strict indicators") {
  Matrix x{{3.0, 3.0, 4.0}, {4.0, 4.0, 4.0}};
  const ObservationSet obs = make_observations(x, 1.0);
  // |X_0| = 5 exactly is outside the open ball of radius 5; |dX_2| = 1 is not below eta = 1
  CHECK_FALSE(window_kept(obs, {5.0, kNoTruncation}, 1));
  CHECK(window_kept(obs, {5.0 + 1e-12, kNoTruncation}, 1));
  CHECK_FALSE(window_kept(obs, {kNoTruncation, 1.0}, 2));
  CHECK(window_kept(obs, {kNoTruncation, 1.0}, 1));
}

TEST_CASE("moments match a plain loop") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ObservationSet obs = random_path(3, 50, seed);
    for (const TruncationConfig t : {TruncationConfig{}, TruncationConfig{2.0, 1.0},
                                     TruncationConfig{1.5, kNoTruncation}}) {
      const EmpiricalMoments m = empirical_moments(obs, t);
      const auto ref = oracle::loop_moments(obs, t.b_radius, t.eta);
      CHECK((m.c_hat - ref.c_hat).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((m.c_hat_eta - ref.c_hat_eta).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK((m.h_hat - ref.h_hat).cwiseAbs().maxCoeff() <= 1e-14);
      CHECK(m.sq_incr == doctest::Approx(ref.sq_incr).epsilon(1e-13));
      CHECK(m.kept == ref.kept);
    }
  }
}

TEST_CASE("pseudo-likelihood examples") {
  const ObservationSet obs = random_path(2, 10, 2);
  CHECK(pseudo_likelihood(Matrix::Zero(2, 2), obs, {}) == 0.0);

  Matrix x{{1.0, 0.9}, {0.0, 0.0}};
  const ObservationSet one = make_observations(x, 1.0);
  CHECK(pseudo_likelihood(Matrix::Identity(2, 2), one, {}) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(pseudo_likelihood(Matrix::Identity(2, 2), empirical_moments(one, {})) ==
        doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(pseudo_likelihood(Matrix::Identity(3, 3), one, {}), DimensionError);
}

TEST_CASE("moment form equals the window sum") {
  Rng rng(3);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ObservationSet obs = random_path(4, 60, seed);
    const TruncationConfig t{2.5, 1.2};
    const Matrix a = oracle::random_matrix(4, 4, rng);
    const double direct = oracle::loop_likelihood(a, obs, t.b_radius, t.eta);
    CHECK(pseudo_likelihood(a, obs, t) == doctest::Approx(direct).epsilon(1e-12));
    CHECK(pseudo_likelihood(a, empirical_moments(obs, t)) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("gradient matches central differences") {
  Rng rng(4);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ObservationSet obs = random_path(4, 50, seed + 100);
    const TruncationConfig t{2.5, 1.2};
    const Matrix a = oracle::random_matrix(4, 4, rng);
    const Matrix g = gradient(a, obs, t);
    const double h = 1e-5;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      Matrix ap = a, am = a;
      ap(k) += h;
      am(k) -= h;
      const double fd = (oracle::loop_likelihood(ap, obs, t.b_radius, t.eta) -
                         oracle::loop_likelihood(am, obs, t.b_radius, t.eta)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g(k)));
    }
    CHECK(worst <= 1e-6);
  }
  const ObservationSet obs = random_path(3, 30, 9);
  const EmpiricalMoments m = empirical_moments(obs, {});
  CHECK(gradient(Matrix::Zero(3, 3), m) == m.h_hat);
}

TEST_CASE("contrast identity") {
  Rng rng(5);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ObservationSet obs = random_path(3, 40, seed + 200);
    const TruncationConfig t{3.0, 1.5};
    const EmpiricalMoments m = empirical_moments(obs, t);
    CHECK(contrast_rt(Matrix::Zero(3, 3), obs, t) == doctest::Approx(m.sq_incr).epsilon(1e-13));
    const Matrix a = oracle::random_matrix(3, 3, rng);
    const double rhs = 2.0 * obs.delta_n * pseudo_likelihood(a, obs, t) + m.sq_incr;
    CHECK(std::abs(contrast_rt(a, obs, t) - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("contrast vanishes on exactly linear data") {
  Matrix a{{0.5, 0.2}, {-0.1, 0.3}};
  const double dt = 0.1;
  Matrix x(2, 21);
  x.col(0) = Vector{{1.0, 2.0}};
  for (Eigen::Index i = 1; i <= 20; ++i) x.col(i) = x.col(i - 1) - dt * a * x.col(i - 1);
  const ObservationSet obs = make_observations(x, dt);
  CHECK(contrast_rt(a, obs, {}) <= 1e-28);
}

TEST_CASE("prediction norm two routes") {
  Rng rng(6);
  const ObservationSet obs = random_path(3, 50, 7);
  const TruncationConfig t{2.0, 1.5};
  const EmpiricalMoments m = empirical_moments(obs, t);
  CHECK(empirical_pred_norm(Matrix::Zero(3, 3), m) == 0.0);
  CHECK(empirical_pred_norm(Matrix::Identity(3, 3), m) == doctest::Approx(m.c_hat_eta.trace()));
  for (int k = 0; k < 5; ++k) {
    const Matrix mm = oracle::random_matrix(3, 3, rng);
    double direct = 0.0;
    for (Eigen::Index i = 1; i <= obs.windows(); ++i) {
      if (!window_kept(obs, t, i)) continue;
      direct += (mm * obs.obs.col(i - 1)).squaredNorm();
    }
    direct *= obs.delta_n / obs.big_t;
    CHECK(empirical_pred_norm(mm, obs, t) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("moment matrix bounds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ObservationSet obs = random_path(3, 80, seed + 300);
    const double b = 1.5;
    const EmpiricalMoments m = empirical_moments(obs, {b, 1.0});
    const auto [lo_eta, hi_eta] = linalg::eig_extremes_sym(m.c_hat_eta);
    const auto [lo, hi] = linalg::eig_extremes_sym(m.c_hat);
    CHECK(lo_eta >= -1e-14);
    CHECK(hi_eta <= hi + 1e-14);
    CHECK(hi <= b * b);
    CHECK(linalg::eig_extremes_sym((m.c_hat - m.c_hat_eta).eval()).first >= -1e-14);
  }
}

TEST_CASE("continuous-part moments need continuous increments") {
  const ObservationSet obs = random_path(2, 20, 8);
  CHECK_THROWS_AS(continuous_part_moments(obs), UnsupportedError);
}

TEST_CASE("truncated stationary covariance") {
  Rng rng(9);
  const Matrix c{{1.0, 0.3}, {0.3, 0.5}};
  CHECK(truncated_stationary_covariance(c, kNoTruncation, rng) == c);
  const Matrix cb = truncated_stationary_covariance(c, 1.0, rng, 200000);
  CHECK(linalg::eig_extremes_sym((c - cb).eval()).first >= 0.0);
  // one dimension: E[Y^2 1{|Y| < 1}] for Y ~ N(0, 1)
  const Matrix one = truncated_stationary_covariance(Matrix::Identity(1, 1), 1.0, rng, 400000);
  const double exact = std::erf(1.0 / std::sqrt(2.0)) - 2.0 * std::exp(-0.5) / std::sqrt(2.0 * M_PI);
  CHECK(std::abs(one(0, 0) - exact) <= 3.0 * std::sqrt(0.16 / 400000.0));
}

TEST_CASE("empirical covariance concentrates as T grows") {
  const Matrix a{{1.0, 0.3}, {0.0, 0.8}};
  const DriftMatrix dm{a, 3};
  const LevyModel model{Matrix::Identity(2, 2), JumpSpec{}};
  const double b = 2.0;
  Rng mc(10);
  const Matrix c_inf = stationary_covariance(dm, model);
  const Matrix c_b = truncated_stationary_covariance(c_inf, b, mc);
  std::vector<double> e50, e400;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const double big_t : {50.0, 400.0}) {
      Rng rng(seed * 1000 + static_cast<std::uint64_t>(big_t));
      const Vector x0 = stationary_start(dm, model, rng);
      const Trajectory tr = simulate_euler(dm, model, x0, big_t, rng);
      const ObservationSet obs = subsample(tr, static_cast<Eigen::Index>(big_t * 10));
      const EmpiricalMoments m = empirical_moments(obs, {b, kNoTruncation});
      (big_t < 100 ? e50 : e400).push_back(linalg::spectral_norm((m.c_hat - c_b).eval()));
    }
  }
  CHECK(median(e400) < median(e50));
}

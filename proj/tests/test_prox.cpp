#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ousparse/errors.hpp"
#include "ousparse/prox.hpp"

using namespace ousparse;

namespace {

Vector random_weights(Eigen::Index p, Rng& rng) {
  Vector w(p);
  for (Eigen::Index j = 0; j < p; ++j) w(j) = rng.uniform(0.0, 2.0);
  std::sort(w.data(), w.data() + p, std::greater<>());
  return w;
}

Vector random_vector(Eigen::Index p, Rng& rng) {
  Vector v(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    v(j) = 3.0 * rng.normal();
    // occasional exact ties in magnitude
    if (j > 0 && rng.uniform() < 0.15) v(j) = -v(j - 1);
  }
  return v;
}

}  // namespace

TEST_CASE("slope weights") {
  const SlopeWeights w = SlopeWeights::for_size(6, 2.0);
  for (Eigen::Index j = 0; j < 6; ++j) {
    CHECK(w.weights(j) > 0.0);
    if (j > 0) CHECK(w.weights(j) <= w.weights(j - 1));
  }
  CHECK(w.weights(5) == doctest::Approx(2.0 * std::sqrt(std::log(2.0))));
  CHECK(SlopeWeights::for_matrix(3, 1.0).size() == 9);
}

TEST_CASE("sorted l1 norm") {
  CHECK(sorted_l1_norm(Matrix::Zero(3, 3), SlopeWeights::for_matrix(3, 1.0)) == 0.0);
  Matrix one{{-2.5}};
  CHECK(sorted_l1_norm(one, SlopeWeights::for_matrix(1, 1.0)) ==
        doctest::Approx(std::sqrt(std::log(2.0)) * 2.5));
  const Vector v{{3.0, -1.0, 2.0, 0.0}};
  const Vector w{{2.0, 1.5, 1.0, 0.5}};
  CHECK(sorted_l1_norm(v, w) == 10.0);
  CHECK_THROWS_AS(sorted_l1_norm(v, Vector::Ones(3)), DimensionError);
}

TEST_CASE("sorted l1 norm dominates the scaled l1 norm") {
  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index d = 1 + k % 6;
    const Matrix m = oracle::random_matrix(d, d, rng);
    const double star = sorted_l1_norm(m, SlopeWeights::for_matrix(d, 1.0));
    CHECK(star >= std::sqrt(std::log(2.0)) * m.cwiseAbs().sum() - 1e-12);
    CHECK(star == doctest::Approx(oracle::sorted_l1(Eigen::Map<const Vector>(m.data(), m.size()),
                                                    SlopeWeights::for_matrix(d, 1.0).weights)));
  }
}

TEST_CASE("soft thresholding") {
  const Vector v{{2.0, -0.5}};
  CHECK(prox_l1(v, 0.0) == v);
  CHECK(prox_l1(v, 1.0) == Vector{{1.0, 0.0}});
  CHECK_THROWS_AS(prox_l1(v, -1.0), DomainError);

  Rng rng(2);
  const Vector r = random_vector(5, rng);
  const double tau = 0.7;
  const Vector x = prox_l1(r, tau);
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    // bisection on the subgradient t - r + tau * sign(t), which is increasing in t
    auto g = [&](double t) { return t - r(i) + tau * ((t > 0.0) - (t < 0.0)); };
    double best = 0.0;
    if (g(0.0) + tau < 0.0 || g(0.0) - tau > 0.0) {
      double lo = -20.0, hi = 20.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
      }
      best = 0.5 * (lo + hi);
    }
    CHECK(std::abs(x(i) - best) <= 1e-12);
  }
}

TEST_CASE("sorted l1 prox examples") {
  const Vector v{{1.0, -2.0, 0.5}};
  CHECK(prox_sorted_l1(v, Vector::Zero(3)) == v);
  CHECK(prox_sorted_l1(Vector{{5.0}}, Vector{{2.0}}) == Vector{{3.0}});
  CHECK_THROWS_AS(prox_sorted_l1(v, Vector{{1.0, 2.0, 0.5}}), DomainError);
  CHECK_THROWS_AS(prox_sorted_l1(v, Vector{{1.0, 0.5}}), DimensionError);
}

TEST_CASE("sorted l1 prox against the dual projected-gradient oracle") {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index p = 1 + k % 6;
    const Vector v = random_vector(p, rng);
    const Vector w = random_weights(p, rng);
    const Vector x = prox_sorted_l1(v, w);
    const Vector ref = oracle::prox_sorted_l1_dual_pg(v, w);
    CHECK((x - ref).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(oracle::slope_objective(x, v, w) <= oracle::slope_objective(ref, v, w) + 1e-12);
  }
}

TEST_CASE("sorted l1 prox against exhaustive KKT enumeration") {
  Rng rng(4);
  for (int k = 0; k < 60; ++k) {
    const Eigen::Index p = 1 + k % 4;
    const Vector v = random_vector(p, rng);
    const Vector w = random_weights(p, rng);
    const Vector x = prox_sorted_l1(v, w);
    CHECK((x - oracle::prox_sorted_l1_exhaustive(v, w)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("sorted l1 prox properties") {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index p = 2 + k % 12;
    const Vector v1 = random_vector(p, rng);
    const Vector v2 = random_vector(p, rng);
    const Vector w = random_weights(p, rng);
    const Vector x1 = prox_sorted_l1(v1, w);
    const Vector x2 = prox_sorted_l1(v2, w);

    CHECK((x1 - x2).norm() <= (v1 - v2).norm() + 1e-12);

    // magnitudes keep the input order and signs never flip
    for (Eigen::Index i = 0; i < p; ++i) {
      CHECK(x1(i) * v1(i) >= 0.0);
      for (Eigen::Index j = 0; j < p; ++j) {
        if (std::abs(v1(i)) >= std::abs(v1(j))) CHECK(std::abs(x1(i)) >= std::abs(x1(j)) - 1e-12);
      }
    }

    const double tau = w(0);
    CHECK(prox_sorted_l1(v1, Vector::Constant(p, tau)) == prox_l1(v1, tau));
  }
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ousparse/errors.hpp"
#include "ousparse/levy.hpp"
#include "ousparse/rng.hpp"

using namespace ousparse;

namespace {

LevyModel brownian(Eigen::Index d, double scale = 1.0) {
  return LevyModel{scale * Matrix::Identity(d, d), JumpSpec{}};
}

}  // namespace

TEST_CASE("rng streams replay and split deterministically") {
  Rng a(42), b(42);
  for (int k = 0; k < 1000; ++k) REQUIRE(a.next_u64() == b.next_u64());
  Rng c(42);
  c.normal();
  Rng copy = c;
  for (int k = 0; k < 100; ++k) REQUIRE(c.normal() == copy.normal());

  Rng root(7);
  const Rng s1 = root.split(1);
  root.uniform();
  CHECK(root.split(1).key() == s1.key());
  CHECK(root.split(1).key() != root.split(2).key());
  CHECK(Rng(7).split(1).key() != Rng(8).split(1).key());
}

TEST_CASE("rng uniform and normal moments") {
  Rng rng(3);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(su / n - 0.5) <= 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sn / n) <= 4.0 / std::sqrt(n));
  CHECK(std::abs(sn2 / n - 1.0) <= 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("cov_brownian") {
  CHECK(cov_brownian(brownian(2)) == Matrix::Identity(2, 2));
  CHECK(cov_brownian(brownian(2, 0.0)) == Matrix::Zero(2, 2));
  LevyModel m{Matrix{{1.0, 0.0}, {1.0, 1.0}}, JumpSpec{}};
  CHECK(cov_brownian(m) == Matrix{{1.0, 1.0}, {1.0, 2.0}});
}

TEST_CASE("nu2 matrix") {
  CHECK(nu2_matrix(brownian(3)) == Matrix::Zero(3, 3));

  LevyModel lap{Matrix::Identity(2, 2), JumpSpec{LaplaceJumps{1.0}, 1.0}};
  CHECK((nu2_matrix(lap) - 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-15);

  LevyModel par{Matrix::Identity(3, 3), JumpSpec{SymmetricParetoJumps{4.5, 1.0}, 1.0}};
  const Matrix nu2 = nu2_matrix(par);
  CHECK((nu2 - 1.8 * Matrix::Identity(3, 3)).norm() <= 1e-14);

  // Monte-Carlo second moment of the scalar law
  Rng rng(17);
  const int n = 1000000;
  double s2 = 0.0, s4 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = rng.symmetric_pareto(4.5, 1.0);
    s2 += x * x;
    s4 += x * x * x * x;
  }
  const double m2 = s2 / n;
  const double se = std::sqrt((s4 / n - m2 * m2) / n);
  CHECK(std::abs(m2 - 1.8) <= 3.0 * se);
}

TEST_CASE("jump spec validation") {
  LevyModel heavy{Matrix::Identity(2, 2), JumpSpec{SymmetricParetoJumps{2.0, 1.0}, 1.0}};
  CHECK_THROWS_AS(heavy.validate(), MomentError);
  CHECK_THROWS_AS(nu2_matrix(heavy), MomentError);
  LevyModel neg{Matrix::Identity(2, 2), JumpSpec{LaplaceJumps{1.0}, -1.0}};
  CHECK_THROWS_AS(neg.validate(), DomainError);
}

TEST_CASE("degenerate increments are zero") {
  Rng rng(1);
  const auto inc = sample_increment(brownian(2, 0.0), 0.3, rng);
  CHECK(inc.total == Vector::Zero(2));
  CHECK(inc.jump_part == Vector::Zero(2));
  CHECK_THROWS_AS(sample_increment(brownian(2), 0.0, rng), DomainError);
}

TEST_CASE("Brownian increment moments") {
  Rng rng(2);
  const int n = 1000000;
  const double dt = 0.01;
  Vector mean = Vector::Zero(2);
  Matrix second = Matrix::Zero(2, 2);
  for (int k = 0; k < n; ++k) {
    const auto inc = sample_increment(brownian(2), dt, rng);
    mean += inc.total;
    second += inc.total * inc.total.transpose();
  }
  mean /= n;
  second /= n;
  for (int i = 0; i < 2; ++i) CHECK(std::abs(mean(i)) <= 3.0 * std::sqrt(dt / n));
  // Var of x^2 is 2 dt^2, of x y is dt^2
  CHECK(std::abs(second(0, 0) - dt) <= 3.0 * std::sqrt(2.0 / n) * dt);
  CHECK(std::abs(second(1, 1) - dt) <= 3.0 * std::sqrt(2.0 / n) * dt);
  CHECK(std::abs(second(0, 1)) <= 3.0 * std::sqrt(1.0 / n) * dt);
}

TEST_CASE("jump increments: Poisson counts, zero mean, covariance dt (C + nu2)") {
  LevyModel m{Matrix{{1.0, 0.0}, {0.5, 1.0}}, JumpSpec{LaplaceJumps{1.0}, 10.0}};
  const double dt = 0.1;
  const int n = 100000;

  Rng counts(4);
  double sc = 0.0;
  for (int k = 0; k < n; ++k) sc += static_cast<double>(counts.poisson(10.0 * dt));
  CHECK(std::abs(sc / n - 1.0) <= 3.0 * std::sqrt(1.0 / n));

  Rng rng(5);
  std::vector<Vector> draws;
  draws.reserve(n);
  Vector mean = Vector::Zero(2);
  for (int k = 0; k < n; ++k) {
    const auto inc = sample_increment(m, dt, rng);
    REQUIRE((inc.total - inc.jump_part).allFinite());
    draws.push_back(inc.total);
    mean += inc.total;
  }
  mean /= n;
  const Matrix cov = dt * (cov_brownian(m) + nu2_matrix(m));
  for (int i = 0; i < 2; ++i) CHECK(std::abs(mean(i)) <= 4.0 * std::sqrt(cov(i, i) / n));

  Matrix second = Matrix::Zero(2, 2);
  Matrix fourth = Matrix::Zero(2, 2);
  for (const auto& x : draws) {
    const Matrix xx = x * x.transpose();
    second += xx;
    fourth += xx.cwiseProduct(xx);
  }
  second /= n;
  fourth /= n;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt((fourth(i, j) - second(i, j) * second(i, j)) / n);
      CHECK(std::abs(second(i, j) - cov(i, j)) <= 4.0 * se);
    }
}

TEST_CASE("increment sequences replay bit-exactly") {
  LevyModel m{Matrix::Identity(3, 3), JumpSpec{SymmetricParetoJumps{4.5, 1.0}, 2.0}};
  Rng a(99), b(99);
  for (int k = 0; k < 500; ++k) {
    const auto x = sample_increment(m, 0.05, a);
    const auto y = sample_increment(m, 0.05, b);
    REQUIRE(x.total == y.total);
    REQUIRE(x.jump_part == y.jump_part);
  }
}

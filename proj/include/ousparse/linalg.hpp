#pragma once

// Dense kernels used by the simulation and estimation layers. Everything here
// is a pure function of its arguments and is templated on the scalar type.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "ousparse/errors.hpp"
#include "ousparse/types.hpp"

namespace ousparse::linalg {

inline constexpr double kSymmetryTol = 1e-10;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m,
                  typename Derived::Scalar tol = typename Derived::Scalar(kSymmetryTol)) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

/// Induced 1-norm (maximum absolute column sum).
template <typename Derived>
typename Derived::Scalar induced_one_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

/// Matrix exponential by scaling and squaring with the [13/13] Padé
/// approximant (Higham 2005).
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& m_in) {
  using Scalar = typename Derived::Scalar;
  using Mat = MatrixX<Scalar>;
  require_square(m_in, "expm");
  require_finite(m_in, "expm");
  const Eigen::Index n = m_in.rows();
  if (n == 0) return Mat(0, 0);

  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  const Scalar theta13 = Scalar(5.371920351148152);

  Mat a = m_in;
  const Scalar norm1 = induced_one_norm(a);
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    a /= std::ldexp(Scalar(1), squarings);
  }

  const Mat ident = Mat::Identity(n, n);
  const Mat a2 = a * a;
  const Mat a4 = a2 * a2;
  const Mat a6 = a4 * a2;

  const Mat u_inner = Scalar(b[13]) * a6 + Scalar(b[11]) * a4 + Scalar(b[9]) * a2;
  const Mat u = a * (a6 * u_inner + Scalar(b[7]) * a6 + Scalar(b[5]) * a4 +
                     Scalar(b[3]) * a2 + Scalar(b[1]) * ident);
  const Mat v_inner = Scalar(b[12]) * a6 + Scalar(b[10]) * a4 + Scalar(b[8]) * a2;
  const Mat v = a6 * v_inner + Scalar(b[6]) * a6 + Scalar(b[4]) * a4 +
                Scalar(b[2]) * a2 + Scalar(b[0]) * ident;

  Mat r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

/// Smallest and largest eigenvalue of a symmetric matrix.
template <typename Derived>
std::pair<typename Derived::Scalar, typename Derived::Scalar> eig_extremes_sym(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_square(m, "eig_extremes_sym");
  require_finite(m, "eig_extremes_sym");
  if (!is_symmetric(m)) throw DomainError("eig_extremes_sym: matrix is not symmetric");
  if (m.rows() == 0) return {Scalar(0), Scalar(0)};
  const MatrixX<Scalar> sym = (m + m.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

template <typename Derived>
typename Derived::Scalar lambda_max_sym(const Eigen::MatrixBase<Derived>& m) {
  return eig_extremes_sym(m).second;
}

/// Operator 2-norm, sqrt(lambda_max(M^T M)).
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "spectral_norm");
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m);
  return svd.singularValues()(0);
}

/// Entrywise p-norm; pass p = infinity for the max-abs entry.
template <typename Derived>
typename Derived::Scalar entrywise_norm(const Eigen::MatrixBase<Derived>& m, double p) {
  using Scalar = typename Derived::Scalar;
  if (!(p >= 1.0)) throw DomainError("entrywise_norm: p must be >= 1");
  require_finite(m, "entrywise_norm");
  if (m.size() == 0) return Scalar(0);
  if (std::isinf(p)) return m.cwiseAbs().maxCoeff();
  if (p == 1.0) return m.cwiseAbs().sum();
  if (p == 2.0) return m.norm();
  const Scalar scale = m.cwiseAbs().maxCoeff();
  if (scale == Scalar(0)) return Scalar(0);
  const Scalar s = (m.cwiseAbs() / scale).array().pow(Scalar(p)).sum();
  return scale * std::pow(s, Scalar(1.0 / p));
}

template <typename Derived>
Eigen::Index count_nonzero(const Eigen::MatrixBase<Derived>& m) {
  return (m.array() != typename Derived::Scalar(0)).count();
}

/// Smallest real part over the eigenvalues of a square matrix.
template <typename Derived>
typename Derived::Scalar min_real_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require_square(m, "min_real_eigenvalue");
  require_finite(m, "min_real_eigenvalue");
  if (m.rows() == 0) return std::numeric_limits<Scalar>::infinity();
  Eigen::EigenSolver<MatrixX<Scalar>> es(m, false);
  return es.eigenvalues().real().minCoeff();
}

template <typename Derived>
bool is_stable(const Eigen::MatrixBase<Derived>& m) {
  return min_real_eigenvalue(m) > typename Derived::Scalar(0);
}

/// Solves A C + C A^T = Q for symmetric C through the Kronecker system
/// (I (x) A + A (x) I) vec(C) = vec(Q). Intended for d up to about 50.
template <typename DerivedA, typename DerivedQ>
MatrixX<typename DerivedA::Scalar> solve_lyapunov(const Eigen::MatrixBase<DerivedA>& a,
                                                  const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedA::Scalar;
  using Mat = MatrixX<Scalar>;
  require_square(a, "solve_lyapunov");
  require_square(q, "solve_lyapunov");
  if (a.rows() != q.rows()) throw DimensionError("solve_lyapunov: A and Q differ in size");
  require_finite(a, "solve_lyapunov");
  require_finite(q, "solve_lyapunov");
  if (!is_symmetric(q)) throw DomainError("solve_lyapunov: Q is not symmetric");
  const Eigen::Index d = a.rows();
  if (d == 0) return Mat(0, 0);
  if (!is_stable(a)) {
    throw StabilityError("solve_lyapunov: A has an eigenvalue with non-positive real part");
  }

  const Eigen::Index dd = d * d;
  Mat kron = Mat::Zero(dd, dd);
  // Column-major vec: vec(A C) = (I (x) A) vec(C), vec(C A^T) = (A (x) I) vec(C).
  for (Eigen::Index blk = 0; blk < d; ++blk) {
    kron.block(blk * d, blk * d, d, d) += a;
    for (Eigen::Index col = 0; col < d; ++col) {
      const Scalar coef = a(blk, col);
      if (coef == Scalar(0)) continue;
      kron.block(blk * d, col * d, d, d).diagonal().array() += coef;
    }
  }
  const Mat q_sym = (q + q.transpose()) / Scalar(2);
  const Eigen::Map<const VectorX<Scalar>> rhs(q_sym.data(), dd);
  Eigen::PartialPivLU<Mat> lu(kron);
  const VectorX<Scalar> sol = lu.solve(rhs);
  if (!sol.allFinite()) throw StabilityError("solve_lyapunov: singular Kronecker system");
  Mat c = Eigen::Map<const Mat>(sol.data(), d, d);
  c = (c + c.transpose()).eval() / Scalar(2);
  return c;
}

/// Symmetric PSD square root factor F with F F^T = M (eigenvalues clipped at 0).
template <typename Derived>
MatrixX<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  using Mat = MatrixX<Scalar>;
  require_square(m, "psd_sqrt");
  if (!is_symmetric(m, Scalar(1e-8) * std::max(Scalar(1), m.cwiseAbs().maxCoeff()))) {
    throw DomainError("psd_sqrt: matrix is not symmetric");
  }
  const Mat sym = (m + m.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const VectorX<Scalar> root = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace ousparse::linalg

#include "ousparse/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ousparse/errors.hpp"

namespace ousparse {

namespace {

// Indices sorted by decreasing |v|; ties keep the original index order.
std::vector<Eigen::Index> order_by_magnitude(const Eigen::Ref<const Vector>& v) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(v(a)) > std::abs(v(b));
  });
  return order;
}

void require_weights(const Eigen::Ref<const Vector>& w, Eigen::Index p, const char* what) {
  if (w.size() != p) {
    throw DimensionError(std::string(what) + ": weight length " + std::to_string(w.size()) +
                         " does not match vector length " + std::to_string(p));
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(w(j) >= 0.0)) throw DomainError(std::string(what) + ": weights must be nonnegative");
    if (j > 0 && w(j) > w(j - 1)) {
      throw DomainError(std::string(what) + ": weights must be nonincreasing");
    }
  }
}

}  // namespace

SlopeWeights SlopeWeights::for_size(Eigen::Index p, double lambda) {
  if (p < 1) throw DomainError("SlopeWeights: size must be >= 1");
  if (!(lambda >= 0.0)) throw DomainError("SlopeWeights: lambda must be >= 0");
  SlopeWeights sw;
  sw.weights.resize(p);
  const double two_p = 2.0 * static_cast<double>(p);
  for (Eigen::Index j = 1; j <= p; ++j) {
    sw.weights(j - 1) = lambda * std::sqrt(std::log(two_p / static_cast<double>(j)));
  }
  return sw;
}

double sorted_l1_norm(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& w) {
  if (w.size() != v.size()) throw DimensionError("sorted_l1_norm: weight length mismatch");
  const auto order = order_by_magnitude(v);
  double total = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    total += w(static_cast<Eigen::Index>(j)) * std::abs(v(order[j]));
  }
  return total;
}

double sorted_l1_norm(const Matrix& m, const SlopeWeights& w) {
  const Eigen::Map<const Vector> flat(m.data(), m.size());
  return sorted_l1_norm(flat, w.weights);
}

Vector prox_l1(const Eigen::Ref<const Vector>& v, double tau) {
  if (!(tau >= 0.0)) throw DomainError("prox_l1: tau must be >= 0");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i)) - tau;
    out(i) = mag > 0.0 ? std::copysign(mag, v(i)) : 0.0;
  }
  return out;
}

Vector prox_sorted_l1(const Eigen::Ref<const Vector>& v, const Eigen::Ref<const Vector>& w) {
  const Eigen::Index p = v.size();
  require_weights(w, p, "prox_sorted_l1");
  if (p == 0) return Vector(0);
  const auto order = order_by_magnitude(v);

  // Isotonic (nonincreasing) fit of |v|_sorted - w by pooling adjacent
  // violators on a stack of blocks; each block stores its start, end and sum.
  struct Block {
    Eigen::Index start;
    Eigen::Index end;
    double sum;
    [[nodiscard]] double mean() const { return sum / static_cast<double>(end - start + 1); }
  };
  std::vector<Block> stack;
  stack.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < p; ++k) {
    stack.push_back({k, k, std::abs(v(order[static_cast<std::size_t>(k)])) - w(k)});
    while (stack.size() > 1 && stack[stack.size() - 2].mean() <= stack.back().mean()) {
      const Block top = stack.back();
      stack.pop_back();
      stack.back().end = top.end;
      stack.back().sum += top.sum;
    }
  }

  Vector out = Vector::Zero(p);
  for (const Block& b : stack) {
    const double level = std::max(b.mean(), 0.0);
    if (level == 0.0) continue;
    for (Eigen::Index k = b.start; k <= b.end; ++k) {
      const Eigen::Index i = order[static_cast<std::size_t>(k)];
      out(i) = std::copysign(level, v(i));
    }
  }
  return out;
}

}  // namespace ousparse

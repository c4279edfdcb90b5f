#pragma once

#include <array>
#include <cstdint>

namespace ousparse {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is identified by a 64-bit key; draws walk a 128-bit counter. The
/// full state is (key, counter, buffered lane), so copies replay exactly.
/// `split(tag)` derives an independent child stream by hashing the parent key
/// with the tag, which is how replicates and sub-tasks get disjoint streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  /// Child stream; deterministic in (this key, tag) and independent of how
  /// many draws were taken from the parent.
  [[nodiscard]] Rng split(std::uint64_t tag) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  std::uint64_t poisson(double mean);
  /// Laplace(0, scale) by inverse CDF.
  double laplace(double scale);
  /// Symmetric Pareto: magnitude x_min * U^{-1/alpha}, sign uniform.
  double symmetric_pareto(double alpha, double x_min);

  [[nodiscard]] std::uint64_t key() const { return key_; }

 private:
  void refill();

  std::uint64_t key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> block_{};
  int lane_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// SplitMix64 finalizer; used for key derivation and hashing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace ousparse

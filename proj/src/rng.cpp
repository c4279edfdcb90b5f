#include "ousparse/rng.hpp"

#include <cmath>
#include <numbers>

#include "ousparse/errors.hpp"

namespace ousparse {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::uint32_t k0, std::uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : key_(mix64(seed)) {}

Rng Rng::split(std::uint64_t tag) const {
  Rng child(0);
  child.key_ = mix64(key_ ^ mix64(tag + 0x632BE59BD9B4E019ull));
  return child;
}

void Rng::refill() {
  block_ = philox4x32_10(counter_, static_cast<std::uint32_t>(key_),
                         static_cast<std::uint32_t>(key_ >> 32));
  for (auto& word : counter_) {
    if (++word != 0) break;
  }
  lane_ = 0;
}

std::uint32_t Rng::next_u32() {
  if (lane_ >= 4) refill();
  return block_[lane_++];
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double Rng::uniform() {
  // (k + 0.5) / 2^53 lies strictly inside (0, 1).
  const std::uint64_t k = next_u64() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(angle);
  has_spare_normal_ = true;
  return r * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw DomainError("Rng::below: empty range");
  // Lemire's nearly-divisionless rejection on 64-bit draws.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Rng::poisson: bad mean");
  if (mean == 0.0) return 0;
  // Sequential inversion is exact and cheap for small means; larger means are
  // split into independent halves (Poisson is closed under addition).
  if (mean > 16.0) return poisson(mean / 2.0) + poisson(mean / 2.0);
  double p = std::exp(-mean);
  double cdf = p;
  const double u = uniform();
  std::uint64_t k = 0;
  while (u > cdf) {
    ++k;
    p *= mean / static_cast<double>(k);
    const double next = cdf + p;
    if (next == cdf) break;
    cdf = next;
  }
  return k;
}

double Rng::laplace(double scale) {
  const double u = uniform() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

double Rng::symmetric_pareto(double alpha, double x_min) {
  const double mag = x_min * std::pow(uniform(), -1.0 / alpha);
  return (next_u32() & 1u) ? mag : -mag;
}

}  // namespace ousparse

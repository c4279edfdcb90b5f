#pragma once

#include <variant>

#include "ousparse/rng.hpp"
#include "ousparse/types.hpp"

namespace ousparse {

struct NoJumps {};
struct LaplaceJumps {
  double scale = 1.0;
};
struct SymmetricParetoJumps {
  double alpha = 4.5;
  double x_min = 1.0;
};

using JumpLaw = std::variant<NoJumps, LaplaceJumps, SymmetricParetoJumps>;

/// Compound-Poisson jump part. Each jump vector has i.i.d. components drawn
/// from the scalar law.
struct JumpSpec {
  JumpLaw law = NoJumps{};
  double intensity = 0.0;

  [[nodiscard]] bool active() const {
    return intensity > 0.0 && !std::holds_alternative<NoJumps>(law);
  }
  /// Throws DomainError/MomentError when the parameters are invalid.
  void validate() const;
};

/// Brownian part Sigma W plus compound-Poisson jumps; no drift term, so the
/// process is a centered square-integrable martingale.
struct LevyModel {
  Matrix sigma;
  JumpSpec jumps;

  [[nodiscard]] Eigen::Index dim() const { return sigma.rows(); }
  [[nodiscard]] bool pure_brownian() const { return !jumps.active(); }
  void validate() const;
};

struct Increment {
  Vector total;
  Vector jump_part;
};

/// C = Sigma Sigma^T.
Matrix cov_brownian(const LevyModel& model);

/// nu_2 = intensity * Var(scalar law) * I.
Matrix nu2_matrix(const LevyModel& model);

/// Variance of one jump coordinate (0 for NoJumps).
double jump_component_variance(const JumpSpec& jumps);

/// One increment of the driving process over a step of length dt.
Increment sample_increment(const LevyModel& model, double dt, Rng& rng);

/// Same draw written into caller-owned buffers; used by the simulator's inner loop.
void sample_increment_into(const LevyModel& model, double dt, Rng& rng, Vector& total,
                           Vector& jump_part);

}  // namespace ousparse

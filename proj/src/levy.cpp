#include "ousparse/levy.hpp"

#include <cmath>
#include <string>

#include "ousparse/errors.hpp"

namespace ousparse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double draw_component(const JumpLaw& law, Rng& rng) {
  return std::visit(overloaded{
                        [](const NoJumps&) { return 0.0; },
                        [&](const LaplaceJumps& l) { return rng.laplace(l.scale); },
                        [&](const SymmetricParetoJumps& p) {
                          return rng.symmetric_pareto(p.alpha, p.x_min);
                        },
                    },
                    law);
}

}  // namespace

void JumpSpec::validate() const {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw DomainError("jump intensity must be finite and >= 0");
  }
  std::visit(overloaded{
                 [](const NoJumps&) {},
                 [](const LaplaceJumps& l) {
                   if (!(l.scale > 0.0)) throw DomainError("Laplace scale must be > 0");
                 },
                 [](const SymmetricParetoJumps& p) {
                   if (!(p.x_min > 0.0)) throw DomainError("Pareto x_min must be > 0");
                   if (!(p.alpha > 2.0)) {
                     throw MomentError("Pareto alpha must exceed 2 for a finite second moment");
                   }
                 },
             },
             law);
}

void LevyModel::validate() const {
  if (sigma.rows() != sigma.cols()) throw DimensionError("sigma must be square");
  if (!sigma.allFinite()) throw DomainError("sigma has non-finite entries");
  jumps.validate();
}

Matrix cov_brownian(const LevyModel& model) { return model.sigma * model.sigma.transpose(); }

double jump_component_variance(const JumpSpec& jumps) {
  jumps.validate();
  return std::visit(overloaded{
                        [](const NoJumps&) { return 0.0; },
                        [](const LaplaceJumps& l) { return 2.0 * l.scale * l.scale; },
                        [](const SymmetricParetoJumps& p) {
                          return p.x_min * p.x_min * p.alpha / (p.alpha - 2.0);
                        },
                    },
                    jumps.law);
}

Matrix nu2_matrix(const LevyModel& model) {
  const Eigen::Index d = model.dim();
  const double var = jump_component_variance(model.jumps);
  return Matrix::Identity(d, d) * (model.jumps.intensity * var);
}

void sample_increment_into(const LevyModel& model, double dt, Rng& rng, Vector& total,
                           Vector& jump_part) {
  const Eigen::Index d = model.dim();
  total.resize(d);
  jump_part.setZero(d);
  const double sd = std::sqrt(dt);
  for (Eigen::Index i = 0; i < d; ++i) total(i) = sd * rng.normal();
  total = model.sigma * total;
  if (model.jumps.active()) {
    const std::uint64_t count = rng.poisson(model.jumps.intensity * dt);
    for (std::uint64_t k = 0; k < count; ++k) {
      for (Eigen::Index i = 0; i < d; ++i) jump_part(i) += draw_component(model.jumps.law, rng);
    }
    total += jump_part;
  }
}

Increment sample_increment(const LevyModel& model, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw DomainError("sample_increment: dt must be > 0");
  Increment inc;
  sample_increment_into(model, dt, rng, inc.total, inc.jump_part);
  return inc;
}

}  // namespace ousparse

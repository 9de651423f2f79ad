#include <cmath>
#include <string>

#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"

namespace sisid {
namespace {

bool in_greedy_set(const WeightedCostSpec& spec, std::size_t i, std::size_t k) {
  return i <= k && spec.greedy_indices.count(i) > 0;
}

void check_spec(const WeightedCostSpec& spec, const Trajectory& traj, const Regressor& reg, std::size_t k) {
  if (k >= traj.step_count()) {
    throw DimensionError("weighted cost: step " + std::to_string(k) + " beyond trajectory of " +
                         std::to_string(traj.step_count()) + " steps");
  }
  if (spec.p0_inv.rows() != reg.p || spec.p0_inv.cols() != reg.p || spec.theta0.size() != reg.p) {
    throw DimensionError("weighted cost: prior dimensions do not match the regressor");
  }
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0)) throw DomainError("weighted cost: alpha must lie in (0, 1]");
}

}  // namespace

double cost_weight(const WeightedCostSpec& spec, std::size_t i, std::size_t k) {
  if (i > k) throw DomainError("cost_weight: i must not exceed k");
  if (in_greedy_set(spec, i, k)) {
    // Explicit geometric sum, term by term.
    double sum = 0.0;
    double term = 1.0;
    for (std::size_t l = k + 1; l-- > i;) {
      sum += term;
      term *= spec.alpha;
    }
    return (1.0 - spec.alpha) * sum;
  }
  return std::pow(spec.alpha, static_cast<double>(k - i));
}

double limiting_cost_weights(const WeightedCostSpec& spec, std::size_t i, std::size_t k) {
  if (i > k) throw DomainError("limiting_cost_weights: i must not exceed k");
  if (in_greedy_set(spec, i, k)) return 1.0;
  return std::pow(spec.alpha, static_cast<double>(k - i));
}

double weighted_cost(const Trajectory& traj, const Regressor& reg, const WeightedCostSpec& spec,
                     std::size_t k, const ParameterVector& theta) {
  check_spec(spec, traj, reg, k);
  double total = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    total += cost_weight(spec, i, k) * residual(traj.observations[i], reg(traj.states[i]), theta).squaredNorm();
  }
  const Vector d = theta - spec.theta0;
  total += std::pow(spec.alpha, static_cast<double>(k + 1)) * d.dot(spec.p0_inv * d);
  return total;
}

ParameterVector batch_oracle(const Trajectory& traj, const Regressor& reg, const WeightedCostSpec& spec,
                             std::size_t k) {
  check_spec(spec, traj, reg, k);
  const double prior = std::pow(spec.alpha, static_cast<double>(k + 1));
  Matrix a = prior * spec.p0_inv;
  Vector b = -prior * (spec.p0_inv * spec.theta0);
  for (std::size_t i = 0; i <= k; ++i) {
    const Matrix phi = reg(traj.states[i]);
    const double w = cost_weight(spec, i, k);
    a += w * phi.transpose() * phi;
    b -= w * phi.transpose() * traj.observations[i];
  }
  return solve_spd(symmetrized(a), -b);
}

}  // namespace sisid

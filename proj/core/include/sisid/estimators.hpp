#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "sisid/dynamics.hpp"
#include "sisid/excitation.hpp"
#include "sisid/numerics.hpp"

namespace sisid {

// Estimates are unconstrained: nothing projects them back onto the
// nonnegative orthant.
using ParameterVector = Vector;

// ---------------------------------------------------------------------------
// Pure gradient descent: theta + phi^T (y - phi theta).

ParameterVector pure_gd_step(const ParameterVector& theta_hat, const Matrix& phi, const Vector& y);

// ---------------------------------------------------------------------------
// Exponentially forgetting RLS.

struct EfRlsState {
  Matrix p;
  ParameterVector theta;
};

// P+ = inversion_lemma_update(P, phi, alpha); theta+ = theta + P+ phi^T r.
// Throws ConditioningError when the covariance update breaks down and
// NumericalError if the estimate becomes non-finite.
EfRlsState ef_rls_step(const EfRlsState& state, const Matrix& phi, const Vector& y, double alpha);

// ---------------------------------------------------------------------------
// Greedily-weighted RLS.

struct GrlsState {
  Matrix p;  // inverse Hessian of the weighted cost, SPD
  ParameterVector theta;
  GreedySet greedy;
  double alpha = 0.94;
  std::size_t step = 0;  // index of the next datum
  // When false every datum is rejected from the excitation set and the
  // recursion reduces to EF-RLS.
  bool use_excitation_set = true;

  // Outcome of the most recent step.
  bool last_accepted = false;
  double last_kappa_before = kInfinity;
  double last_kappa_after = kInfinity;
};

// Zero excitation set, P_0 = p0, theta_0 = theta0. alpha must lie in (0, 1).
GrlsState make_grls_state(const Matrix& p0, const ParameterVector& theta0, double alpha,
                          bool use_excitation_set = true);

// One pass of the greedy-set test, regressor assembly, covariance update and
// estimate update for datum (phi_k, y_k) with k = state.step.
GrlsState grls_step(const GrlsState& state, const Matrix& phi_k, const Vector& y_k);

// Same, with phi and y = x_next - x_k formed from the states.
GrlsState grls_step(const GrlsState& state, const Regressor& reg, const Vector& x_k, const Vector& x_next);

// ---------------------------------------------------------------------------
// Multi-model identifier with an initial-excitation correction. This is a
// reconstruction used as a baseline: every model follows pure_gd_step; once
// the accumulated data are initially exciting each model receives one
// ridge-regularized least-squares correction toward the window solution,
// anchored at its own estimate; the reported estimate is the model with the
// lowest discounted empirical cost.

struct IeMmaiConfig {
  std::size_t models = 3;
  double spread = 0.5;  // theta_j = theta0 .* (1 + U(-spread, spread))
  std::uint64_t seed = 7;
  double ie_threshold = 1e-4;  // lambda_min required of the excitation window
  double ridge = 1.0;          // weight of the anchor in the correction
  double cost_alpha = 0.94;    // discount of the selection cost
};

struct IeMmaiState {
  std::vector<ParameterVector> models;
  Matrix window_h;
  Vector window_upsilon;
  bool corrected = false;
  std::size_t correction_step = 0;
  // Sufficient statistics of the discounted empirical cost.
  Matrix cost_h;
  Vector cost_b;
  double cost_c = 0.0;
  std::size_t step = 0;
  IeMmaiConfig config;
};

IeMmaiState make_ie_mmai(const ParameterVector& theta0, const IeMmaiConfig& config);

// Uses the given models verbatim instead of sampling them.
IeMmaiState make_ie_mmai(std::vector<ParameterVector> models, const IeMmaiConfig& config);

struct IeMmaiStep {
  IeMmaiState state;
  ParameterVector selected;
  std::size_t selected_index = 0;
};

IeMmaiStep ie_mmai_step(const IeMmaiState& state, const Matrix& phi, const Vector& y);

// 1/2 sum_i cost_alpha^{k-i} ||y_i - phi_i theta||^2 over the data seen so far.
double ie_mmai_model_cost(const IeMmaiState& state, const ParameterVector& theta);

// ---------------------------------------------------------------------------
// Weighted least-squares cost minimized by GRLS, solved in batch.

struct WeightedCostSpec {
  double alpha = 0.94;
  Matrix p0_inv;
  ParameterVector theta0;
  std::set<std::size_t> greedy_indices;
};

// w_{i,k}: (1 - alpha) sum_{l=i}^{k} alpha^{k-l} for greedy i, alpha^{k-i}
// otherwise. Greedy indices above k are ignored.
double cost_weight(const WeightedCostSpec& spec, std::size_t i, std::size_t k);

// Limit of cost_weight as k grows: 1 for greedy i, alpha^{k-i} otherwise.
double limiting_cost_weights(const WeightedCostSpec& spec, std::size_t i, std::size_t k);

// sum_i w_{i,k} ||r_i(theta)||^2 + alpha^{k+1} ||theta - theta0||^2_{P0^{-1}}
double weighted_cost(const Trajectory& traj, const Regressor& reg, const WeightedCostSpec& spec,
                     std::size_t k, const ParameterVector& theta);

// Unique minimizer -A_k^{-1} b_k of weighted_cost at step k, by forming the
// normal equations directly.
ParameterVector batch_oracle(const Trajectory& traj, const Regressor& reg, const WeightedCostSpec& spec,
                             std::size_t k);

}  // namespace sisid

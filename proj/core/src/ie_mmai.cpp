#include <random>

#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"

namespace sisid {

IeMmaiState make_ie_mmai(const ParameterVector& theta0, const IeMmaiConfig& config) {
  if (config.models == 0) throw DomainError("ie_mmai: at least one model is required");
  if (!(config.spread >= 0.0)) throw DomainError("ie_mmai: spread must be nonnegative");
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> jitter(-config.spread, config.spread);
  std::vector<ParameterVector> models;
  models.reserve(config.models);
  for (std::size_t j = 0; j < config.models; ++j) {
    ParameterVector theta = theta0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) *= 1.0 + jitter(rng);
    models.push_back(std::move(theta));
  }
  return make_ie_mmai(std::move(models), config);
}

IeMmaiState make_ie_mmai(std::vector<ParameterVector> models, const IeMmaiConfig& config) {
  if (models.empty()) throw DomainError("ie_mmai: at least one model is required");
  if (!(config.ie_threshold > 0.0)) throw DomainError("ie_mmai: ie_threshold must be positive");
  if (!(config.ridge > 0.0)) throw DomainError("ie_mmai: ridge must be positive");
  if (!(config.cost_alpha > 0.0 && config.cost_alpha <= 1.0)) {
    throw DomainError("ie_mmai: cost_alpha must lie in (0, 1]");
  }
  const Eigen::Index p = models.front().size();
  for (const auto& m : models) {
    if (m.size() != p) throw DimensionError("ie_mmai: models have different dimensions");
  }
  IeMmaiState state;
  state.models = std::move(models);
  state.window_h = Matrix::Zero(p, p);
  state.window_upsilon = Vector::Zero(p);
  state.cost_h = Matrix::Zero(p, p);
  state.cost_b = Vector::Zero(p);
  state.config = config;
  state.config.models = state.models.size();
  return state;
}

double ie_mmai_model_cost(const IeMmaiState& state, const ParameterVector& theta) {
  return 0.5 * (theta.dot(state.cost_h * theta) - 2.0 * state.cost_b.dot(theta) + state.cost_c);
}

IeMmaiStep ie_mmai_step(const IeMmaiState& state, const Matrix& phi, const Vector& y) {
  IeMmaiStep out{state, {}, 0};
  IeMmaiState& next = out.state;
  const double a = state.config.cost_alpha;
  const Matrix outer = phi.transpose() * phi;
  const Vector cross = phi.transpose() * y;

  next.cost_h = a * next.cost_h + outer;
  next.cost_b = a * next.cost_b + cross;
  next.cost_c = a * next.cost_c + y.squaredNorm();

  for (auto& theta : next.models) theta = pure_gd_step(theta, phi, y);

  if (!next.corrected) {
    next.window_h += outer;
    next.window_upsilon += cross;
    if (min_eigenvalue_sym(symmetrized(next.window_h)) >= state.config.ie_threshold) {
      const double rho = state.config.ridge;
      Matrix a_ridge = next.window_h;
      a_ridge.diagonal().array() += rho;
      for (auto& theta : next.models) theta = solve_spd(a_ridge, next.window_upsilon + rho * theta);
      next.corrected = true;
      next.correction_step = state.step;
    }
  }
  next.step = state.step + 1;

  double best = kInfinity;
  for (std::size_t j = 0; j < next.models.size(); ++j) {
    const double c = ie_mmai_model_cost(next, next.models[j]);
    if (c < best) {
      best = c;
      out.selected_index = j;
    }
  }
  out.selected = next.models[out.selected_index];
  return out;
}

}  // namespace sisid

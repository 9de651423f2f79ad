#include "sisid/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "sisid/csv.hpp"
#include "sisid/errors.hpp"

namespace sisid {
namespace {

// Independent engine seeds derived from one user seed.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void validate_noise(const NoiseSpec& noise) {
  if (!(noise.process_std >= 0.0) || !(noise.observation_std >= 0.0) || !(noise.bound_nu >= 0.0)) {
    throw DomainError("noise: standard deviations and bound must be nonnegative");
  }
  if (noise.process_std > 0.0 && noise.bound_nu <= 0.0) {
    throw DomainError("noise: bound_nu must be positive when process_std > 0");
  }
}

class NoiseSource {
 public:
  explicit NoiseSource(const NoiseSpec& spec)
      : spec_(spec), process_rng_(splitmix64(spec.seed)), observation_rng_(splitmix64(~spec.seed)) {}

  // Gaussian vector resampled until its norm is within bound_nu.
  Vector process(Eigen::Index n) {
    Vector xi = Vector::Zero(n);
    if (spec_.process_std == 0.0) return xi;
    std::normal_distribution<double> dist(0.0, spec_.process_std);
    do {
      for (Eigen::Index i = 0; i < n; ++i) xi(i) = dist(process_rng_);
    } while (xi.norm() > spec_.bound_nu);
    return xi;
  }

  Vector observation(Eigen::Index n) {
    Vector eta = Vector::Zero(n);
    if (spec_.observation_std == 0.0) return eta;
    std::normal_distribution<double> dist(0.0, spec_.observation_std);
    for (Eigen::Index i = 0; i < n; ++i) eta(i) = dist(observation_rng_);
    return eta;
  }

 private:
  NoiseSpec spec_;
  std::mt19937_64 process_rng_;
  std::mt19937_64 observation_rng_;
};

Trajectory finish(std::vector<Vector> latent, std::vector<Vector> applied,
                  const std::optional<NoiseSpec>& noise) {
  Trajectory traj;
  traj.states = latent;
  if (noise && noise->observation_std > 0.0) {
    NoiseSource source(*noise);
    for (auto& s : traj.states) s += source.observation(s.size());
  }
  traj.observations.reserve(latent.size() - 1);
  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    traj.observations.push_back(traj.states[k + 1] - traj.states[k]);
  }
  traj.latent_states = std::move(latent);
  traj.noise_applied = std::move(applied);
  return traj;
}

}  // namespace

double SisParams::reproduction_number() const {
  if (gamma == 0.0) throw DomainError("reproduction_number: gamma is zero");
  return beta / gamma;
}

double SisParams::endemic_level() const {
  if (beta == 0.0) throw DomainError("endemic_level: beta is zero");
  return 1.0 - gamma / beta;
}

double reproduction_number(const SisParams& params) { return params.reproduction_number(); }

void validate_for_simulation(const SisParams& params) {
  if (!(params.beta >= 0.0 && params.beta <= 1.0)) {
    throw DomainError("beta must lie in [0, 1], got " + std::to_string(params.beta));
  }
  if (!(params.gamma >= 0.0 && params.gamma <= 1.0)) {
    throw DomainError("gamma must lie in [0, 1], got " + std::to_string(params.gamma));
  }
}

Matrix Regressor::operator()(const Vector& x) const {
  Matrix out = map(x);
  if (out.rows() != n || out.cols() != p) {
    throw DimensionError("regressor returned " + std::to_string(out.rows()) + "x" +
                         std::to_string(out.cols()) + ", expected " + std::to_string(n) + "x" +
                         std::to_string(p));
  }
  return out;
}

double sis_step(double x, const SisParams& params) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("sis_step: state " + std::to_string(x) + " outside [0, 1]");
  }
  return x + (1.0 - x) * params.beta * x - params.gamma * x;
}

Trajectory simulate(double x0, const SisParams& params, std::size_t steps,
                    const std::optional<NoiseSpec>& noise) {
  validate_for_simulation(params);
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError("simulate: x0 outside [0, 1]");
  if (steps < 1) throw DomainError("simulate: steps must be at least 1");
  if (noise) validate_noise(*noise);

  std::optional<NoiseSource> source;
  if (noise) source.emplace(*noise);

  std::vector<Vector> latent;
  std::vector<Vector> applied;
  latent.reserve(steps + 1);
  applied.reserve(steps);
  latent.push_back(Vector::Constant(1, x0));
  double x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double clean = sis_step(x, params);
    double next = clean;
    if (source) next = std::clamp(clean + source->process(1)(0), 0.0, 1.0);
    applied.push_back(Vector::Constant(1, next - clean));
    latent.push_back(Vector::Constant(1, next));
    x = next;
  }
  return finish(std::move(latent), std::move(applied), noise);
}

Trajectory simulate_linear_in_parameters(const Vector& x0, const Regressor& regressor,
                                         const Vector& theta, std::size_t steps,
                                         const std::optional<NoiseSpec>& noise,
                                         const std::optional<StateBox>& box) {
  if (x0.size() != regressor.n) throw DimensionError("simulate: x0 does not match regressor rows");
  if (theta.size() != regressor.p) throw DimensionError("simulate: theta does not match regressor columns");
  if (steps < 1) throw DomainError("simulate: steps must be at least 1");
  if (noise) validate_noise(*noise);

  std::optional<NoiseSource> source;
  if (noise) source.emplace(*noise);

  std::vector<Vector> latent{x0};
  std::vector<Vector> applied;
  latent.reserve(steps + 1);
  applied.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const Vector& x = latent.back();
    const Vector clean = x + regressor(x) * theta;
    Vector next = clean;
    if (source) next += source->process(x.size());
    if (box) next = next.cwiseMax(box->lower).cwiseMin(box->upper);
    applied.push_back(next - clean);
    latent.push_back(std::move(next));
  }
  return finish(std::move(latent), std::move(applied), noise);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.state_dim();
  csv::write_schema_line(os, "sisid.trajectory.v1");
  auto header = [&](const char* name) {
    if (n == 1) {
      os << ',' << name;
      return;
    }
    for (std::size_t i = 0; i < n; ++i) os << ',' << name << '_' << i;
  };
  os << "step";
  header("state");
  header("observation");
  header("noise_applied");
  os << '\n';
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << k;
    for (std::size_t i = 0; i < n; ++i) os << ',' << csv::format(traj.states[k](i));
    for (std::size_t i = 0; i < n; ++i) {
      os << ',';
      if (k < traj.observations.size()) os << csv::format(traj.observations[k](i));
    }
    for (std::size_t i = 0; i < n; ++i) {
      os << ',';
      if (k < traj.noise_applied.size()) os << csv::format(traj.noise_applied[k](i));
    }
    os << '\n';
  }
}

}  // namespace sisid

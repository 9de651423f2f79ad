#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sisid/numerics.hpp"

namespace sisid {

// theta = [beta, gamma]^T of the scalar SIS model, both per time step.
struct SisParams {
  double beta = 0.0;
  double gamma = 0.0;

  // beta / gamma. Throws DomainError when gamma == 0.
  double reproduction_number() const;

  // Nonzero endemic equilibrium 1 - gamma/beta (may be <= 0 when R0 <= 1).
  double endemic_level() const;

  Vector as_vector() const { return Vector{{beta, gamma}}; }

  bool operator==(const SisParams&) const = default;
};

double reproduction_number(const SisParams& params);

// Throws DomainError unless 0 <= beta, gamma <= 1.
void validate_for_simulation(const SisParams& params);

struct NoiseSpec {
  double process_std = 1e-3;
  double observation_std = 0.0;
  double bound_nu = 5e-3;  // |xi_k| <= bound_nu, enforced by resampling
  std::uint64_t seed = 1;

  bool operator==(const NoiseSpec&) const = default;
};

struct Trajectory {
  // What an identifier sees: latent states plus observation noise.
  std::vector<Vector> states;
  // Noise-free-observation states x_0..x_K.
  std::vector<Vector> latent_states;
  // y_k = states[k+1] - states[k]
  std::vector<Vector> observations;
  // Process noise actually applied at each step (after clamping).
  std::vector<Vector> noise_applied;

  std::size_t step_count() const { return observations.size(); }
  std::size_t state_dim() const { return states.empty() ? 0 : static_cast<std::size_t>(states.front().size()); }

  // Scalar accessors for one-dimensional systems such as SIS.
  double state(std::size_t k) const { return states[k](0); }
  double observation(std::size_t k) const { return observations[k](0); }
};

// phi: X -> R^{n x p}
struct Regressor {
  std::function<Matrix(const Vector&)> map;
  Eigen::Index n = 0;
  Eigen::Index p = 0;

  // Evaluates the map and checks the output shape.
  Matrix operator()(const Vector& x) const;
};

// x + (1 - x) beta x - gamma x. Throws DomainError if x is outside [0, 1].
double sis_step(double x, const SisParams& params);

// Iterates sis_step from x0. Process noise (if any) is added to each new
// state which is then clamped to [0, 1]; observation noise is added to the
// stored states before observations are formed. Deterministic in the seed.
Trajectory simulate(double x0, const SisParams& params, std::size_t steps,
                    const std::optional<NoiseSpec>& noise = std::nullopt);

// General x_{k+1} = x_k + phi(x_k) theta + xi_k with optional clamping box.
struct StateBox {
  double lower = 0.0;
  double upper = 1.0;
};

Trajectory simulate_linear_in_parameters(const Vector& x0, const Regressor& regressor,
                                         const Vector& theta, std::size_t steps,
                                         const std::optional<NoiseSpec>& noise = std::nullopt,
                                         const std::optional<StateBox>& box = std::nullopt);

// CSV with columns step,state,observation,noise_applied. The final state
// row has empty observation and noise cells. Multi-dimensional states are
// written as state_0,state_1,... and likewise for the other columns.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace sisid

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sisid/config.hpp"
#include "sisid/dynamics.hpp"
#include "sisid/excitation.hpp"

namespace sisid {

// 1/2 sum_{i=0}^{k} alpha^{k-i} ||r_i(theta)||^2
double empirical_cost(const Trajectory& traj, const Regressor& reg, const Vector& theta, double alpha,
                      std::size_t k);

// kappa(H_k) for H_k = alpha H_{k-1} + phi_k^T phi_k, one entry per datum.
std::vector<double> fim_condition_trace(const Trajectory& traj, const Regressor& reg, double alpha);

// max_j |theta_hat_j - theta_j| / theta_j, absolute error for a zero truth.
double max_relative_error(const Vector& theta_hat, const Vector& truth);

struct EstimatorMetrics {
  EstimatorKind estimator = EstimatorKind::Grls;
  double beta_hat = 0.0;
  double gamma_hat = 0.0;
  std::optional<double> r0_hat;  // absent when gamma_hat == 0
  double max_rel_error = 0.0;
  double log10_max_rel_error = 0.0;
  std::optional<double> kappa_p;       // RLS-type estimators only
  std::optional<double> lambda_max_p;  // RLS-type estimators only
  std::optional<bool> accepted;        // GRLS only, absent at step 0
  // Set from the step at which the estimator hit a numerical error; the
  // reported values are then its last valid state.
  bool diverged = false;
};

// Row k holds the estimates after k data points and kappa of the
// discounted FIM over those points (+inf at k = 0).
struct MetricsRow {
  std::size_t step = 0;
  double kappa_fim = kInfinity;
  std::vector<EstimatorMetrics> estimators;

  const EstimatorMetrics* find(EstimatorKind kind) const;
};

struct NumericalFailure {
  EstimatorKind estimator = EstimatorKind::Grls;
  std::size_t step = 0;  // datum index whose update failed
  std::string message;
};

struct OutputFile {
  std::string name;
  std::string hash;  // FNV-1a 64, hex
  std::size_t bytes = 0;
};

struct ExperimentResult {
  ExperimentConfig config;
  Trajectory trajectory;
  std::vector<MetricsRow> rows;
  std::vector<OfferRecord> greedy_trace;  // empty without a GRLS estimator
  std::vector<std::size_t> greedy_indices;
  std::vector<NumericalFailure> failures;
  std::filesystem::path output_dir;
  std::vector<OutputFile> files;
  double wall_seconds = 0.0;

  int exit_status() const { return failures.empty() ? 0 : 1; }
};

struct RunOptions {
  // Replaces the working directory as the base of relative output paths;
  // absolute outputs keep only their last component.
  std::optional<std::filesystem::path> output_root;
  bool write_files = true;
};

// Resolves where a run writes its files.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const RunOptions& options);

// Simulates, drives all configured estimators in lockstep and, unless
// disabled, writes one CSV per emitted trace plus manifest.json. Numerical
// errors freeze the failing estimator and are recorded, never thrown.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Columns: step,estimator,beta_hat,gamma_hat,r0_hat,max_rel_error,
// log10_max_rel_error,kappa_fim,kappa_p,lambda_max_p,accepted,diverged
void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows);

std::string fnv1a64_hex(std::string_view bytes);

struct SweepPoint {
  std::string value;
  ExperimentConfig config;
};

// One config per value with `param` overridden and output placed under
// <output>/<param>=<value>.
std::vector<SweepPoint> plan_sweep(const KeyValueMap& base, const std::string& param,
                                   const std::vector<std::string>& values);

// Runs the planned configs on up to `jobs` threads; results keep plan order.
std::vector<ExperimentResult> run_sweep(const std::vector<SweepPoint>& plan, std::size_t jobs,
                                        const RunOptions& options = {});

}  // namespace sisid

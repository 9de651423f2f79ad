#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"
#include "sisid/experiment.hpp"

namespace sisid {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sisid_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig short_config() {
  auto c = parse_config(
      "name = short\nsteps = 300\nnoise = on\nnoise.seed = 12\n"
      "estimators = pure_gd, ef_rls, ie_mmai, grls\noutput = short\n");
  return c;
}

TEST(EmpiricalCost, MatchesDirectSum) {
  const Trajectory traj = simulate(0.01, {0.8076, 0.2692}, 40, NoiseSpec{1e-3, 0.0, 5e-3, 1});
  const auto xs = testing::scalar_states(traj);
  const Eigen::Vector2d theta(0.5, 0.1);
  for (std::size_t k : {0u, 1u, 17u, 39u}) {
    EXPECT_NEAR(empirical_cost(traj, make_sis_regressor(), theta, 0.94, k),
                testing::direct_empirical_cost(xs, theta, 0.94, k), 1e-15);
  }
  EXPECT_THROW(empirical_cost(traj, make_sis_regressor(), theta, 0.94, 40), DimensionError);
}

TEST(EmpiricalCost, ZeroAtTruthWithoutNoise) {
  const SisParams params{0.3, 0.2};
  const Trajectory traj = simulate(0.01, params, 50);
  EXPECT_NEAR(empirical_cost(traj, make_sis_regressor(), params.as_vector(), 0.9, 49), 0.0, 1e-30);
}

TEST(FimConditionTrace, MatchesAccumulator) {
  const Trajectory traj = simulate(0.01, {0.8076, 0.2692}, 100);
  const auto trace = fim_condition_trace(traj, make_sis_regressor(), 0.94);
  ASSERT_EQ(trace.size(), traj.step_count());
  EXPECT_EQ(trace.front(), kInfinity);
  FisherInfo fim(2, 0.94);
  for (std::size_t k = 0; k < traj.step_count(); ++k) {
    fim.accumulate(sis_regressor(traj.state(k)));
    const double expected = fim.condition_number();
    if (std::isinf(expected)) {
      ASSERT_TRUE(std::isinf(trace[k]));
    } else {
      ASSERT_NEAR(trace[k], expected, 1e-9 * expected);
    }
  }
}

TEST(MaxRelativeError, Examples) {
  EXPECT_NEAR(max_relative_error(Vector{{1.1, 2.0}}, Vector{{1.0, 2.0}}), 0.1, 1e-15);
  EXPECT_NEAR(max_relative_error(Vector{{0.5, 0.3}}, Vector{{1.0, 0.2}}), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(max_relative_error(Vector{{0.0, 0.25}}, Vector{{0.0, 0.5}}), 0.5);
  EXPECT_DOUBLE_EQ(max_relative_error(Vector{{0.1, 0.5}}, Vector{{0.0, 0.5}}), 0.1);
}

TEST(Fnv1a64, KnownVectors) {
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a64_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a64_hex("foobar"), "85944171f73967e8");
}

TEST(RunExperiment, RowLayout) {
  const auto r = run_experiment(short_config(), {std::nullopt, false});
  ASSERT_EQ(r.rows.size(), 301u);
  EXPECT_EQ(r.rows[0].kappa_fim, kInfinity);
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    ASSERT_EQ(r.rows[k].step, k);
    ASSERT_EQ(r.rows[k].estimators.size(), 4u);
  }
  const auto* grls = r.rows[0].find(EstimatorKind::Grls);
  ASSERT_NE(grls, nullptr);
  EXPECT_FALSE(grls->accepted.has_value());
  EXPECT_TRUE(r.rows[1].find(EstimatorKind::Grls)->accepted.value());
  EXPECT_FALSE(r.rows[5].find(EstimatorKind::PureGd)->kappa_p.has_value());
  EXPECT_EQ(r.greedy_trace.size(), 300u);
  EXPECT_TRUE(r.files.empty());
}

TEST(RunExperiment, CovarianceMetricsMatchAnIndependentRun) {
  const auto config = short_config();
  const auto r = run_experiment(config, {std::nullopt, false});
  GrlsState state = make_grls_state(100.0 * Matrix::Identity(2, 2), Vector{{1.0, 1.0}}, 0.94);
  for (std::size_t k = 0; k < r.trajectory.step_count(); ++k) {
    state = grls_step(state, sis_regressor(r.trajectory.state(k)), r.trajectory.observations[k]);
    const auto* m = r.rows[k + 1].find(EstimatorKind::Grls);
    ASSERT_EQ(m->beta_hat, state.theta(0));
    const double kappa = condition_number(state.p);
    ASSERT_NEAR(*m->kappa_p, kappa, 1e-9 * kappa);
    ASSERT_NEAR(*m->lambda_max_p, max_eigenvalue_sym(state.p), 1e-12 * *m->lambda_max_p);
    ASSERT_EQ(*m->accepted, state.last_accepted);
  }
  EXPECT_EQ(r.greedy_indices, state.greedy.indices);
}

TEST(RunExperiment, EstimatorsShareTheTrajectory) {
  const auto r = run_experiment(short_config(), {std::nullopt, false});
  const Trajectory again = simulate(0.01, {0.8076, 0.2692}, 300, NoiseSpec{1e-3, 0.0, 5e-3, 12});
  ASSERT_EQ(again.states.size(), r.trajectory.states.size());
  for (std::size_t k = 0; k < again.states.size(); ++k) ASSERT_EQ(again.states[k], r.trajectory.states[k]);
}

TEST(RunExperiment, OutputsAreBitwiseReproducible) {
  const fs::path a = scratch("repro_a");
  const fs::path b = scratch("repro_b");
  const auto ra = run_experiment(short_config(), {a, true});
  const auto rb = run_experiment(short_config(), {b, true});
  ASSERT_EQ(ra.files.size(), 3u);
  for (std::size_t i = 0; i < ra.files.size(); ++i) {
    EXPECT_EQ(ra.files[i].name, rb.files[i].name);
    EXPECT_EQ(ra.files[i].hash, rb.files[i].hash);
    const std::string bytes = slurp(ra.output_dir / ra.files[i].name);
    EXPECT_EQ(bytes, slurp(rb.output_dir / rb.files[i].name));
    EXPECT_EQ(fnv1a64_hex(bytes), ra.files[i].hash);
    EXPECT_EQ(bytes.size(), ra.files[i].bytes);
  }
  const std::string manifest = slurp(ra.output_dir / "manifest.json");
  EXPECT_NE(manifest.find("\"schema\": \"sisid.manifest.v1\""), std::string::npos);
  EXPECT_NE(manifest.find(ra.files[0].hash), std::string::npos);
  EXPECT_NE(manifest.find("\"seed\": 12"), std::string::npos);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunExperiment, EmitsOnlyRequestedTraces) {
  auto config = short_config();
  config.emit = {TraceKind::Greedy};
  const fs::path root = scratch("emit");
  const auto r = run_experiment(config, {root, true});
  ASSERT_EQ(r.files.size(), 1u);
  EXPECT_EQ(r.files[0].name, "greedy.csv");
  EXPECT_TRUE(fs::exists(root / "short" / "greedy.csv"));
  EXPECT_FALSE(fs::exists(root / "short" / "metrics.csv"));
  EXPECT_TRUE(fs::exists(root / "short" / "manifest.json"));
  EXPECT_EQ(slurp(root / "short" / "greedy.csv").rfind("# schema: sisid.greedy.v1\n", 0), 0u);
  fs::remove_all(root);
}

TEST(RunExperiment, OutputDirectoryResolution) {
  ExperimentConfig c = short_config();
  c.output = "runs/a";
  EXPECT_EQ(resolve_output_dir(c, {fs::path("/tmp/root"), true}), fs::path("/tmp/root/runs/a"));
  c.output = "/abs/place";
  EXPECT_EQ(resolve_output_dir(c, {fs::path("/tmp/root"), true}), fs::path("/tmp/root/place"));
  EXPECT_EQ(resolve_output_dir(c, {}), fs::path("/abs/place"));
}

TEST(RunExperiment, InvalidConfigIsRejectedBeforeRunning) {
  ExperimentConfig c = short_config();
  c.steps = 0;
  try {
    run_experiment(c, {std::nullopt, false});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "steps");
  }
}

TEST(RunExperiment, GradientDescentOnTheSlowEpidemic) {
  const auto config = load_config(fs::path(SISID_CONFIG_DIR) / "slow_epidemic.cfg");
  const auto r = run_experiment(config, {std::nullopt, false});
  const auto* m = r.rows.back().find(EstimatorKind::PureGd);
  EXPECT_NEAR(m->beta_hat, 0.0851, 5e-4);
  EXPECT_NEAR(m->gamma_hat, 0.0284, 5e-4);
  EXPECT_NEAR(*m->r0_hat, 3.0, 1e-3);
  EXPECT_GT(m->max_rel_error, 0.2);
  EXPECT_EQ(r.exit_status(), 0);
}

TEST(RunExperiment, NumericalFailureIsRecorded) {
  const auto config = load_config(fs::path(SISID_CONFIG_DIR) / "comparison.cfg");
  const auto r = run_experiment(config, {std::nullopt, false});
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].estimator, EstimatorKind::EfRls);
  EXPECT_EQ(r.exit_status(), 1);
  const auto& last = r.rows.back();
  EXPECT_TRUE(last.find(EstimatorKind::EfRls)->diverged);
  EXPECT_FALSE(last.find(EstimatorKind::Grls)->diverged);
  EXPECT_LT(last.find(EstimatorKind::Grls)->max_rel_error, 1e-10);
  const auto& before = r.rows[r.failures[0].step];
  EXPECT_FALSE(before.find(EstimatorKind::EfRls)->diverged);
  EXPECT_EQ(before.find(EstimatorKind::EfRls)->beta_hat, last.find(EstimatorKind::EfRls)->beta_hat);
}

TEST(MetricsCsv, Header) {
  const auto r = run_experiment(short_config(), {std::nullopt, false});
  std::ostringstream os;
  write_metrics_csv(os, r.rows);
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("# schema: sisid.metrics.v1\nstep,estimator,beta_hat,gamma_hat,r0_hat,max_rel_error,"
                       "log10_max_rel_error,kappa_fim,kappa_p,lambda_max_p,accepted,diverged\n0,pure_gd,",
                       0),
            0u);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  EXPECT_EQ(lines, 2u + 301u * 4u);
}

TEST(Sweep, PlanAndParallelRun) {
  const auto base = parse_key_values("name = s\nsteps = 120\nestimators = grls\noutput = sweep\nemit = metrics\n");
  const auto plan = plan_sweep(base, "grls.alpha", {"0.9", "0.94", "0.98"});
  ASSERT_EQ(plan.size(), 3u);
  EXPECT_EQ(plan[1].config.estimators[0].alpha, 0.94);
  EXPECT_EQ(plan[2].config.output, "sweep/grls.alpha=0.98");
  EXPECT_THROW(plan_sweep(base, "grls.alpha", {"2"}), ConfigError);

  const fs::path root_a = scratch("sweep_a");
  const fs::path root_b = scratch("sweep_b");
  const auto serial = run_sweep(plan, 1, {root_a, true});
  const auto parallel = run_sweep(plan, 3, {root_b, true});
  ASSERT_EQ(parallel.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(parallel[i].config, plan[i].config);
    EXPECT_EQ(parallel[i].files[0].hash, serial[i].files[0].hash);
  }
  EXPECT_NE(serial[0].files[0].hash, serial[2].files[0].hash);
  fs::remove_all(root_a);
  fs::remove_all(root_b);
}

}  // namespace
}  // namespace sisid

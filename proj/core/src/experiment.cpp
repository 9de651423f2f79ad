#include "sisid/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sisid/csv.hpp"
#include "sisid/errors.hpp"
#include "sisid/estimators.hpp"

#ifndef SISID_VERSION_STRING
#define SISID_VERSION_STRING "unknown"
#endif

namespace sisid {
namespace {

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

class Driver {
 public:
  explicit Driver(const EstimatorConfig& cfg) : cfg_(cfg), theta_(to_vector(cfg.theta0)) {
    const Matrix p0 = cfg.p0_scale * Matrix::Identity(theta_.size(), theta_.size());
    switch (cfg.kind) {
      case EstimatorKind::PureGd:
        break;
      case EstimatorKind::EfRls:
        ef_ = EfRlsState{p0, theta_};
        break;
      case EstimatorKind::Grls:
        grls_ = make_grls_state(p0, theta_, cfg.alpha);
        break;
      case EstimatorKind::IeMmai: {
        IeMmaiConfig mc;
        mc.models = cfg.models;
        mc.spread = cfg.spread;
        mc.seed = cfg.seed;
        mc.ie_threshold = cfg.ie_threshold;
        mc.ridge = cfg.ridge;
        mc.cost_alpha = cfg.alpha;
        mmai_ = make_ie_mmai(theta_, mc);
        theta_ = mmai_->models.front();
        break;
      }
    }
  }

  EstimatorKind kind() const { return cfg_.kind; }
  bool diverged() const { return diverged_; }
  const std::optional<GrlsState>& grls() const { return grls_; }

  // Returns the error message on failure; the previous state is retained.
  std::optional<std::string> step(const Matrix& phi, const Vector& y) {
    if (diverged_) return std::nullopt;
    try {
      switch (cfg_.kind) {
        case EstimatorKind::PureGd:
          theta_ = pure_gd_step(theta_, phi, y);
          break;
        case EstimatorKind::EfRls:
          ef_ = ef_rls_step(*ef_, phi, y, cfg_.alpha);
          theta_ = ef_->theta;
          break;
        case EstimatorKind::Grls:
          grls_ = grls_step(*grls_, phi, y);
          theta_ = grls_->theta;
          accepted_ = grls_->last_accepted;
          break;
        case EstimatorKind::IeMmai: {
          auto out = ie_mmai_step(*mmai_, phi, y);
          mmai_ = std::move(out.state);
          theta_ = out.selected;
          break;
        }
      }
    } catch (const Error& e) {
      diverged_ = true;
      return std::string(e.what());
    }
    return std::nullopt;
  }

  EstimatorMetrics metrics(const Vector& truth) const {
    EstimatorMetrics m;
    m.estimator = cfg_.kind;
    m.beta_hat = theta_(0);
    m.gamma_hat = theta_(1);
    if (m.gamma_hat != 0.0) m.r0_hat = m.beta_hat / m.gamma_hat;
    m.max_rel_error = max_relative_error(theta_, truth);
    m.log10_max_rel_error = std::log10(m.max_rel_error);
    const Matrix* p = ef_ ? &ef_->p : (grls_ ? &grls_->p : nullptr);
    if (p) {
      m.kappa_p = condition_number(*p);
      m.lambda_max_p = max_eigenvalue_sym(*p);
    }
    if (cfg_.kind == EstimatorKind::Grls) m.accepted = accepted_;
    m.diverged = diverged_;
    return m;
  }

 private:
  EstimatorConfig cfg_;
  Vector theta_;
  std::optional<EfRlsState> ef_;
  std::optional<GrlsState> grls_;
  std::optional<IeMmaiState> mmai_;
  std::optional<bool> accepted_;
  bool diverged_ = false;
};

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& contents,
                std::vector<OutputFile>* files) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigError("output", "cannot write '" + (dir / name).string() + "'");
  out << contents;
  if (!out) throw ConfigError("output", "failed writing '" + (dir / name).string() + "'");
  if (files) files->push_back({name, fnv1a64_hex(contents), contents.size()});
}

std::string manifest_json(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = "sisid.manifest.v1";
  j["library_version"] = SISID_VERSION_STRING;
  j["config"] = nlohmann::ordered_json::parse(to_json(r.config));
  j["config_text"] = to_text(r.config);
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  if (r.config.noise) seeds["noise"] = r.config.noise->seed;
  for (const auto& e : r.config.estimators) {
    if (e.kind == EstimatorKind::IeMmai) seeds["ie_mmai"] = e.seed;
  }
  j["seeds"] = seeds;
  j["wall_time_seconds"] = r.wall_seconds;
  j["status"] = r.exit_status();
  auto& errors = j["numerical_errors"] = nlohmann::ordered_json::array();
  for (const auto& f : r.failures) {
    errors.push_back({{"estimator", to_string(f.estimator)}, {"step", f.step}, {"message", f.message}});
  }
  auto& files = j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : r.files) files.push_back({{"name", f.name}, {"fnv1a64", f.hash}, {"bytes", f.bytes}});
  return j.dump(2) + "\n";
}

}  // namespace

double empirical_cost(const Trajectory& traj, const Regressor& reg, const Vector& theta, double alpha,
                      std::size_t k) {
  if (k >= traj.step_count()) throw DimensionError("empirical_cost: step beyond trajectory");
  double total = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    // Horner-style discounting: total_i = alpha * total_{i-1} + ||r_i||^2.
    total = alpha * total + residual(traj.observations[i], reg(traj.states[i]), theta).squaredNorm();
  }
  return 0.5 * total;
}

std::vector<double> fim_condition_trace(const Trajectory& traj, const Regressor& reg, double alpha) {
  FisherInfo fim(reg.p, alpha);
  std::vector<double> out;
  out.reserve(traj.step_count());
  for (std::size_t k = 0; k < traj.step_count(); ++k) {
    fim.accumulate(reg(traj.states[k]));
    out.push_back(fim.condition_number());
  }
  return out;
}

double max_relative_error(const Vector& theta_hat, const Vector& truth) {
  if (theta_hat.size() != truth.size()) throw DimensionError("max_relative_error: size mismatch");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < truth.size(); ++j) {
    const double err = std::abs(theta_hat(j) - truth(j));
    worst = std::max(worst, truth(j) != 0.0 ? err / std::abs(truth(j)) : err);
  }
  return worst;
}

const EstimatorMetrics* MetricsRow::find(EstimatorKind kind) const {
  for (const auto& m : estimators) {
    if (m.estimator == kind) return &m;
  }
  return nullptr;
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricsRow>& rows) {
  csv::write_schema_line(os, "sisid.metrics.v1");
  os << "step,estimator,beta_hat,gamma_hat,r0_hat,max_rel_error,log10_max_rel_error,kappa_fim,kappa_p,"
        "lambda_max_p,accepted,diverged\n";
  for (const auto& row : rows) {
    for (const auto& m : row.estimators) {
      os << row.step << ',' << to_string(m.estimator) << ',' << csv::format(m.beta_hat) << ','
         << csv::format(m.gamma_hat) << ',' << csv::format(m.r0_hat) << ',' << csv::format(m.max_rel_error)
         << ',' << csv::format(m.log10_max_rel_error) << ',' << csv::format(row.kappa_fim) << ','
         << csv::format(m.kappa_p) << ',' << csv::format(m.lambda_max_p) << ',';
      if (m.accepted) os << (*m.accepted ? 1 : 0);
      os << ',' << (m.diverged ? 1 : 0) << '\n';
    }
  }
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const RunOptions& options) {
  std::filesystem::path out(config.output);
  if (!options.output_root) return out;
  if (out.is_absolute()) return *options.output_root / out.filename();
  return *options.output_root / out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();

  ExperimentResult result;
  result.config = config;
  result.trajectory = simulate(config.x0, config.sis, config.steps, config.noise);
  const Trajectory& traj = result.trajectory;
  const Regressor reg = make_sis_regressor();
  const Vector truth = config.sis.as_vector();
  const std::vector<double> fim_trace = fim_condition_trace(traj, reg, config.fim_alpha);

  std::vector<Driver> drivers;
  drivers.reserve(config.estimators.size());
  for (const auto& e : config.estimators) drivers.emplace_back(e);
  const Driver* greedy_source = nullptr;
  for (const auto& d : drivers) {
    if (d.kind() == EstimatorKind::Grls) {
      greedy_source = &d;
      break;
    }
  }

  auto snapshot = [&](std::size_t step) {
    MetricsRow row;
    row.step = step;
    row.kappa_fim = step == 0 ? kInfinity : fim_trace[step - 1];
    for (const auto& d : drivers) row.estimators.push_back(d.metrics(truth));
    return row;
  };

  result.rows.reserve(traj.step_count() + 1);
  result.rows.push_back(snapshot(0));
  for (std::size_t k = 0; k < traj.step_count(); ++k) {
    const Matrix phi = reg(traj.states[k]);
    const Vector& y = traj.observations[k];
    for (auto& d : drivers) {
      const bool was_diverged = d.diverged();
      if (auto err = d.step(phi, y)) result.failures.push_back({d.kind(), k, *err});
      if (&d == greedy_source && !was_diverged && !d.diverged()) {
        const GrlsState& g = *d.grls();
        result.greedy_trace.push_back({k, g.last_accepted, g.last_kappa_before, g.last_kappa_after});
      }
    }
    result.rows.push_back(snapshot(k + 1));
  }
  if (greedy_source) result.greedy_indices = greedy_source->grls()->greedy.indices;

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (options.write_files) {
    result.output_dir = resolve_output_dir(config, options);
    std::error_code ec;
    std::filesystem::create_directories(result.output_dir, ec);
    if (ec) throw ConfigError("output", "cannot create '" + result.output_dir.string() + "': " + ec.message());
    for (auto kind : config.emit) {
      std::ostringstream buf;
      switch (kind) {
        case TraceKind::Trajectory:
          write_trajectory_csv(buf, traj);
          break;
        case TraceKind::Metrics:
          write_metrics_csv(buf, result.rows);
          break;
        case TraceKind::Greedy:
          write_offer_trace_csv(buf, result.greedy_trace);
          break;
      }
      write_file(result.output_dir, std::string(to_string(kind)) + ".csv", buf.str(), &result.files);
    }
    write_file(result.output_dir, "manifest.json", manifest_json(result), nullptr);
  }
  return result;
}

std::vector<SweepPoint> plan_sweep(const KeyValueMap& base, const std::string& param,
                                   const std::vector<std::string>& values) {
  if (param.empty()) throw ConfigError("--param", "must not be empty");
  if (values.empty()) throw ConfigError("--values", "at least one value is required");
  const ExperimentConfig base_config = config_from_key_values(base);
  std::vector<SweepPoint> plan;
  plan.reserve(values.size());
  for (const auto& value : values) {
    KeyValueMap kv = base;
    kv[param] = value;
    kv["output"] = (std::filesystem::path(base_config.output) / (param + "=" + value)).string();
    plan.push_back({value, config_from_key_values(kv)});
  }
  return plan;
}

std::vector<ExperimentResult> run_sweep(const std::vector<SweepPoint>& plan, std::size_t jobs,
                                        const RunOptions& options) {
  std::vector<ExperimentResult> results(plan.size());
  std::vector<std::exception_ptr> errors(plan.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      try {
        results[i] = run_experiment(plan[i].config, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, plan.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace sisid

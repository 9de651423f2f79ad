// sisid: run, validate and sweep identification experiments.
//
//   sisid run <config>
//   sisid validate <config>
//   sisid sweep <config> --param <key> --values <v1,v2,...> [--jobs N]
//
// SISID_OUTPUT_ROOT, when set, becomes the base directory for outputs.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sisid/config.hpp"
#include "sisid/errors.hpp"
#include "sisid/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

sisid::RunOptions options_from_env() {
  sisid::RunOptions options;
  if (const char* root = std::getenv("SISID_OUTPUT_ROOT"); root && *root) options.output_root = root;
  return options;
}

void report(const sisid::ExperimentResult& r) {
  std::cout << r.config.name << ": " << r.config.steps << " steps, wrote " << r.files.size() << " trace(s) to "
            << r.output_dir.string() << "\n";
  for (const auto& f : r.failures) {
    std::cerr << "  numerical error in " << sisid::to_string(f.estimator) << " at step " << f.step << ": "
              << f.message << "\n";
  }
  if (!r.rows.empty()) {
    for (const auto& m : r.rows.back().estimators) {
      std::cout << "  " << sisid::to_string(m.estimator) << ": beta=" << m.beta_hat << " gamma=" << m.gamma_hat
                << " max_rel_error=" << m.max_rel_error << (m.diverged ? " (diverged)" : "") << "\n";
    }
  }
}

std::vector<std::string> split_values(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    std::string piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    piece.erase(0, piece.find_first_not_of(" \t"));
    piece.erase(piece.find_last_not_of(" \t") + 1);
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online parameter identification experiments for the SIS model"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute an experiment and write its traces");
  run->add_option("config", config_path, "Experiment config file")->required();

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Experiment config file")->required();

  std::string param;
  std::string values;
  std::size_t jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a config once per value of one key");
  sweep->add_option("config", config_path, "Base experiment config file")->required();
  sweep->add_option("--param", param, "Config key to vary")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto config = sisid::load_config(config_path);
      std::cout << "ok: " << config.name << " (" << config.estimators.size() << " estimator(s), " << config.steps
                << " steps)\n";
      return kExitOk;
    }
    if (*run) {
      const auto result = sisid::run_experiment(sisid::load_config(config_path), options_from_env());
      report(result);
      return result.exit_status() == 0 ? kExitOk : kExitNumerical;
    }
    if (*sweep) {
      const auto plan = sisid::plan_sweep(sisid::load_key_values(config_path), param, split_values(values));
      const auto results = sisid::run_sweep(plan, jobs, options_from_env());
      int status = kExitOk;
      for (const auto& r : results) {
        report(r);
        if (r.exit_status() != 0) status = kExitNumerical;
      }
      return status;
    }
  } catch (const sisid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sisid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

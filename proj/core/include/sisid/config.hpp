#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sisid/dynamics.hpp"

namespace sisid {

enum class EstimatorKind { PureGd, EfRls, IeMmai, Grls };

enum class TraceKind { Trajectory, Metrics, Greedy };

std::string_view to_string(EstimatorKind kind);
std::string_view to_string(TraceKind kind);
std::optional<EstimatorKind> parse_estimator_kind(std::string_view text);
std::optional<TraceKind> parse_trace_kind(std::string_view text);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::Grls;
  double alpha = 0.94;
  double p0_scale = 100.0;  // P0 = p0_scale * I
  std::vector<double> theta0{1.0, 1.0};
  // IE-MMAI only.
  std::size_t models = 3;
  double spread = 0.5;
  std::uint64_t seed = 7;
  double ie_threshold = 1e-4;
  double ridge = 1.0;

  bool operator==(const EstimatorConfig&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  SisParams sis{0.8076, 0.2692};
  double x0 = 0.01;
  std::size_t steps = 2000;
  std::optional<NoiseSpec> noise;
  double fim_alpha = 0.94;  // discount of the reported FIM condition trace
  std::vector<EstimatorConfig> estimators;
  std::string output = "out";
  std::vector<TraceKind> emit{TraceKind::Trajectory, TraceKind::Metrics, TraceKind::Greedy};

  bool operator==(const ExperimentConfig&) const = default;
};

// Ordered "key = value" pairs as read from a config file.
using KeyValueMap = std::map<std::string, std::string, std::less<>>;

// Lines are "key = value"; blank lines and lines starting with '#' are
// skipped. Malformed lines and repeated keys raise ConfigError.
KeyValueMap parse_key_values(std::string_view text);

// Builds and validates a config. Unknown keys and bad values raise
// ConfigError naming the key.
ExperimentConfig config_from_key_values(const KeyValueMap& kv);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
KeyValueMap load_key_values(const std::filesystem::path& path);

// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& config);

// Flat text form; parse_config(to_text(c)) == c.
KeyValueMap to_key_values(const ExperimentConfig& config);
std::string to_text(const ExperimentConfig& config);

// JSON echo used in run manifests.
std::string to_json(const ExperimentConfig& config);

}  // namespace sisid

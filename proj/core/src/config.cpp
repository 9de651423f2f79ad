#include "sisid/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sisid/csv.hpp"
#include "sisid/errors.hpp"

namespace sisid {
namespace {

constexpr std::pair<EstimatorKind, std::string_view> kEstimatorNames[] = {
    {EstimatorKind::PureGd, "pure_gd"},
    {EstimatorKind::EfRls, "ef_rls"},
    {EstimatorKind::IeMmai, "ie_mmai"},
    {EstimatorKind::Grls, "grls"},
};

constexpr std::pair<TraceKind, std::string_view> kTraceNames[] = {
    {TraceKind::Trajectory, "trajectory"},
    {TraceKind::Metrics, "metrics"},
    {TraceKind::Greedy, "greedy"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) throw ConfigError(key, "expected a number, got '" + std::string(text) + "'");
  return value;
}

std::uint64_t parse_unsigned(const std::string& key, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, std::string_view text) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ConfigError(key, "expected on/off, got '" + std::string(text) + "'");
}

std::vector<double> parse_vector(const std::string& key, std::string_view text) {
  std::vector<double> out;
  for (const auto& piece : split_list(text)) out.push_back(parse_double(key, piece));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += csv::format(v[i]);
  }
  return out;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  for (const auto& [k, name] : kEstimatorNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string_view to_string(TraceKind kind) {
  for (const auto& [k, name] : kTraceNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view text) {
  for (const auto& [k, name] : kEstimatorNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::optional<TraceKind> parse_trace_kind(std::string_view text) {
  for (const auto& [k, name] : kTraceNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

KeyValueMap parse_key_values(std::string_view text) {
  KeyValueMap kv;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
    if (!kv.emplace(key, value).second) throw ConfigError(key, "key given more than once");
  }
  return kv;
}

ExperimentConfig config_from_key_values(const KeyValueMap& kv) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> used;
  auto get = [&](const std::string& key) -> std::optional<std::string_view> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    used.insert(key);
    return std::string_view(it->second);
  };

  if (auto v = get("name")) config.name = std::string(*v);
  if (auto v = get("beta")) config.sis.beta = parse_double("beta", *v);
  if (auto v = get("gamma")) config.sis.gamma = parse_double("gamma", *v);
  if (auto v = get("x0")) config.x0 = parse_double("x0", *v);
  if (auto v = get("steps")) config.steps = parse_unsigned("steps", *v);
  if (auto v = get("fim_alpha")) config.fim_alpha = parse_double("fim_alpha", *v);
  if (auto v = get("output")) config.output = std::string(*v);

  bool noise_on = false;
  if (auto v = get("noise")) noise_on = parse_bool("noise", *v);
  NoiseSpec noise;
  if (auto v = get("noise.process_std")) noise.process_std = parse_double("noise.process_std", *v);
  if (auto v = get("noise.observation_std")) noise.observation_std = parse_double("noise.observation_std", *v);
  if (auto v = get("noise.bound_nu")) {
    noise.bound_nu = parse_double("noise.bound_nu", *v);
  } else {
    noise.bound_nu = 5.0 * noise.process_std;
  }
  if (auto v = get("noise.seed")) noise.seed = parse_unsigned("noise.seed", *v);
  if (noise_on) config.noise = noise;

  if (auto v = get("emit")) {
    config.emit.clear();
    for (const auto& name : split_list(*v)) {
      const auto kind = parse_trace_kind(name);
      if (!kind) throw ConfigError("emit", "unknown trace kind '" + name + "'");
      if (std::find(config.emit.begin(), config.emit.end(), *kind) != config.emit.end()) {
        throw ConfigError("emit", "trace kind '" + name + "' listed twice");
      }
      config.emit.push_back(*kind);
    }
  }

  EstimatorConfig defaults;
  if (auto v = get("alpha")) defaults.alpha = parse_double("alpha", *v);
  if (auto v = get("p0_scale")) defaults.p0_scale = parse_double("p0_scale", *v);
  if (auto v = get("theta0")) defaults.theta0 = parse_vector("theta0", *v);

  if (auto v = get("estimators")) {
    for (const auto& name : split_list(*v)) {
      const auto kind = parse_estimator_kind(name);
      if (!kind) throw ConfigError("estimators", "unknown estimator kind '" + name + "'");
      for (const auto& e : config.estimators) {
        if (e.kind == *kind) throw ConfigError("estimators", "estimator '" + name + "' listed twice");
      }
      EstimatorConfig e = defaults;
      e.kind = *kind;
      const std::string prefix = name + ".";
      if (auto w = get(prefix + "alpha")) e.alpha = parse_double(prefix + "alpha", *w);
      if (auto w = get(prefix + "p0_scale")) e.p0_scale = parse_double(prefix + "p0_scale", *w);
      if (auto w = get(prefix + "theta0")) e.theta0 = parse_vector(prefix + "theta0", *w);
      if (*kind == EstimatorKind::IeMmai) {
        if (auto w = get(prefix + "models")) e.models = parse_unsigned(prefix + "models", *w);
        if (auto w = get(prefix + "spread")) e.spread = parse_double(prefix + "spread", *w);
        if (auto w = get(prefix + "seed")) e.seed = parse_unsigned(prefix + "seed", *w);
        if (auto w = get(prefix + "ie_threshold")) e.ie_threshold = parse_double(prefix + "ie_threshold", *w);
        if (auto w = get(prefix + "ridge")) e.ridge = parse_double(prefix + "ridge", *w);
      }
      config.estimators.push_back(std::move(e));
    }
  }

  for (const auto& [key, value] : kv) {
    if (used.count(key)) continue;
    const auto dot = key.find('.');
    if (dot != std::string::npos && parse_estimator_kind(std::string_view(key).substr(0, dot))) {
      throw ConfigError(key, "estimator is not listed in 'estimators' or the field is unknown");
    }
    throw ConfigError(key, "unknown key");
  }

  validate(config);
  return config;
}

ExperimentConfig parse_config(std::string_view text) { return config_from_key_values(parse_key_values(text)); }

KeyValueMap load_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_key_values(load_key_values(path));
}

void validate(const ExperimentConfig& c) {
  if (c.name.empty()) throw ConfigError("name", "must not be empty");
  if (!(c.sis.beta >= 0.0 && c.sis.beta <= 1.0)) throw ConfigError("beta", "must lie in [0, 1]");
  if (!(c.sis.gamma >= 0.0 && c.sis.gamma <= 1.0)) throw ConfigError("gamma", "must lie in [0, 1]");
  if (!(c.x0 >= 0.0 && c.x0 <= 1.0)) throw ConfigError("x0", "must lie in [0, 1]");
  if (c.steps == 0) throw ConfigError("steps", "must be at least 1");
  if (!(c.fim_alpha > 0.0 && c.fim_alpha <= 1.0)) throw ConfigError("fim_alpha", "must lie in (0, 1]");
  if (c.output.empty()) throw ConfigError("output", "must not be empty");
  if (c.noise) {
    const NoiseSpec& n = *c.noise;
    if (!(n.process_std >= 0.0)) throw ConfigError("noise.process_std", "must be nonnegative");
    if (!(n.observation_std >= 0.0)) throw ConfigError("noise.observation_std", "must be nonnegative");
    if (!(n.bound_nu >= 0.0)) throw ConfigError("noise.bound_nu", "must be nonnegative");
    if (n.process_std > 0.0 && n.bound_nu <= 0.0) {
      throw ConfigError("noise.bound_nu", "must be positive when noise.process_std > 0");
    }
  }
  if (c.estimators.empty()) throw ConfigError("estimators", "at least one estimator is required");
  for (const auto& e : c.estimators) {
    const std::string prefix(to_string(e.kind));
    if (e.theta0.size() != 2) throw ConfigError(prefix + ".theta0", "SIS estimates have two components");
    if (e.kind == EstimatorKind::Grls && !(e.alpha > 0.0 && e.alpha < 1.0)) {
      throw ConfigError(prefix + ".alpha", "must lie in (0, 1)");
    }
    if (e.kind == EstimatorKind::EfRls && !(e.alpha > 0.0 && e.alpha <= 1.0)) {
      throw ConfigError(prefix + ".alpha", "must lie in (0, 1]");
    }
    if (e.kind == EstimatorKind::IeMmai && !(e.alpha > 0.0 && e.alpha <= 1.0)) {
      throw ConfigError(prefix + ".alpha", "must lie in (0, 1]");
    }
    if (!(e.p0_scale > 0.0)) throw ConfigError(prefix + ".p0_scale", "must be positive");
    if (e.kind == EstimatorKind::IeMmai) {
      if (e.models == 0) throw ConfigError(prefix + ".models", "must be at least 1");
      if (!(e.spread >= 0.0 && e.spread < 1.0)) throw ConfigError(prefix + ".spread", "must lie in [0, 1)");
      if (!(e.ie_threshold > 0.0)) throw ConfigError(prefix + ".ie_threshold", "must be positive");
      if (!(e.ridge > 0.0)) throw ConfigError(prefix + ".ridge", "must be positive");
    }
  }
}

KeyValueMap to_key_values(const ExperimentConfig& c) {
  KeyValueMap kv;
  kv["name"] = c.name;
  kv["beta"] = csv::format(c.sis.beta);
  kv["gamma"] = csv::format(c.sis.gamma);
  kv["x0"] = csv::format(c.x0);
  kv["steps"] = std::to_string(c.steps);
  kv["fim_alpha"] = csv::format(c.fim_alpha);
  kv["output"] = c.output;
  kv["noise"] = c.noise ? "on" : "off";
  if (c.noise) {
    kv["noise.process_std"] = csv::format(c.noise->process_std);
    kv["noise.observation_std"] = csv::format(c.noise->observation_std);
    kv["noise.bound_nu"] = csv::format(c.noise->bound_nu);
    kv["noise.seed"] = std::to_string(c.noise->seed);
  }
  std::string names;
  for (const auto& e : c.estimators) {
    const std::string name(to_string(e.kind));
    names += (names.empty() ? "" : ", ") + name;
    kv[name + ".alpha"] = csv::format(e.alpha);
    kv[name + ".p0_scale"] = csv::format(e.p0_scale);
    kv[name + ".theta0"] = join(e.theta0);
    if (e.kind == EstimatorKind::IeMmai) {
      kv[name + ".models"] = std::to_string(e.models);
      kv[name + ".spread"] = csv::format(e.spread);
      kv[name + ".seed"] = std::to_string(e.seed);
      kv[name + ".ie_threshold"] = csv::format(e.ie_threshold);
      kv[name + ".ridge"] = csv::format(e.ridge);
    }
  }
  kv["estimators"] = names;
  std::string emit;
  for (auto t : c.emit) emit += (emit.empty() ? "" : ", ") + std::string(to_string(t));
  kv["emit"] = emit;
  return kv;
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : to_key_values(config)) out += key + " = " + value + "\n";
  return out;
}

std::string to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["sis"] = {{"beta", c.sis.beta}, {"gamma", c.sis.gamma}};
  j["x0"] = c.x0;
  j["steps"] = c.steps;
  if (c.noise) {
    j["noise"] = {{"process_std", c.noise->process_std},
                  {"observation_std", c.noise->observation_std},
                  {"bound_nu", c.noise->bound_nu},
                  {"seed", c.noise->seed}};
  } else {
    j["noise"] = nullptr;
  }
  j["fim_alpha"] = c.fim_alpha;
  auto& estimators = j["estimators"] = nlohmann::ordered_json::array();
  for (const auto& e : c.estimators) {
    nlohmann::ordered_json je{{"kind", to_string(e.kind)},
                              {"alpha", e.alpha},
                              {"p0_scale", e.p0_scale},
                              {"theta0", e.theta0}};
    if (e.kind == EstimatorKind::IeMmai) {
      je["models"] = e.models;
      je["spread"] = e.spread;
      je["seed"] = e.seed;
      je["ie_threshold"] = e.ie_threshold;
      je["ridge"] = e.ridge;
    }
    estimators.push_back(std::move(je));
  }
  j["output"] = c.output;
  auto& emit = j["emit"] = nlohmann::ordered_json::array();
  for (auto t : c.emit) emit.push_back(to_string(t));
  return j.dump(2);
}

}  // namespace sisid

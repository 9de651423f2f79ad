#include <gtest/gtest.h>

#include <random>

#include "sisid/config.hpp"
#include "sisid/errors.hpp"

namespace sisid {
namespace {

std::string error_field(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

TEST(KeyValues, ParsesCommentsAndWhitespace) {
  const auto kv = parse_key_values("# header\n\n  beta = 0.3  \ngamma=0.2\n   # indented comment\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("beta"), "0.3");
  EXPECT_EQ(kv.at("gamma"), "0.2");
}

TEST(KeyValues, Errors) {
  EXPECT_THROW(parse_key_values("beta 0.3\n"), ConfigError);
  EXPECT_THROW(parse_key_values(" = 0.3\n"), ConfigError);
  EXPECT_THROW(parse_key_values("beta = 1\nbeta = 2\n"), ConfigError);
  try {
    parse_key_values("a = 1\n\nbroken\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "line 3");
  }
}

TEST(Config, Defaults) {
  const auto c = parse_config("estimators = grls\n");
  EXPECT_EQ(c.sis.beta, 0.8076);
  EXPECT_EQ(c.steps, 2000u);
  EXPECT_FALSE(c.noise.has_value());
  ASSERT_EQ(c.estimators.size(), 1u);
  EXPECT_EQ(c.estimators[0].kind, EstimatorKind::Grls);
  EXPECT_EQ(c.estimators[0].alpha, 0.94);
  EXPECT_EQ(c.emit.size(), 3u);
}

TEST(Config, GlobalDefaultsAndOverrides) {
  const auto c = parse_config(
      "alpha = 0.9\np0_scale = 10\ntheta0 = 0.5, 0.25\nestimators = ef_rls, grls\ngrls.alpha = 0.97\n");
  EXPECT_EQ(c.estimators[0].alpha, 0.9);
  EXPECT_EQ(c.estimators[1].alpha, 0.97);
  EXPECT_EQ(c.estimators[1].p0_scale, 10.0);
  EXPECT_EQ(c.estimators[0].theta0, (std::vector<double>{0.5, 0.25}));
}

TEST(Config, NoiseBlock) {
  const auto c = parse_config("noise = on\nnoise.process_std = 0.002\nnoise.seed = 4\nestimators = grls\n");
  ASSERT_TRUE(c.noise.has_value());
  EXPECT_EQ(c.noise->process_std, 0.002);
  EXPECT_DOUBLE_EQ(c.noise->bound_nu, 0.01);
  EXPECT_EQ(c.noise->seed, 4u);
}

TEST(Config, InvalidFieldsAreNamed) {
  EXPECT_EQ(error_field("steps = 0\nestimators = grls\n"), "steps");
  EXPECT_EQ(error_field("beta = 1.5\nestimators = grls\n"), "beta");
  EXPECT_EQ(error_field("beta = abc\nestimators = grls\n"), "beta");
  EXPECT_EQ(error_field("steps = -3\nestimators = grls\n"), "steps");
  EXPECT_EQ(error_field("colour = red\nestimators = grls\n"), "colour");
  EXPECT_EQ(error_field("estimators = grls\nef_rls.alpha = 0.9\n"), "ef_rls.alpha");
  EXPECT_EQ(error_field("estimators = grls\ngrls.alpha = 1\n"), "grls.alpha");
  EXPECT_EQ(error_field("estimators = magic\n"), "estimators");
  EXPECT_EQ(error_field("estimators = grls, grls\n"), "estimators");
  EXPECT_EQ(error_field("beta = 0.3\n"), "estimators");
  EXPECT_EQ(error_field("estimators = grls\ntheta0 = 1, 2, 3\n"), "grls.theta0");
  EXPECT_EQ(error_field("estimators = grls\nemit = pictures\n"), "emit");
  EXPECT_EQ(error_field("estimators = ie_mmai\nie_mmai.models = 0\n"), "ie_mmai.models");
  EXPECT_EQ(error_field("noise = maybe\nestimators = grls\n"), "noise");
}

TEST(Config, BundledConfigsValidate) {
  for (const char* name : {"slow_epidemic.cfg", "gd_vs_mmai.cfg", "comparison.cfg", "comparison_noisy.cfg"}) {
    const auto path = std::filesystem::path(SISID_CONFIG_DIR) / name;
    EXPECT_NO_THROW(validate(load_config(path))) << name;
  }
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/sisid.cfg"), ConfigError); }

TEST(Config, JsonEcho) {
  const auto json = to_json(parse_config("name = echo\nbeta = 0.3\nestimators = grls\n"));
  EXPECT_NE(json.find("\"name\": \"echo\""), std::string::npos);
  EXPECT_NE(json.find("\"beta\": 0.3"), std::string::npos);
  EXPECT_NE(json.find("\"noise\": null"), std::string::npos);
}

ExperimentConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  ExperimentConfig c;
  c.name = "run" + std::to_string(rng() % 1000);
  c.sis = {unit(rng), unit(rng)};
  c.x0 = unit(rng);
  c.steps = 1 + rng() % 10000;
  if (coin(rng)) c.noise = NoiseSpec{1e-3 * unit(rng), 1e-4 * unit(rng), 0.01 + unit(rng), rng() % 100};
  c.fim_alpha = 0.5 + 0.5 * unit(rng);
  c.output = "out/" + c.name;
  c.emit.clear();
  for (TraceKind t : {TraceKind::Trajectory, TraceKind::Metrics, TraceKind::Greedy}) {
    if (coin(rng)) c.emit.push_back(t);
  }
  if (c.emit.empty()) c.emit.push_back(TraceKind::Metrics);
  for (EstimatorKind k : {EstimatorKind::PureGd, EstimatorKind::EfRls, EstimatorKind::IeMmai, EstimatorKind::Grls}) {
    if (!coin(rng)) continue;
    EstimatorConfig e;
    e.kind = k;
    e.alpha = 0.5 + 0.49 * unit(rng);
    e.p0_scale = 1.0 + 1000.0 * unit(rng);
    e.theta0 = {unit(rng), 3.0 * unit(rng)};
    e.models = 1 + rng() % 5;
    e.spread = 0.9 * unit(rng);
    e.seed = rng() % 1000;
    e.ie_threshold = 1e-6 + unit(rng);
    e.ridge = 0.1 + unit(rng);
    c.estimators.push_back(e);
  }
  if (c.estimators.empty()) c.estimators.push_back(EstimatorConfig{});
  return c;
}

// Non-IE-MMAI estimators drop the IE-MMAI-only fields on serialization.
ExperimentConfig normalized(ExperimentConfig c) {
  for (auto& e : c.estimators) {
    if (e.kind != EstimatorKind::IeMmai) {
      const EstimatorConfig d;
      e.models = d.models;
      e.spread = d.spread;
      e.seed = d.seed;
      e.ie_threshold = d.ie_threshold;
      e.ridge = d.ridge;
    }
  }
  return c;
}

TEST(ConfigProperty, TextRoundTrip) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const ExperimentConfig c = normalized(random_config(rng));
    ASSERT_NO_THROW(validate(c));
    const std::string text = to_text(c);
    ASSERT_EQ(parse_config(text), c) << text;
    ASSERT_EQ(to_text(parse_config(text)), text);
  }
}

}  // namespace
}  // namespace sisid

#pragma once

// Experiment configuration: JSON schema, defaults, and the derived objects
// (ladder, law, target, model template, weight sets, temperatures) shared by
// every subcommand.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msent/io.hpp"

namespace msent::cli {

struct LadderConfig {
  double epsilon = 0.03125;
  double beta = 2.0;
  int d = 3;
};

struct TargetConfig {
  std::string bundle = "tanh";
  double param = 1.0;
  /// Radius the bundle constants are certified on; 0 means the ladder's R.
  double radius = 0.0;
};

/// Step size: one value, one per level, or the finest step keeping every
/// |W_k| at most `max_set_size`.
struct EtaChoice {
  std::vector<double> values;
  std::uint64_t max_set_size = 0;
};

struct ModelConfig {
  int tau = 2;
  EtaChoice eta{{}, 200};
  /// Empty means the rho_k formula.
  std::vector<double> rho;
  /// Empty means f'(0).
  std::optional<double> base_slope;
  TargetMode mode = TargetMode::kTanhTarget;
  std::uint64_t teacher_seed = 7;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

struct TrainSection {
  std::size_t n = 200;
  std::uint64_t seed = 1;
  /// Empty means the Corollary-2 schedule; otherwise lambda_bar_1..d.
  std::vector<double> lambda_bar;
  std::optional<int> stop_after;
};

struct EvalConfig {
  std::string method = "quadrature";
  std::size_t n_mc = 100000;
  std::uint64_t seed = 11;
  std::size_t panels = 2048;
  std::size_t trials = 20;
  /// Empty means automatic: 0 for planted teachers, the summed approximation
  /// bound for diffeomorphism targets.
  std::optional<double> slack;
};

struct ExperimentConfig {
  LadderConfig ladder;
  double alpha = 5.0;
  TargetConfig target;
  ModelConfig model;
  TrainSection train;
  EvalConfig eval;
  std::filesystem::path out = "out";
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every field with defaults expanded.
Json resolved_json(const ExperimentConfig& c);

/// The objects an experiment is built from.
struct Experiment {
  ExperimentConfig config;
  ScaleLadder ladder;
  PowerLaw law;
  DiffeoBundle bundle;
  std::vector<double> rho;
  std::vector<double> eta;
  ModelTemplate shape;
};

Experiment build_experiment(const ExperimentConfig& c);

/// Level weight sets; ResourceCapError names the level and its count.
std::vector<LevelWeightSet> weight_sets(const Experiment& e);
std::vector<std::uint64_t> set_sizes(const Experiment& e);

/// Teacher weights of the planted mode: one uniform draw per level from the
/// teacher substream.
std::vector<WeightVector> teacher_weights(const Experiment& e, const std::vector<LevelWeightSet>& sets);

/// Labeling function of the experiment's mode.
RealFn target_function(const Experiment& e, const std::vector<LevelWeightSet>& sets);

/// Reference weights w_hat: the teacher, or the rounded Riemann networks.
std::vector<WeightVector> reference(const Experiment& e, const std::vector<LevelWeightSet>& sets);

TemperatureSchedule temperatures(const Experiment& e, std::span<const std::uint64_t> sizes);

}  // namespace msent::cli

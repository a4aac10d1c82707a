#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"

namespace msent::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitResourceCap = 3;

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> stop_after;
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> resume;
};

ExperimentConfig apply(ExperimentConfig c, const Overrides& o);

int cmd_ladder(const ExperimentConfig& c);
int cmd_decompose(const ExperimentConfig& c);
int cmd_sample(const ExperimentConfig& c);
int cmd_train(const ExperimentConfig& c, const std::optional<std::filesystem::path>& resume);
int cmd_evaluate(const ExperimentConfig& c, const std::optional<std::filesystem::path>& model);
int cmd_ratio(const ExperimentConfig& c);
/// suite: entropy | ladder | congruency | bounds | all.
int cmd_verify(const std::string& suite, const std::filesystem::path& out);

/// Maps library exceptions to exit codes and messages on stderr.
int run_guarded(const std::function<int()>& body);

}  // namespace msent::cli

#pragma once

// JSON and CSV renderings of library values. Doubles go through nlohmann's
// shortest round-trip formatting, CSV cells through %.17g.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msent/entropy.hpp"
#include "msent/heaviside.hpp"
#include "msent/ladder.hpp"
#include "msent/risk.hpp"
#include "msent/scale_data.hpp"
#include "msent/trainer.hpp"

namespace msent {

using Json = nlohmann::ordered_json;

/// {"support": [...], "probs": [...]}.
Json to_json(const DiscreteDistribution& p);
DiscreteDistribution distribution_from_json(const Json& j);

Json to_json(const ScaleLadder& ladder);
ScaleLadder ladder_from_json(const Json& j);

Json to_json(const LevelSpec& spec);
LevelSpec level_spec_from_json(const Json& j);

/// Weights as integer units of eta: [tap_1, ..., tap_tau, constant].
Json to_json(const WeightVector& w);
WeightVector weights_from_json(const Json& j, double eta);

/// Ladder, base slope, level specs and weights. `trained_levels` is recorded
/// for models produced by an interrupted run.
Json to_json(const HierarchicalModel& m, int trained_levels);
HierarchicalModel model_from_json(const Json& j);

/// Seed plus per level: lambda, log partition, chosen index and weights,
/// chosen loss, min loss, |W_k|. Enough to resume training.
Json to_json(const TrainState& s);
TrainState train_state_from_json(const Json& j);

Json to_json(const LevelCertificate& c);
Json to_json(const DilationCertificate& c);
Json to_json(const RiskEstimate& e);
Json to_json(const Theorem4Check& t);
Json to_json(const RiskReport& r);

/// %.17g.
std::string format_double(double v);

Json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const Json& j);

/// Writes a CSV with the given header; every row must match its width.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace msent

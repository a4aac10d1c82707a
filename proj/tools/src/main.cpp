#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

using namespace msent::cli;

int main(int argc, char** argv) {
  CLI::App app{"Multiscale entropic training experiments"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides o;
  std::string out, model, resume, suite = "all";
  std::uint64_t seed = 0;
  int stop_after = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "training seed (overrides the config)");
  };
  auto* ladder = app.add_subcommand("ladder", "write gamma, rho, lambda and |W_k| schedules");
  auto* decompose = app.add_subcommand("decompose", "write psi_k curves and ladder certificates");
  auto* sample = app.add_subcommand("sample", "draw a dataset from the power law");
  auto* train = app.add_subcommand("train", "multiscale entropic training");
  auto* evaluate = app.add_subcommand("evaluate", "risk report for a trained model");
  auto* ratio = app.add_subcommand("ratio", "Lambda ratio and bound sweep");
  auto* verify = app.add_subcommand("verify", "run property suites");
  for (auto* s : {ladder, decompose, sample, train, evaluate, ratio}) add_common(s);
  train->add_option("--stop-after", stop_after, "train levels 1..K only");
  train->add_option("--resume", resume, "trace.json of an interrupted run");
  evaluate->add_option("--model", model, "model.json (default: <out>/model.json)");
  verify->add_option("--suite", suite, "entropy | ladder | congruency | bounds | all");
  verify->add_option("--out", out, "directory for verify_report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  auto sub = app.get_subcommands().front();
  if (sub->count("--out")) o.out = out;
  if (sub != verify && sub->count("--seed")) o.seed = seed;
  if (sub == train && train->count("--stop-after")) o.stop_after = stop_after;

  return run_guarded([&]() -> int {
    if (sub == verify) return cmd_verify(suite, o.out.value_or("out"));
    ExperimentConfig c = config_path.empty() ? parse_config(msent::Json::object()) : load_config(config_path);
    c = apply(c, o);
    if (sub == ladder) return cmd_ladder(c);
    if (sub == decompose) return cmd_decompose(c);
    if (sub == sample) return cmd_sample(c);
    if (sub == train) return cmd_train(c, resume.empty() ? std::nullopt : std::optional<std::filesystem::path>(resume));
    if (sub == evaluate) return cmd_evaluate(c, model.empty() ? std::nullopt : std::optional<std::filesystem::path>(model));
    return cmd_ratio(c);
  });
}

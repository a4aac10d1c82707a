#include <benchmark/benchmark.h>

#include <cmath>

#include "msent/heaviside.hpp"
#include "msent/risk.hpp"
#include "msent/trainer.hpp"

using namespace msent;

namespace {

ModelTemplate shape(int d, int tau, double eta, double rho) {
  ModelTemplate t;
  t.ladder = build_ladder(0.25, 2.0, d);
  t.base_slope = 1.0;
  t.levels.assign(static_cast<std::size_t>(d), LevelSpec(tau, eta, rho, t.ladder.R()));
  return t;
}

Dataset planted_data(const ModelTemplate& t, const std::vector<LevelWeightSet>& sets, std::size_t n) {
  std::vector<WeightVector> ws;
  for (const auto& s : sets) ws.push_back(s[s.size() / 3]);
  const auto teacher = make_model(t, ws);
  return generate_dataset([teacher](double x) { return model_output(teacher, x); }, TargetMode::kPlantedTeacher,
                          PowerLaw(1.0, t.ladder), n, 1);
}

void BM_EnumerateWeightSet(benchmark::State& state) {
  const LevelSpec s(static_cast<int>(state.range(0)), 0.05, 0.25, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_weight_set(s));
  state.counters["vectors"] = static_cast<double>(lattice_ball_count(s.dim(), s.max_units()));
}
BENCHMARK(BM_EnumerateWeightSet)->Arg(2)->Arg(4)->Arg(8);

void BM_CandidateLosses(benchmark::State& state) {
  const auto t = shape(3, 2, 0.25, 1.0);
  const auto sets = enumerate_all(t);
  const auto ds = planted_data(t, sets, static_cast<std::size_t>(state.range(0)));
  const std::vector<WeightVector> prefix{sets[0][0], sets[1][0]};
  for (auto _ : state) benchmark::DoNotOptimize(candidate_losses(t, prefix, ds, sets[2]));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sets[2].size()));
}
BENCHMARK(BM_CandidateLosses)->Arg(200)->Arg(2000)->Arg(20000);

void BM_TrainMultiscale(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto t = shape(d, 2, 0.25, 1.0);
  auto sets = enumerate_all(t);
  const std::size_t n = 200;
  const auto ds = planted_data(t, sets, n);
  std::vector<std::uint64_t> sizes;
  for (const auto& s : sets) sizes.push_back(s.size());
  const std::vector<double> rho(static_cast<std::size_t>(d), 1.0);
  const TrainConfig cfg{t, std::move(sets), lambda_schedule(t.ladder, rho, n, sizes)};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(train_multiscale_entropic(cfg, ds, ++seed));
}
BENCHMARK(BM_TrainMultiscale)->Arg(3)->Arg(6);

void BM_ModelOutput(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto t = shape(d, 8, 0.05, 0.5);
  std::vector<WeightVector> ws(static_cast<std::size_t>(d), WeightVector({1, -1, 2, 0, 0, 1, -1, 0}, 1, 0.05));
  const auto m = make_model(t, ws);
  const double x = 0.9 * t.ladder.R();
  for (auto _ : state) benchmark::DoNotOptimize(model_output(m, x));
}
BENCHMARK(BM_ModelOutput)->Arg(4)->Arg(16);

void BM_QuadratureRisk(benchmark::State& state) {
  const auto t = shape(3, 2, 0.25, 1.0);
  const auto m = zero_model(t);
  const QuadratureExpectation q(PowerLaw(2.0, t.ladder), QuadratureOptions{static_cast<std::size_t>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(statistical_risk(m, [](double x) { return std::tanh(x); }, q));
}
BENCHMARK(BM_QuadratureRisk)->Arg(256)->Arg(2048);

void BM_LambdaRatio(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lambda_ratio(10.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_LambdaRatio)->Arg(20)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();

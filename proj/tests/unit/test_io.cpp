#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "msent/errors.hpp"
#include "msent/io.hpp"

using namespace msent;
using msent::testing::Gen;

namespace {

ModelTemplate small_template() {
  ModelTemplate t;
  t.ladder = build_ladder(0.1, 2.0, 3);
  t.base_slope = 0.7;
  t.levels = {LevelSpec(2, 0.1, 0.5, 1.0), LevelSpec(3, 0.05, 0.3, 1.0), LevelSpec(2, 0.2, 1.0, 1.0)};
  return t;
}

Json reparse(const Json& j) { return Json::parse(j.dump()); }

}  // namespace

TEST(Io, DistributionRoundTrip) {
  Gen g(401);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = DiscreteDistribution::over_indices(g.simplex(6, true));
    const auto back = distribution_from_json(reparse(to_json(p)));
    EXPECT_EQ(back.support(), p.support());
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(back[i], p[i]);
  }
}

TEST(Io, LadderAndLevelRoundTrip) {
  const auto L = build_ladder(0.1, std::pow(10.0, 0.05), 20);
  EXPECT_TRUE(ladder_from_json(reparse(to_json(L))) == L);
  const LevelSpec s(5, 0.013, 0.77, 1.3);
  EXPECT_EQ(level_spec_from_json(reparse(to_json(s))), s);
  EXPECT_THROW(ladder_from_json(Json{{"epsilon", 0.1}}), ConfigError);
}

TEST(Io, WeightsStoredAsUnits) {
  const WeightVector w({3, -1}, 2, 0.1);
  const auto j = to_json(w);
  EXPECT_EQ(j.dump(), "[3,-1,2]");
  EXPECT_EQ(weights_from_json(j, 0.1), w);
}

TEST(Io, ModelRoundTrip) {
  Gen g(402);
  const auto t = small_template();
  std::vector<WeightVector> ws;
  for (const auto& s : t.levels) {
    const auto set = enumerate_weight_set(s);
    ws.push_back(set[g.index(set.size())]);
  }
  const auto m = make_model(t, ws);
  const auto j = reparse(to_json(m, 2));
  EXPECT_EQ(j["trained_levels"], 2);
  const auto back = model_from_json(j);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.shape.levels, m.shape.levels);
  EXPECT_EQ(back.shape.base_slope, 0.7);
  EXPECT_TRUE(back.shape.ladder == m.shape.ladder);
  for (int i = 0; i < 50; ++i) {
    const double x = (g.coin() ? 1 : -1) * g.uniform(0.1, 0.8 - 1e-9);
    EXPECT_EQ(model_output(back, x), model_output(m, x));
  }
}

TEST(Io, ModelRejectsNonMembers) {
  const auto m = zero_model(small_template());
  auto j = to_json(m, 3);
  j["levels"][0]["weights"] = Json::array({50, 0, 0});
  EXPECT_THROW(model_from_json(j), StructuralError);
}

TEST(Io, TrainStateRoundTrip) {
  TrainState s;
  s.seed = 99;
  s.sampled = {WeightVector({1, 0}, -1, 0.1), WeightVector({0, 0, 0}, 2, 0.05)};
  for (int k = 1; k <= 2; ++k) {
    LevelTrace tr;
    tr.k = k;
    tr.lambda = 0.1 * k + 1.0 / 3;
    tr.log_partition = -1.0 / 7;
    tr.chosen = static_cast<std::size_t>(3 * k);
    tr.chosen_loss = 0.0123456789;
    tr.min_loss = 0.001;
    tr.set_size = 25;
    s.levels.push_back(tr);
  }
  const auto back = train_state_from_json(reparse(to_json(s)));
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.sampled, s.sampled);
  ASSERT_EQ(back.levels.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back.levels[i].lambda, s.levels[i].lambda);
    EXPECT_EQ(back.levels[i].log_partition, s.levels[i].log_partition);
    EXPECT_EQ(back.levels[i].chosen, s.levels[i].chosen);
    EXPECT_EQ(back.levels[i].chosen_loss, s.levels[i].chosen_loss);
    EXPECT_EQ(back.levels[i].set_size, 25u);
  }
}

TEST(Io, FilesAndFormatting) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3)), 1.0 / 3);
  const auto dir = std::filesystem::temp_directory_path() / "msent_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  write_json(dir / "a.json", Json{{"x", 1.5}});
  EXPECT_EQ(read_json(dir / "a.json")["x"], 1.5);
  write_csv(dir / "b.csv", {"a", "b"}, {{1.0, 0.25}, {2.0, -3.0}});
  std::ifstream in(dir / "b.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a,b");
  std::getline(in, line);
  EXPECT_EQ(line, "1,0.25");
  EXPECT_THROW(write_csv(dir / "c.csv", {"a", "b"}, {{1.0}}), StructuralError);
  EXPECT_THROW(read_json(dir / "missing.json"), ConfigError);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(read_json(dir / "bad.json"), ConfigError);
  std::filesystem::remove_all(dir.parent_path());
}

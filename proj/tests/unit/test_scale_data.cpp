#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "msent/errors.hpp"
#include "msent/heaviside.hpp"
#include "msent/scale_data.hpp"
#include "oracles.hpp"

using namespace msent;

TEST(ScaleLadder, Examples) {
  const auto a = build_ladder(0.1, std::pow(10.0, 1.0 / 20.0), 20);
  EXPECT_NEAR(a.R(), 1.0, 1e-12);
  EXPECT_NEAR(a.gamma(0), 0.1, 1e-12);
  EXPECT_EQ(a.gamma(20), 1.0);
  const auto b = build_ladder(1.0, 2.0, 1);
  EXPECT_EQ(b.R(), 2.0);
  EXPECT_EQ(b.gamma(0), 0.5);
  EXPECT_EQ(b.gamma(1), 1.0);
  EXPECT_THROW(build_ladder(1.0, 2.0, 0), InvalidArgument);
  EXPECT_THROW(build_ladder(0.0, 2.0, 1), InvalidArgument);
  EXPECT_THROW(build_ladder(1.0, 1.0, 1), InvalidArgument);
}

TEST(ScaleLadder, GammaRatiosAndEdges) {
  const auto L = build_ladder(0.03, 1.7, 9);
  for (int k = 1; k <= 9; ++k) {
    EXPECT_NEAR(L.gamma(k) / L.gamma(k - 1), 1.7, 1e-12);
    EXPECT_NEAR(L.edge(k), 0.03 * std::pow(1.7, k), 1e-12);
  }
  EXPECT_EQ(L.edge(9), L.R());
}

TEST(ScaleOf, Examples) {
  const auto L = build_ladder(1.0, 2.0, 3);
  EXPECT_EQ(scale_of(1.0, L), 1);
  EXPECT_EQ(scale_of(-std::pow(2.0, 1.5), L), 2);
  EXPECT_EQ(scale_of(2.0, L), 2);
  EXPECT_EQ(scale_of(7.999, L), 3);
  EXPECT_THROW(scale_of(8.0, L), DomainError);
  EXPECT_THROW(scale_of(0.5, L), DomainError);
}

TEST(PowerLaw, NormalizerAndDensityIntegrate) {
  for (double alpha : {1.0, 1.5, 2.0, 5.0}) {
    const PowerLaw law(alpha, build_ladder(0.1, 2.0, 4));
    const double eps = 0.1, R = 1.6;
    const double expect = alpha == 1.0 ? 2 * std::log(R / eps)
                                       : 2 * (std::pow(eps, 1 - alpha) - std::pow(R, 1 - alpha)) / (alpha - 1);
    EXPECT_NEAR(law.normalizer(), expect, 1e-12 * expect);
    // Integrate in log coordinates, both signs. The domain is right-open, so
    // the last node is pulled just inside.
    const double top = std::nextafter(R, 0.0);
    const double total = 2 * msent::testing::oracle_simpson(
                                 [&](double t) { return law.density(std::min(std::exp(t), top)) * std::exp(t); },
                                 std::log(eps), std::log(R), 4000);
    EXPECT_NEAR(total, 1.0, 1e-10) << alpha;
  }
}

TEST(PowerLaw, QuantileInvertsCdf) {
  const PowerLaw law(2.5, build_ladder(0.2, 3.0, 3));
  EXPECT_NEAR(law.magnitude_quantile(0.0), 0.2, 1e-15);
  EXPECT_LT(law.magnitude_quantile(1.0), law.ladder().R());
  for (int i = 1; i < 100; ++i) {
    const double u = i / 100.0;
    EXPECT_NEAR(law.magnitude_cdf(law.magnitude_quantile(u)), u, 1e-12);
  }
}

TEST(ScaleMass, Examples) {
  const PowerLaw uni(1.0, build_ladder(0.5, 3.0, 4));
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(scale_mass(uni, k), 0.25, 1e-12);
  const PowerLaw two(2.0, build_ladder(0.5, 3.0, 4));
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(scale_mass(two, k + 1) / scale_mass(two, k), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(scale_mass(PowerLaw(3.0, build_ladder(1.0, 2.0, 1)), 1), 1.0, 1e-15);
  EXPECT_THROW(scale_mass(uni, 0), InvalidArgument);
  EXPECT_THROW(scale_mass(uni, 5), InvalidArgument);
}

TEST(ScaleMass, MatchesNumericIntegralAndSumsToOne) {
  for (double alpha : {1.0, 2.0, 3.3}) {
    const PowerLaw law(alpha, build_ladder(0.05, 2.0, 5));
    double total = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const auto& L = law.ladder();
      const double top = std::nextafter(L.R(), 0.0);
      const double num = 2 * msent::testing::oracle_simpson([&](double x) { return law.density(std::min(x, top)); },
                                                            L.edge(k - 1), L.edge(k), 2000);
      EXPECT_NEAR(scale_mass(law, k), num, 1e-10);
      total += scale_mass(law, k);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Sampler, FrequenciesMatchAnalyticMass) {
  for (double alpha : {1.0, 2.0}) {
    for (int d : {3, 5}) {
      const PowerLaw law(alpha, build_ladder(0.01, 2.0, d));
      const std::size_t n = 100000;
      const auto xs = sample_power_law(law, n, 42);
      std::vector<double> count(static_cast<std::size_t>(d) + 1, 0.0);
      for (double x : xs) count[static_cast<std::size_t>(scale_of(x, law.ladder()))] += 1.0;
      for (int k = 1; k <= d; ++k) {
        const double p = scale_mass(law, k);
        EXPECT_NEAR(count[static_cast<std::size_t>(k)] / n, p, 3.0 * std::sqrt(p * (1 - p) / n))
            << "alpha " << alpha << " d " << d << " k " << k;
      }
    }
  }
}

TEST(Sampler, DeterministicAndInDomain) {
  const PowerLaw law(1.5, build_ladder(0.1, 2.0, 3));
  const auto a = sample_power_law(law, 1000, 9), b = sample_power_law(law, 1000, 9);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_power_law(law, 1000, 10));
  int negative = 0;
  for (double x : a) {
    EXPECT_TRUE(law.ladder().contains(x));
    negative += x < 0;
  }
  EXPECT_GT(negative, 400);
  EXPECT_LT(negative, 600);
}

TEST(ScaleInvariance, HoldsToRounding) {
  EXPECT_LT(scale_invariance_check(PowerLaw(1.0, build_ladder(0.1, 2.0, 5)), 1000), 1e-12);
  EXPECT_LT(scale_invariance_check(PowerLaw(2.5, build_ladder(0.1, 2.0, 5)), 1000), 1e-12);
  EXPECT_LT(scale_invariance_check(PowerLaw(2.0, build_ladder(0.125, 2.0, 4)), 64), 1e-12);
}

TEST(Dataset, TanhLabels) {
  const PowerLaw law(1.0, build_ladder(0.1, 2.0, 3));
  const auto ds = generate_dataset(tanh_bundle(0.8), law, 50, 3);
  ASSERT_EQ(ds.n(), 50u);
  for (std::size_t i = 0; i < ds.n(); ++i) EXPECT_DOUBLE_EQ(ds.labels[i], std::tanh(ds.instances[i]));
  EXPECT_NEAR(tanh_bundle(1.0).f(0.5), 0.462117, 1e-6);
  EXPECT_THROW(generate_dataset(tanh_bundle(0.5), law, 10, 3), DomainError);
  EXPECT_THROW(generate_dataset(tanh_bundle(1.0), law, 0, 3), InvalidArgument);
}

TEST(Dataset, ZeroTeacherLabelsAreBaseMap) {
  const auto L = build_ladder(0.1, 2.0, 3);
  ModelTemplate t;
  t.ladder = L;
  t.base_slope = 1.3;
  for (int k = 0; k < 3; ++k) t.levels.emplace_back(2, 0.1, 1.0, 1.0);
  const auto teacher = zero_model(t);
  const auto ds = generate_dataset([&](double x) { return model_output(teacher, x); }, TargetMode::kPlantedTeacher,
                                   PowerLaw(2.0, L), 100, 4);
  for (std::size_t i = 0; i < ds.n(); ++i) EXPECT_NEAR(ds.labels[i], 1.3 * ds.instances[i], 1e-15);
}

TEST(Dataset, RoundTripIsExact) {
  const auto dir = std::filesystem::temp_directory_path() / "msent_ds_roundtrip";
  std::filesystem::create_directories(dir);
  const PowerLaw law(2.0, build_ladder(0.1, 2.0, 3));
  const auto ds = generate_dataset(tanh_bundle(0.8), law, 200, 8);
  save_dataset(ds, dir / "d.csv", dir / "m.json");
  const auto back = load_dataset(dir / "d.csv", dir / "m.json");
  EXPECT_EQ(back.instances, ds.instances);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.seed, 8u);
  EXPECT_EQ(back.mode, TargetMode::kTanhTarget);
  EXPECT_EQ(back.alpha, 2.0);
  EXPECT_TRUE(back.ladder == ds.ladder);
  std::ifstream in(dir / "d.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x,y");
  std::filesystem::remove_all(dir);
}

TEST(TargetMode, Strings) {
  EXPECT_EQ(to_string(TargetMode::kPlantedTeacher), "planted-teacher");
  EXPECT_EQ(target_mode_from_string("tanh-target"), TargetMode::kTanhTarget);
  EXPECT_THROW(target_mode_from_string("teacher"), ConfigError);
}

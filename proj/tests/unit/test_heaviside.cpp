#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "generators.hpp"
#include "msent/errors.hpp"
#include "msent/heaviside.hpp"
#include "msent/ladder.hpp"
#include "oracles.hpp"

using namespace msent;
using msent::testing::Gen;

namespace {

WeightVector random_member(Gen& g, const LevelSpec& s) {
  std::int64_t budget = s.max_units();
  std::vector<std::int64_t> taps(static_cast<std::size_t>(s.tau));
  for (auto& t : taps) {
    t = g.integer(-budget, budget);
    budget -= std::abs(t);
  }
  const std::int64_t c = g.integer(-budget, budget);
  return WeightVector(taps, c, s.eta);
}

std::vector<double> tap_values(const WeightVector& w) {
  std::vector<double> v;
  for (int j = 0; j < w.tau(); ++j) v.push_back(w.tap(j));
  return v;
}

}  // namespace

TEST(LevelSpec, BreakpointsAndValidation) {
  const LevelSpec s(4, 0.1, 1.0, 2.0);
  const auto b = s.breakpoints();
  ASSERT_EQ(b.size(), 4u);
  EXPECT_DOUBLE_EQ(b[0], -1.0);
  EXPECT_DOUBLE_EQ(b[3], 2.0);
  for (std::size_t j = 1; j < b.size(); ++j) EXPECT_LT(b[j - 1], b[j]);
  EXPECT_EQ(s.max_units(), 10);
  EXPECT_EQ(LevelSpec(2, 0.3, 1.0, 1.0).max_units(), 3);
  EXPECT_THROW(LevelSpec(0, 0.1, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(LevelSpec(2, 0.0, 1.0, 1.0), InvalidArgument);
  EXPECT_THROW(LevelSpec(2, 0.1, -1.0, 1.0), InvalidArgument);
}

TEST(HeavisideNet, Examples) {
  const LevelSpec s(2, 0.05, 1.0, 1.0);
  EXPECT_EQ(heaviside_net_eval(s, WeightVector::zeros(2, 0.05), 0.3), 0.0);
  const WeightVector w({10, 5}, -2, 0.05);
  EXPECT_NEAR(heaviside_net_eval(s, w, 0.5), 0.4, 1e-15);
  EXPECT_NEAR(heaviside_net_eval(s, w, -0.5), -0.1, 1e-15);
  // H(0) = 1: the breakpoint at 0 is included.
  EXPECT_NEAR(heaviside_net_eval(s, w, 0.0), 0.4, 1e-15);
  EXPECT_NEAR(heaviside_net_eval(s, w, 1.0), 0.65, 1e-15);
}

TEST(HeavisideNet, MatchesOracleOnRandomWeights) {
  Gen g(101);
  for (int trial = 0; trial < 200; ++trial) {
    const LevelSpec s(static_cast<int>(g.integer(1, 12)), g.uniform(0.01, 0.3), g.uniform(0.0, 3.0),
                      g.uniform(0.1, 3.0));
    const auto w = random_member(g, s);
    for (int i = 0; i < 20; ++i) {
      const double x = g.uniform(-1.5 * s.span, 1.5 * s.span);
      EXPECT_NEAR(heaviside_net_eval(s, w, x), msent::testing::oracle_net(tap_values(w), w.constant(), s.span, x),
                  1e-12);
    }
  }
}

TEST(HeavisideNet, BoundedOutput) {
  Gen g(102);
  for (int trial = 0; trial < 200; ++trial) {
    const LevelSpec s(static_cast<int>(g.integer(2, 10)), 0.05, g.uniform(0.0, 2.0), 1.0);
    const auto w = random_member(g, s);
    ASSERT_LE(w.l1(), s.rho + 1e-12);
    for (int i = 0; i <= 400; ++i) {
      const double x = -1.2 + 2.4 * i / 400.0;
      EXPECT_LE(std::abs(heaviside_net_eval(s, w, x) - w.constant()), w.tap_l1() + 1e-12);
      EXPECT_LE(w.tap_l1(), s.rho + 1e-12);
    }
  }
}

TEST(WeightVector, MembershipChecks) {
  const LevelSpec s(2, 0.1, 0.5, 1.0);
  EXPECT_NO_THROW(check_member(s, WeightVector({2, -2}, 1, 0.1)));
  EXPECT_THROW(check_member(s, WeightVector({3, -2}, 1, 0.1)), StructuralError);
  EXPECT_THROW(check_fits(s, WeightVector({1, 1, 1}, 0, 0.1)), StructuralError);
  EXPECT_THROW(check_fits(s, WeightVector({1, 1}, 0, 0.2)), StructuralError);
  EXPECT_EQ(WeightVector({2, -3}, 1, 0.1).l1_units(), 6);
}

TEST(Discretize, Examples) {
  const auto a = discretize_weights({{0.3, -0.2}, 0.1}, 0.1);
  EXPECT_EQ(a.tap_units(), (std::vector<std::int64_t>{3, -2}));
  EXPECT_EQ(a.constant_units(), 1);
  EXPECT_NEAR(discretize_weights({{0.26}, 0.0}, 0.1).tap(0), 0.3, 1e-15);
  const auto tie = discretize_weights({{0.25, -0.25}, 0.0}, 0.5);
  EXPECT_EQ(tie.tap(0), 0.5);
  EXPECT_EQ(tie.tap(1), -0.5);
}

TEST(Discretize, ErrorAtMostHalfStep) {
  Gen g(103);
  for (int trial = 0; trial < 500; ++trial) {
    const double eta = g.uniform(0.001, 1.0);
    ContinuousWeights c{g.reals(5, -3.0, 3.0), g.uniform(-3.0, 3.0)};
    const auto w = discretize_weights(c, eta);
    for (int j = 0; j < 5; ++j) EXPECT_LE(std::abs(w.tap(j) - c.taps[static_cast<std::size_t>(j)]), eta / 2 + 1e-12);
    EXPECT_LE(std::abs(w.constant() - c.constant), eta / 2 + 1e-12);
    // Sign symmetry.
    ContinuousWeights neg{c.taps, -c.constant};
    for (auto& t : neg.taps) t = -t;
    const auto wn = discretize_weights(neg, eta);
    for (int j = 0; j < 5; ++j) EXPECT_EQ(wn.tap_units()[static_cast<std::size_t>(j)], -w.tap_units()[static_cast<std::size_t>(j)]);
  }
}

TEST(Riemann, Examples) {
  const LevelSpec s(4, 0.1, 10.0, 1.0);
  const Interval dom{-1.0, 1.0};
  const auto zero = riemann_network_from([](double) { return 0.0; }, 0.0, dom, s);
  for (double t : zero.taps) EXPECT_EQ(t, 0.0);
  EXPECT_EQ(zero.constant, 0.0);
  const auto id = riemann_network_from([](double) { return 1.0; }, -1.0, dom, s);
  // Breakpoints -0.5, 0, 0.5 are interior; 1 is on the boundary.
  EXPECT_EQ(id.taps, (std::vector<double>{0.5, 0.5, 0.5, 0.0}));
  EXPECT_EQ(id.constant, -1.0);
  EXPECT_THROW(riemann_network_from([](double) { return 1.0; }, 0.0, {0.1, 0.5}, s), InvalidArgument);
}

TEST(Riemann, TanhLevelsSatisfyNormAndApproximationBounds) {
  const double R = 1.0;
  const auto b = tanh_bundle(R);
  const auto L = LadderSpec::geometric(2.0, 5);
  const double M1R = b.M1 * R;
  for (int tau : {8, 32}) {
    for (double eta : {0.05, 0.01}) {
      const LevelSpec s(tau, eta, 100.0, M1R);
      for (int k = 1; k <= 5; ++k) {
        const double g0 = L.gamma(k - 1), g1 = L.gamma(k);
        const Interval dom = psi_domain(b, g0);
        const auto w = discretize_weights(
            riemann_network_from([&](double x) { return psi_k_prime(b, g0, g1, x); }, psi_k(b, g0, g1, dom.lo), dom,
                                 s),
            eta);
        const double phi1 = b.C1() * R * (g1 - g0);
        EXPECT_LE(w.l1(), bounded_norm_bound(tau, eta, M1R, phi1, b.C2()) + 1e-12) << tau << " " << eta << " " << k;
        double err = 0.0;
        for (int i = 1; i < 2000; ++i) {
          const double x = dom.lo + dom.width() * i / 2000.0;
          err = std::max(err, std::abs(heaviside_net_eval(s, w, x) - psi_k(b, g0, g1, x)));
        }
        EXPECT_LE(err, approx_error_bound(tau, eta, M1R, b.C2())) << tau << " " << eta << " " << k;
      }
    }
  }
}

TEST(Lattice, CountExamples) {
  EXPECT_EQ(lattice_ball_count(2, 1), 5u);
  EXPECT_EQ(lattice_ball_count(3, 1), 7u);
  EXPECT_EQ(lattice_ball_count(3, 0), 1u);
  EXPECT_EQ(lattice_ball_count(3, 4), 129u);
  EXPECT_EQ(lattice_ball_count(3, -1), 0u);
}

TEST(Lattice, CountMatchesBruteForce) {
  for (int dim = 1; dim <= 5; ++dim) {
    for (int r = 0; r <= 6; ++r) {
      EXPECT_EQ(lattice_ball_count(static_cast<std::size_t>(dim), r), msent::testing::oracle_lattice_count(dim, r))
          << dim << " " << r;
    }
  }
}

TEST(Lattice, CountSaturates) {
  EXPECT_EQ(lattice_ball_count(200, 1'000'000), std::numeric_limits<std::uint64_t>::max());
}

TEST(Enumerate, Examples) {
  const auto a = enumerate_weight_set(LevelSpec(1, 1.0, 1.0, 1.0));
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a.front(), WeightVector({-1}, 0, 1.0));
  EXPECT_EQ(a.back(), WeightVector({1}, 0, 1.0));
  const auto tiny = enumerate_weight_set(LevelSpec(3, 1.0, 0.5, 1.0));
  ASSERT_EQ(tiny.size(), 1u);
  EXPECT_EQ(tiny[0], WeightVector::zeros(3, 1.0));
  EXPECT_EQ(enumerate_weight_set(LevelSpec(2, 1.0, 1.0, 1.0)).size(), 7u);
  EXPECT_THROW(enumerate_weight_set(LevelSpec(2, 0.1, 1.0, 1.0), 100), ResourceCapError);
  EXPECT_THROW(enumerate_weight_set(LevelSpec(2, 0.1, 1.0, 1.0), 0), InvalidArgument);
}

TEST(Enumerate, LexicographicDistinctMembersWithClosedFormCount) {
  Gen g(104);
  for (int trial = 0; trial < 30; ++trial) {
    const LevelSpec s(static_cast<int>(g.integer(1, 4)), g.uniform(0.05, 0.5), g.uniform(0.0, 1.2), 1.0);
    const auto set = enumerate_weight_set(s);
    EXPECT_EQ(set.size(), lattice_ball_count(s.dim(), s.max_units()));
    std::set<std::vector<std::int64_t>> seen;
    std::vector<std::int64_t> prev;
    for (const auto& w : set) {
      EXPECT_NO_THROW(check_member(s, w));
      auto key = w.tap_units();
      key.push_back(w.constant_units());
      if (!prev.empty()) EXPECT_LT(prev, key);
      prev = key;
      seen.insert(key);
    }
    EXPECT_EQ(seen.size(), set.size());
  }
}

TEST(Bounds, RhoScheduleExamples) {
  const auto L1 = build_ladder(0.5, 2.0, 1);
  EXPECT_NEAR(rho_schedule(L1, 1.0, 1.0, 1.0, 2, 0.1)[0], 3.65, 1e-12);
  const auto L = build_ladder(0.1, 1.5, 6);
  const auto r = rho_schedule(L, 1.2, 0.7, 0.9, 1'000'000'000, 0.0);
  for (int k = 1; k < 6; ++k) EXPECT_NEAR(r[static_cast<std::size_t>(k)] / r[static_cast<std::size_t>(k - 1)], 1.5, 1e-6);
}

TEST(Bounds, ApproxErrorExamples) {
  EXPECT_NEAR(approx_error_bound(4, 0.1, 1.0, 2.0), 1.25, 1e-12);
  EXPECT_NEAR(approx_error_bound(4, 0.0, 1.5, 2.0), 2 * 2.25 * 2 / 4, 1e-12);
  EXPECT_NEAR(approx_error_bound(4, 0.1, 1.0, 0.0), 0.25, 1e-12);
  EXPECT_THROW(approx_error_bound(1, 0.1, 1.0, 1.0), InvalidArgument);
}

namespace {

ModelTemplate make_template(const ScaleLadder& L, double c0, const LevelSpec& s) {
  ModelTemplate t;
  t.ladder = L;
  t.base_slope = c0;
  t.levels.assign(static_cast<std::size_t>(L.d()), s);
  return t;
}

}  // namespace

TEST(Model, ZeroLevelsKeepBaseMap) {
  const auto L = build_ladder(0.1, 2.0, 4);
  const auto m = zero_model(make_template(L, 1.0, LevelSpec(2, 0.1, 1.0, 2.0)));
  Gen g(105);
  for (int i = 0; i < 200; ++i) {
    const double x = (g.coin() ? 1 : -1) * g.uniform(0.1, 1.6 - 1e-9);
    EXPECT_NEAR(model_output(m, x), x, 1e-15);
    for (int k = 0; k <= 4; ++k) EXPECT_DOUBLE_EQ(model_forward_level(m, k, x), x);
  }
  EXPECT_THROW(model_output(m, 1.6), DomainError);
  EXPECT_THROW(model_forward_level(m, 5, 0.5), InvalidArgument);
}

TEST(Model, OneStepRecursion) {
  const auto L = build_ladder(0.5, 2.0, 1);
  const LevelSpec s(2, 0.1, 1.0, 1.0);
  const auto m = make_model(make_template(L, 1.0, s), {WeightVector({0, 0}, 2, 0.1)});
  for (double x : {-0.9, -0.3, 0.2, 0.7}) EXPECT_NEAR(model_forward_level(m, 1, x), x + 0.2, 1e-15);
  EXPECT_NEAR(model_output(m, 0.7), 0.9, 1e-15);
}

TEST(Model, RecursionMatchesHandUnrolledOracle) {
  Gen g(106);
  const auto L = build_ladder(0.05, 2.0, 3);
  const LevelSpec s(4, 0.05, 0.6, 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<WeightVector> ws;
    for (int k = 0; k < 3; ++k) ws.push_back(random_member(g, s));
    const auto m = make_model(make_template(L, 0.8, s), ws);
    for (int i = 0; i < 20; ++i) {
      const double x = (g.coin() ? 1 : -1) * g.uniform(0.05, 0.4 - 1e-9);
      const int k = scale_of(x, L);
      const double gk = L.gamma(k);
      double h = 0.8 * x / gk;
      for (int j = 0; j < k; ++j) {
        const auto& w = ws[static_cast<std::size_t>(j)];
        h += msent::testing::oracle_net(tap_values(w), w.constant(), 1.5, h);
      }
      EXPECT_NEAR(model_output(m, x), gk * h, 1e-12);
    }
  }
}

TEST(Model, LazyEvaluationCountsLevels) {
  const auto L = build_ladder(0.1, 2.0, 5);
  const auto m = zero_model(make_template(L, 1.0, LevelSpec(2, 0.1, 1.0, 4.0)));
  for (int k = 1; k <= 5; ++k) {
    EvalStats st;
    model_output(m, -L.edge(k - 1) * 1.01, &st);
    EXPECT_EQ(st.level_evals, static_cast<std::size_t>(k));
  }
  EXPECT_EQ(model_output(m, 3.0), 3.0);  // gamma_d = 1
}

TEST(Model, StructuralErrors) {
  const auto L = build_ladder(0.1, 2.0, 3);
  auto t = make_template(L, 1.0, LevelSpec(2, 0.1, 0.3, 1.0));
  t.levels.pop_back();
  EXPECT_THROW(zero_model(t), StructuralError);
  const auto ok = make_template(L, 1.0, LevelSpec(2, 0.1, 0.3, 1.0));
  EXPECT_THROW(make_model(ok, {WeightVector::zeros(2, 0.1)}), StructuralError);
  EXPECT_THROW(make_model(ok, {WeightVector::zeros(2, 0.1), WeightVector::zeros(2, 0.1), WeightVector({4, 0}, 0, 0.1)}),
               StructuralError);
  const std::vector<WeightVector> prefix{WeightVector::zeros(2, 0.1)};
  EXPECT_THROW(prefix_output(ok, prefix, 0.5), StructuralError);
  EXPECT_NEAR(prefix_output(ok, prefix, 0.15), 0.15, 1e-15);
}

TEST(Model, PlantedLabelsEqualTeacherOutput) {
  Gen g(107);
  const auto L = build_ladder(0.25, 2.0, 3);
  const LevelSpec s(2, 0.25, 1.0, 1.0);
  std::vector<WeightVector> ws;
  for (int k = 0; k < 3; ++k) ws.push_back(random_member(g, s));
  const auto teacher = make_model(make_template(L, 1.0, s), ws);
  const auto ds = generate_dataset([&](double x) { return model_output(teacher, x); }, TargetMode::kPlantedTeacher,
                                   PowerLaw(1.0, L), 100, 5);
  for (std::size_t i = 0; i < ds.n(); ++i) EXPECT_EQ(ds.labels[i], model_output(teacher, ds.instances[i]));
}

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

#include "commands.hpp"
#include "msent/errors.hpp"
#include "msent/rng.hpp"

namespace msent::cli {

namespace {

struct Recorder {
  Json checks = Json::array();
  bool ok = true;

  /// Passes when value <= threshold.
  void at_most(const std::string& suite, const std::string& name, double value, double threshold) {
    add(suite, name, value, threshold, threshold - value, value <= threshold);
  }
  void add(const std::string& suite, const std::string& name, double value, double threshold, double margin,
           bool pass) {
    ok = ok && pass;
    checks.push_back(Json{{"suite", suite},
                          {"name", name},
                          {"value", value},
                          {"threshold", threshold},
                          {"margin", margin},
                          {"pass", pass}});
    std::cout << (pass ? "PASS " : "FAIL ") << suite << "/" << name << ": " << format_double(value) << " (limit "
              << format_double(threshold) << ")\n";
  }
};

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = rng.exponential() + 1e-3;
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

void entropy_suite(Recorder& rec) {
  Rng rng(2024, Stream::kVerification, 1);
  double chain = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::vector<std::size_t> dims{1 + rng.below(5), 1 + rng.below(5)};
    const ProductDistribution p(dims, random_simplex(rng, dims[0] * dims[1]));
    const ProductDistribution q(dims, random_simplex(rng, dims[0] * dims[1]));
    const auto pm = p.prefix_marginal(1), qm = q.prefix_marginal(1);
    const auto px = DiscreteDistribution::over_indices({pm.probs().begin(), pm.probs().end()});
    const double lhs = relative_entropy(p.probs(), q.probs());
    const double rhs = relative_entropy(pm.probs(), qm.probs()) +
                       conditional_relative_entropy(p.conditional(2), q.conditional(2), px);
    chain = std::max(chain, std::abs(lhs - rhs));
  }
  rec.at_most("entropy", "chain_rule_max_deviation", chain, 1e-12);

  double comb = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(5);
    const auto P = DiscreteDistribution::over_indices(random_simplex(rng, n));
    const auto Q = DiscreteDistribution::over_indices(random_simplex(rng, n));
    const auto R = DiscreteDistribution::over_indices(random_simplex(rng, n));
    for (double lam : {0.25, 0.5, 0.75}) {
      const double lhs = lam * relative_entropy(P, Q) + (1 - lam) * relative_entropy(P, R);
      const double rhs =
          relative_entropy(P, tilted_distribution(Q, R, lam)) + (1 - lam) * renyi_divergence(Q, R, lam);
      comb = std::max(comb, std::abs(lhs - rhs));
    }
  }
  rec.at_most("entropy", "entropy_combination_max_deviation", comb, 1e-12);

  double gibbs = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(7);
    const double lam = 0.1 + 2.0 * rng.uniform();
    std::vector<double> f(n);
    for (auto& v : f) v = 3.0 * rng.uniform() - 1.0;
    const auto g = gibbs_measure(index_labels(n), f, lam);
    const auto u = DiscreteDistribution::uniform(index_labels(n));
    double lo = kInf, hi = -kInf;
    for (int s = 0; s < 50; ++s) {
      const auto P = DiscreteDistribution::over_indices(random_simplex(rng, n));
      double ef = 0.0;
      for (std::size_t i = 0; i < n; ++i) ef += P[i] * f[i];
      const double v = ef + lam * relative_entropy(P, u) - lam * relative_entropy(P, g);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    gibbs = std::max(gibbs, hi - lo);
  }
  rec.at_most("entropy", "gibbs_variational_spread", gibbs, 1e-10);

  double worst = -kInf;
  int stated_violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const double lam = 0.05 + 3.0 * rng.uniform();
    std::vector<double> z(n);
    for (auto& v : z) v = 10.0 * rng.uniform() - 5.0;
    const double m = *std::min_element(z.begin(), z.end());
    const double G = kolmogorov_mean(z, lam);
    const double span = lam * std::log(static_cast<double>(n));
    // min <= G <= min + lambda log N.
    worst = std::max({worst, m - G, G - (m + span)});
    if (G > m + 1e-12 || G < m - span - 1e-12) ++stated_violations;
  }
  rec.at_most("entropy", "kolmogorov_sandwich_max_violation", worst, 1e-12);
  rec.add("entropy", "kolmogorov_reverse_sandwich_violations_info", stated_violations, 1000, 0.0, true);
}

void ladder_suite(Recorder& rec) {
  const auto b = tanh_bundle(1.0);
  const auto spec = LadderSpec::geometric(2.0, 5);
  for (const auto& c : verify_theorem1(b, spec, 20001)) {
    rec.at_most("ladder", "theorem1_lipschitz_level_" + std::to_string(c.k), c.lip_est, c.lip_bound);
    rec.at_most("ladder", "theorem1_smoothness_level_" + std::to_string(c.k), c.smooth_est, c.smooth_bound);
  }
  for (double g : {1.0 / 32.0, 1.0 / 8.0}) {
    const auto c = verify_prop1(b, g, 20001);
    rec.at_most("ladder", "prop1_gamma_" + format_double(g), c.lip_est, c.bound);
  }
  double diff = 0.0;
  for (int k = 1; k <= 5; ++k) {
    const double gp = spec.gamma(k - 1), gn = spec.gamma(k);
    const auto dom = psi_domain(b, gp);
    for (int i = 0; i < 1000; ++i) {
      const double x = dom.lo + dom.width() * (i + 0.5) / 1000.0;
      diff = std::max(diff, std::abs(psi_k(b, gp, gn, x) - tanh_psi_closed_form(gp, x)));
    }
  }
  rec.at_most("ladder", "example1_closed_form_max_diff", diff, 1e-10);
}

void congruency_suite(Recorder& rec) {
  const ScaleLadder L(0.25, 2.0, 2);
  const PowerLaw law(1.5, L);
  ModelTemplate shape;
  shape.ladder = L;
  for (int k = 0; k < 2; ++k) shape.levels.emplace_back(2, 0.1, 0.2, 1.0);
  const auto full = enumerate_weight_set(shape.level(1));
  const LevelWeightSet three(full.begin(), full.begin() + 3);
  const auto ds = generate_dataset([](double x) { return std::tanh(x); }, TargetMode::kTanhTarget, law, 8, 5);
  const TrainConfig cfg{shape, {three, three}, TemperatureSchedule::from_increments({0.3, 0.2})};
  const auto rep = congruency_gap(cfg, ds, 100, 17);
  rec.at_most("congruency", "max_gap_d2", rep.max_gap, 1e-9);
  rec.at_most("congruency", "offset_vs_closed_form", std::abs(rep.offset - rep.predicted_offset), 1e-9);
  rec.add("congruency", "gibbs_minimality_min_excess", rep.min_excess, -1e-10, rep.min_excess + 1e-10,
          rep.min_excess >= -1e-10);

  ModelTemplate one;
  one.ladder = ScaleLadder(0.25, 2.0, 1);
  one.levels.emplace_back(2, 0.1, 0.2, 1.0);
  const auto ds1 =
      generate_dataset([](double x) { return std::tanh(x); }, TargetMode::kTanhTarget, PowerLaw(1.5, one.ladder), 8, 5);
  const TrainConfig cfg1{one, {three}, TemperatureSchedule::from_increments({0.25})};
  rec.at_most("congruency", "max_gap_d1", congruency_gap(cfg1, ds1, 100, 18).max_gap, 1e-12);
}

void bounds_suite(Recorder& rec) {
  rec.at_most("bounds", "lambda_ratio_rbar10_d20_deviation", std::abs(lambda_ratio(10.0, 20) - 0.2648), 5e-4);
  const ScaleLadder L(0.5, 2.0, 1);  // gamma_1 = 1
  const TemperatureSchedule one = TemperatureSchedule::from_increments({1.0});
  const double logs1[] = {1.0}, rho1[] = {1.0}, g1[] = {1.0};
  const auto t = thm3_bound(one, logs1, rho1, g1, 1);
  rec.at_most("bounds", "thm3_statement_example", std::abs(t.statement - 2.5), 1e-14);
  rec.at_most("bounds", "thm3_proof_form_example", std::abs(t.proof_form - 10.0), 1e-14);
  const ScaleLadder L2(0.25, 2.0, 2);  // gamma = (0.5, 1)
  const double rho2[] = {1.0, 2.0}, logs2[] = {1.0, 1.0};
  rec.at_most("bounds", "cor2_example", std::abs(cor2_bound(L2, rho2, logs2, 100) - 1.331371), 1e-6);
  rec.at_most("bounds", "erm_example", std::abs(erm_bound(rho2, logs2, 100) - 0.424264), 1e-6);
  rec.at_most("bounds", "powerlaw_factor_example", std::abs(powerlaw_factor(5.0, 2.0, 1.0, 1.0) - 0.90625), 1e-15);

  Rng rng(2024, Stream::kVerification, 4);
  double consistency = 0.0;
  for (int t2 = 0; t2 < 100; ++t2) {
    const int d = 1 + static_cast<int>(rng.below(6));
    const ScaleLadder Lr(0.01 + rng.uniform(), 1.5 + rng.uniform(), d);
    std::vector<double> rho(static_cast<std::size_t>(d)), logs(static_cast<std::size_t>(d));
    for (auto& r : rho) r = 0.1 + rng.uniform();
    for (auto& l : logs) l = std::log(2.0 + static_cast<double>(rng.below(500)));
    const double alpha = 4.0 + 4.0 * rng.uniform();
    const double C1 = 0.1 * rng.uniform() / Lr.R();
    const std::size_t n = 10 + rng.below(1000);
    const double f = powerlaw_factor(alpha, Lr.beta(), C1, Lr.R());
    if (!(f > 0.0)) continue;
    const double expect = cor2_bound(Lr, rho, logs, n) / f;
    consistency = std::max(consistency, std::abs(risk_bound(Lr, rho, logs, n, alpha, C1) - expect) / expect);
  }
  rec.at_most("bounds", "risk_bound_consistency_rel", consistency, 1e-12);
}

}  // namespace

int cmd_verify(const std::string& suite, const std::filesystem::path& out) {
  const bool all = suite == "all";
  if (!all && suite != "entropy" && suite != "ladder" && suite != "congruency" && suite != "bounds") {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  Recorder rec;
  if (all || suite == "entropy") entropy_suite(rec);
  if (all || suite == "ladder") ladder_suite(rec);
  if (all || suite == "congruency") congruency_suite(rec);
  if (all || suite == "bounds") bounds_suite(rec);
  write_json(out / "verify_report.json", Json{{"suite", suite}, {"pass", rec.ok}, {"checks", rec.checks}});
  return rec.ok ? kExitOk : kExitPropertyFailure;
}

}  // namespace msent::cli

#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "msent/errors.hpp"

namespace msent::cli {

namespace fs = std::filesystem;

ExperimentConfig apply(ExperimentConfig c, const Overrides& o) {
  if (o.out) c.out = *o.out;
  if (o.seed) c.train.seed = *o.seed;
  if (o.stop_after) {
    if (*o.stop_after < 0) throw ConfigError("--stop-after must be >= 0");
    c.train.stop_after = *o.stop_after;
  }
  return c;
}

namespace {

void write_manifest(const ExperimentConfig& c, const std::string& command) {
  write_json(c.out / "manifest.json", Json{{"command", command}, {"config", resolved_json(c)}});
}

/// Closed-form sizes, refusing levels that would exceed the enumeration cap.
std::vector<std::uint64_t> capped_sizes(const Experiment& e) {
  auto sizes = set_sizes(e);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] > e.config.model.enumeration_cap) {
      throw ResourceCapError("level " + std::to_string(k + 1) + ": |W_k| = " + std::to_string(sizes[k]) +
                             " exceeds the enumeration cap " + std::to_string(e.config.model.enumeration_cap));
    }
  }
  return sizes;
}

Dataset make_dataset(const Experiment& e, const std::vector<LevelWeightSet>& sets) {
  return generate_dataset(target_function(e, sets), e.config.model.mode, e.law, e.config.train.n,
                          e.config.train.seed);
}

void save(const Dataset& ds, const fs::path& dir) {
  save_dataset(ds, dir / "dataset.csv", dir / "dataset_manifest.json");
}

std::vector<double> level_gammas(const ScaleLadder& L) {
  return std::vector<double>(L.gammas().begin() + 1, L.gammas().end());
}

}  // namespace

int cmd_ladder(const ExperimentConfig& c) {
  const auto e = build_experiment(c);
  const auto sizes = capped_sizes(e);
  const auto sched = temperatures(e, sizes);
  std::vector<std::vector<double>> rows;
  for (int k = 1; k <= e.ladder.d(); ++k) {
    const auto kk = static_cast<std::size_t>(k - 1);
    rows.push_back({static_cast<double>(k), e.ladder.gamma(k), e.rho[kk], sched.lambda_bar(k), sched.lambda(k),
                    static_cast<double>(sizes[kk])});
  }
  write_csv(c.out / "schedules.csv", {"k", "gamma_k", "rho_k", "lambda_bar_k", "lambda_k", "W_k_size"}, rows);
  write_manifest(c, "ladder");
  std::cout << "wrote " << (c.out / "schedules.csv").string() << " (" << rows.size() << " levels)\n";
  return kExitOk;
}

int cmd_decompose(const ExperimentConfig& c) {
  const auto e = build_experiment(c);
  const auto& b = e.bundle;
  const auto& L = e.ladder;
  constexpr std::size_t kCurvePoints = 400;
  constexpr std::size_t kCertificateGrid = 20001;

  std::vector<std::vector<double>> rows;
  for (int k = 1; k <= L.d(); ++k) {
    const double gp = L.gamma(k - 1), gn = L.gamma(k);
    const auto dom = psi_domain(b, gp);
    for (std::size_t i = 0; i < kCurvePoints; ++i) {
      const double x = dom.lo + dom.width() * static_cast<double>(i) / static_cast<double>(kCurvePoints - 1);
      rows.push_back({static_cast<double>(k), x, psi_k(b, gp, gn, x)});
    }
  }
  write_csv(c.out / "psi_curves.csv", {"k", "x", "psi"}, rows);

  const auto certs = verify_theorem1(b, L.spec(), kCertificateGrid);
  Json levels = Json::array(), dilations = Json::array();
  bool ok = true;
  for (const auto& cert : certs) {
    levels.push_back(to_json(cert));
    ok = ok && cert.pass;
  }
  for (int k = 0; k < L.d(); ++k) {
    const auto cert = verify_prop1(b, L.gamma(k), kCertificateGrid);
    dilations.push_back(to_json(cert));
    ok = ok && cert.pass;
  }
  write_json(c.out / "theorem1_report.json",
             Json{{"bundle", b.name},
                  {"R", b.R},
                  {"M1", b.M1},
                  {"M2", b.M2},
                  {"C1", b.C1()},
                  {"C2", b.C2()},
                  {"grid", kCertificateGrid},
                  {"levels", std::move(levels)},
                  {"dilations", std::move(dilations)},
                  {"pass", ok}});
  write_manifest(c, "decompose");
  std::cout << "wrote psi_curves.csv and theorem1_report.json; certificates " << (ok ? "pass" : "FAIL") << "\n";
  return ok ? kExitOk : kExitPropertyFailure;
}

int cmd_sample(const ExperimentConfig& c) {
  const auto e = build_experiment(c);
  std::vector<LevelWeightSet> sets;
  if (c.model.mode == TargetMode::kPlantedTeacher) {
    capped_sizes(e);
    sets = weight_sets(e);
  }
  const auto ds = make_dataset(e, sets);
  save(ds, c.out);
  write_manifest(c, "sample");
  std::cout << "wrote " << ds.n() << " samples to " << (c.out / "dataset.csv").string() << "\n";
  return kExitOk;
}

int cmd_train(const ExperimentConfig& c, const std::optional<fs::path>& resume) {
  const auto e = build_experiment(c);
  const auto sizes = capped_sizes(e);
  auto sets = weight_sets(e);
  const auto ds = make_dataset(e, sets);
  TrainConfig cfg{e.shape, sets, temperatures(e, sizes)};

  std::optional<TrainState> prior;
  if (resume) prior = train_state_from_json(read_json(*resume));
  const auto result = train_multiscale_entropic(cfg, ds, c.train.seed, c.train.stop_after,
                                                prior ? &*prior : nullptr);

  Json trace = to_json(result.state);
  if (c.model.mode == TargetMode::kPlantedTeacher) {
    const auto teacher = teacher_weights(e, sets);
    const auto teacher_model = make_model(e.shape, teacher);
    Json recovered = Json::array(), matched = Json::array();
    for (std::size_t k = 0; k < result.state.sampled.size(); ++k) {
      recovered.push_back(result.state.sampled[k] == teacher[k]);
      // Taps whose breakpoints the data never reaches are not identifiable,
      // so also record agreement with the teacher on the level's samples.
      bool same = true;
      for (double x : ds.instances) {
        if (scale_of(x, e.ladder) != static_cast<int>(k + 1)) continue;
        same = same && std::abs(prefix_output(e.shape, result.state.sampled, x) - model_output(teacher_model, x)) <= 1e-12;
      }
      matched.push_back(same);
    }
    trace["teacher_recovered"] = std::move(recovered);
    trace["teacher_matched_on_data"] = std::move(matched);
  }
  save(ds, c.out);
  write_json(c.out / "model.json", to_json(result.model, result.state.trained_levels()));
  write_json(c.out / "trace.json", trace);
  write_manifest(c, "train");

  for (const auto& tr : result.state.levels) {
    std::cout << "level " << tr.k << ": lambda=" << format_double(tr.lambda) << " |W|=" << tr.set_size
              << " chosen=" << tr.chosen << " loss=" << format_double(tr.chosen_loss)
              << " min=" << format_double(tr.min_loss) << "\n";
  }
  if (trace.contains("teacher_recovered")) {
    std::cout << "teacher recovered: " << trace["teacher_recovered"].dump()
              << ", matched on data: " << trace["teacher_matched_on_data"].dump() << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const ExperimentConfig& c, const std::optional<fs::path>& model_path) {
  const auto e = build_experiment(c);
  const auto sizes = capped_sizes(e);
  const auto model = model_from_json(read_json(model_path.value_or(c.out / "model.json")));
  if (!(model.shape.ladder == e.shape.ladder) || model.shape.levels != e.shape.levels) {
    throw ConfigError("model file does not match the configured ladder and levels");
  }
  std::vector<LevelWeightSet> sets;
  if (c.model.mode == TargetMode::kPlantedTeacher) sets = weight_sets(e);
  const auto target = target_function(e, sets);
  const auto w_hat = reference(e, sets);

  std::unique_ptr<Expectation> mu;
  if (c.eval.method == "monte-carlo") {
    mu = std::make_unique<MonteCarloExpectation>(e.law, c.eval.n_mc, c.eval.seed);
  } else {
    QuadratureOptions opt;
    opt.panels = c.eval.panels;
    mu = std::make_unique<QuadratureExpectation>(e.law, opt);
  }

  RiskReport r;
  r.method = mu->method();
  r.n_mc = c.eval.n_mc;
  r.eval_seed = c.eval.seed;
  r.statistical = statistical_risk(model, target, *mu);
  r.chained = chained_risk(model, w_hat, target, *mu);
  const auto logs = log_sizes_of(sizes);
  const auto sched = temperatures(e, sizes);
  const auto gammas = level_gammas(e.ladder);
  r.thm3 = thm3_bound(sched, logs, e.rho, gammas, c.train.n);
  r.cor2 = cor2_bound(e.ladder, e.rho, logs, c.train.n);
  r.proof_form_min = proof_form_minimum(e.ladder, e.rho, logs, c.train.n);
  const double C1 = e.bundle.C1();
  r.powerlaw_factor = powerlaw_factor(c.alpha, e.ladder.beta(), C1, e.ladder.R());
  try {
    r.risk_bound = risk_bound(e.ladder, e.rho, logs, c.train.n, c.alpha, C1);
  } catch (const BoundInapplicable& ex) {
    r.risk_bound_error = ex.what();
  }
  r.erm = erm_bound(e.rho, logs, c.train.n);
  r.lambda_ratio = lambda_ratio(e.ladder.R() / e.ladder.epsilon(), e.ladder.d());
  try {
    double slack = 0.0;
    if (c.eval.slack) {
      slack = *c.eval.slack;
    } else if (c.model.mode == TargetMode::kTanhTarget) {
      for (const auto& spec : e.shape.levels) slack += approx_error_bound(spec.tau, spec.eta, spec.span, e.bundle.C2());
    }
    r.theorem4 = theorem4_check(model, w_hat, target, *mu, c.alpha, C1, slack);
  } catch (const Error& ex) {
    r.theorem4_error = ex.what();
  }
  write_json(c.out / "risk_report.json", to_json(r));
  write_manifest(c, "evaluate");
  std::cout << "statistical risk " << format_double(r.statistical.value) << ", chained risk "
            << format_double(r.chained.total.value) << ", cor2 bound " << format_double(r.cor2) << "\n";
  return kExitOk;
}

int cmd_ratio(const ExperimentConfig& c) {
  const auto e = build_experiment(c);
  const double rbar = e.ladder.R() / e.ladder.epsilon();
  const int d = e.ladder.d();
  const double ratio = lambda_ratio(rbar, d);
  const auto logs = log_sizes_of(set_sizes(e));
  const double C1 = e.bundle.C1();

  std::vector<std::vector<double>> rows;
  for (std::size_t n = c.train.n, i = 0; i < 5; ++i, n *= 4) {
    double rb = std::numeric_limits<double>::quiet_NaN();
    try {
      rb = risk_bound(e.ladder, e.rho, logs, n, c.alpha, C1);
    } catch (const BoundInapplicable&) {
    }
    rows.push_back({static_cast<double>(n), static_cast<double>(d), e.ladder.beta(), c.alpha,
                    cor2_bound(e.ladder, e.rho, logs, n), erm_bound(e.rho, logs, n), rb, ratio});
  }
  write_csv(c.out / "bound_sweep.csv", {"n", "d", "beta", "alpha", "cor2", "erm", "risk_bound", "lambda_ratio"}, rows);
  write_json(c.out / "ratio.json", Json{{"R_bar", rbar},
                                        {"d", d},
                                        {"lambda_ratio", ratio},
                                        {"lambda_ratio_from_one", lambda_ratio(rbar, d, RatioConvention::kFromOne)}});
  write_manifest(c, "ratio");
  std::cout << "Lambda(R_bar=" << format_double(rbar) << ", d=" << d << ") = " << format_double(ratio) << "\n";
  return kExitOk;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPropertyFailure;
  }
}

}  // namespace msent::cli

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "msent/errors.hpp"
#include "msent/rng.hpp"

namespace msent::cli {

namespace {

void only_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key " + where + "." + k);
  }
}

template <class T>
void read(const Json& j, const char* key, const std::string& where, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

std::vector<double> number_array(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(what + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig c;
  only_keys(j, "config", {"ladder", "law", "target", "model", "train", "eval", "out"});

  if (j.contains("ladder")) {
    const auto& s = j["ladder"];
    only_keys(s, "ladder", {"epsilon", "beta", "d"});
    read(s, "epsilon", "ladder", c.ladder.epsilon);
    read(s, "beta", "ladder", c.ladder.beta);
    read(s, "d", "ladder", c.ladder.d);
  }
  if (j.contains("law")) {
    only_keys(j["law"], "law", {"alpha"});
    read(j["law"], "alpha", "law", c.alpha);
  }
  if (j.contains("target")) {
    const auto& s = j["target"];
    only_keys(s, "target", {"bundle", "param", "radius"});
    read(s, "bundle", "target", c.target.bundle);
    read(s, "param", "target", c.target.param);
    read(s, "radius", "target", c.target.radius);
  }
  if (j.contains("model")) {
    const auto& s = j["model"];
    only_keys(s, "model", {"tau", "eta", "rho", "base_slope", "mode", "teacher_seed", "enumeration_cap"});
    read(s, "tau", "model", c.model.tau);
    if (s.contains("eta")) {
      const auto& e = s["eta"];
      if (e.is_number()) {
        c.model.eta = {{e.get<double>()}, 0};
      } else if (e.is_array()) {
        c.model.eta = {number_array(e, "model.eta"), 0};
      } else if (e.is_object()) {
        only_keys(e, "model.eta", {"max_set_size"});
        c.model.eta = {{}, 0};
        read(e, "max_set_size", "model.eta", c.model.eta.max_set_size);
        require(c.model.eta.max_set_size >= 3, "model.eta.max_set_size must be >= 3");
      } else {
        throw ConfigError("model.eta must be a number, an array or {\"max_set_size\": N}");
      }
    }
    if (s.contains("rho")) {
      const auto& r = s["rho"];
      if (r.is_string()) {
        require(r.get<std::string>() == "formula", "model.rho must be \"formula\" or an array");
        c.model.rho.clear();
      } else {
        c.model.rho = number_array(r, "model.rho");
      }
    }
    if (s.contains("base_slope")) {
      const auto& b = s["base_slope"];
      if (b.is_string()) {
        require(b.get<std::string>() == "f-prime-0", "model.base_slope must be \"f-prime-0\" or a number");
        c.model.base_slope.reset();
      } else if (b.is_number()) {
        c.model.base_slope = b.get<double>();
      } else {
        throw ConfigError("model.base_slope must be \"f-prime-0\" or a number");
      }
    }
    if (s.contains("mode")) {
      std::string m;
      read(s, "mode", "model", m);
      c.model.mode = target_mode_from_string(m);
    }
    read(s, "teacher_seed", "model", c.model.teacher_seed);
    read(s, "enumeration_cap", "model", c.model.enumeration_cap);
  }
  if (j.contains("train")) {
    const auto& s = j["train"];
    only_keys(s, "train", {"n", "seed", "lambda", "stop_after"});
    read(s, "n", "train", c.train.n);
    read(s, "seed", "train", c.train.seed);
    if (s.contains("lambda")) {
      const auto& l = s["lambda"];
      if (l.is_string()) {
        require(l.get<std::string>() == "corollary2", "train.lambda must be \"corollary2\" or an array");
        c.train.lambda_bar.clear();
      } else {
        c.train.lambda_bar = number_array(l, "train.lambda");
      }
    }
    if (s.contains("stop_after") && !s["stop_after"].is_null()) {
      int k = 0;
      read(s, "stop_after", "train", k);
      c.train.stop_after = k;
    }
  }
  if (j.contains("eval")) {
    const auto& s = j["eval"];
    only_keys(s, "eval", {"method", "n_mc", "seed", "panels", "trials", "slack"});
    read(s, "method", "eval", c.eval.method);
    read(s, "n_mc", "eval", c.eval.n_mc);
    read(s, "seed", "eval", c.eval.seed);
    read(s, "panels", "eval", c.eval.panels);
    read(s, "trials", "eval", c.eval.trials);
    if (s.contains("slack")) {
      const auto& v = s["slack"];
      if (v.is_string()) {
        require(v.get<std::string>() == "auto", "eval.slack must be \"auto\" or a number");
        c.eval.slack.reset();
      } else if (v.is_number()) {
        c.eval.slack = v.get<double>();
      } else {
        throw ConfigError("eval.slack must be \"auto\" or a number");
      }
    }
  }
  if (j.contains("out")) {
    const auto& s = j["out"];
    only_keys(s, "out", {"directory"});
    std::string dir = c.out.string();
    read(s, "directory", "out", dir);
    c.out = dir;
  }

  const auto d = static_cast<std::size_t>(c.ladder.d);
  require(c.ladder.d >= 1, "ladder.d must be >= 1");
  require(c.ladder.epsilon > 0.0, "ladder.epsilon must be positive");
  require(c.ladder.beta > 1.0, "ladder.beta must be > 1");
  require(c.alpha >= 1.0, "law.alpha must be >= 1");
  require(c.target.radius >= 0.0, "target.radius must be non-negative");
  require(c.model.tau >= 1, "model.tau must be >= 1");
  require(c.model.eta.values.size() <= 1 || c.model.eta.values.size() == d, "model.eta array needs d entries");
  for (double e : c.model.eta.values) require(e > 0.0, "model.eta must be positive");
  require(c.model.rho.empty() || c.model.rho.size() == d, "model.rho array needs d entries");
  for (double r : c.model.rho) require(r > 0.0, "model.rho entries must be positive");
  require(c.train.n >= 1, "train.n must be >= 1");
  require(c.train.lambda_bar.empty() || c.train.lambda_bar.size() == d, "train.lambda array needs d entries");
  for (double l : c.train.lambda_bar) require(l > 0.0, "train.lambda entries must be positive");
  if (c.train.stop_after) require(*c.train.stop_after >= 0, "train.stop_after must be >= 0");
  require(c.eval.method == "quadrature" || c.eval.method == "monte-carlo",
          "eval.method must be \"quadrature\" or \"monte-carlo\"");
  require(c.eval.n_mc >= 2, "eval.n_mc must be >= 2");
  require(c.eval.panels >= 1, "eval.panels must be >= 1");
  if (c.eval.slack) require(*c.eval.slack >= 0.0, "eval.slack must be non-negative");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_json(path)); }

Json resolved_json(const ExperimentConfig& c) {
  Json eta;
  if (c.model.eta.values.empty()) {
    eta = Json{{"max_set_size", c.model.eta.max_set_size}};
  } else if (c.model.eta.values.size() == 1) {
    eta = c.model.eta.values.front();
  } else {
    eta = c.model.eta.values;
  }
  return Json{
      {"ladder", {{"epsilon", c.ladder.epsilon}, {"beta", c.ladder.beta}, {"d", c.ladder.d}}},
      {"law", {{"alpha", c.alpha}}},
      {"target", {{"bundle", c.target.bundle}, {"param", c.target.param}, {"radius", c.target.radius}}},
      {"model",
       {{"tau", c.model.tau},
        {"eta", eta},
        {"rho", c.model.rho.empty() ? Json("formula") : Json(c.model.rho)},
        {"base_slope", c.model.base_slope ? Json(*c.model.base_slope) : Json("f-prime-0")},
        {"mode", to_string(c.model.mode)},
        {"teacher_seed", c.model.teacher_seed},
        {"enumeration_cap", c.model.enumeration_cap}}},
      {"train",
       {{"n", c.train.n},
        {"seed", c.train.seed},
        {"lambda", c.train.lambda_bar.empty() ? Json("corollary2") : Json(c.train.lambda_bar)},
        {"stop_after", c.train.stop_after ? Json(*c.train.stop_after) : Json(nullptr)}}},
      {"eval",
       {{"method", c.eval.method},
        {"n_mc", c.eval.n_mc},
        {"seed", c.eval.seed},
        {"panels", c.eval.panels},
        {"trials", c.eval.trials},
        {"slack", c.eval.slack ? Json(*c.eval.slack) : Json("auto")}}},
      {"out", {{"directory", c.out.string()}}}};
}

namespace {

/// Largest r with |{z : |z|_1 <= r}| <= cap in dimension dim.
std::int64_t units_for_cap(std::size_t dim, std::uint64_t cap) {
  std::int64_t r = 0;
  while (lattice_ball_count(dim, r + 1) <= cap) ++r;
  if (r == 0) throw ConfigError("model.eta.max_set_size admits no non-trivial weight set");
  return r;
}

}  // namespace

Experiment build_experiment(const ExperimentConfig& c) {
  ScaleLadder ladder(c.ladder.epsilon, c.ladder.beta, c.ladder.d);
  PowerLaw law(c.alpha, ladder);
  const double radius = c.target.radius > 0.0 ? c.target.radius : ladder.R();
  if (radius < ladder.R()) throw ConfigError("target.radius must cover the ladder's R");
  DiffeoBundle bundle = make_bundle(c.target.bundle, radius, c.target.param);
  const auto d = static_cast<std::size_t>(c.ladder.d);
  const double span = bundle.M1 * bundle.R;

  const int tau = c.model.tau;
  std::vector<double> rho = c.model.rho;
  std::vector<double> eta;
  if (c.model.eta.values.empty()) {
    const auto r = units_for_cap(static_cast<std::size_t>(tau) + 1, c.model.eta.max_set_size);
    if (!rho.empty()) {
      for (double v : rho) eta.push_back(v / static_cast<double>(r));
    } else {
      // rho_k = A_k + (tau + 1) eta / 2 with rho_k = r eta gives eta = A_k / (r - (tau + 1) / 2).
      const double denom = static_cast<double>(r) - (tau + 1) / 2.0;
      if (!(denom > 0.0)) throw ConfigError("model.eta.max_set_size is too small for the rho formula");
      for (double a : rho_schedule(ladder, bundle.M1, bundle.C1(), bundle.C2(), tau, 0.0)) {
        eta.push_back(a / denom);
        rho.push_back(a + (tau + 1) * eta.back() / 2.0);
      }
    }
  } else {
    eta = c.model.eta.values.size() == 1 ? std::vector<double>(d, c.model.eta.values.front()) : c.model.eta.values;
    if (rho.empty()) {
      for (std::size_t k = 0; k < d; ++k) {
        rho.push_back(rho_schedule(ladder, bundle.M1, bundle.C1(), bundle.C2(), tau, eta[k])[k]);
      }
    }
  }

  ModelTemplate shape;
  shape.ladder = ladder;
  shape.base_slope = c.model.base_slope ? *c.model.base_slope : bundle.df(0.0);
  for (std::size_t k = 0; k < d; ++k) shape.levels.emplace_back(tau, eta[k], rho[k], span);
  check_template(shape);
  return Experiment{c, std::move(ladder), std::move(law), std::move(bundle), std::move(rho), std::move(eta),
                    std::move(shape)};
}

std::vector<std::uint64_t> set_sizes(const Experiment& e) {
  std::vector<std::uint64_t> out;
  for (const auto& spec : e.shape.levels) out.push_back(lattice_ball_count(spec.dim(), spec.max_units()));
  return out;
}

std::vector<LevelWeightSet> weight_sets(const Experiment& e) {
  return enumerate_all(e.shape, e.config.model.enumeration_cap);
}

std::vector<WeightVector> teacher_weights(const Experiment& e, const std::vector<LevelWeightSet>& sets) {
  std::vector<WeightVector> out;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    Rng rng(e.config.model.teacher_seed, Stream::kTeacher, k + 1);
    out.push_back(sets[k][rng.below(sets[k].size())]);
  }
  return out;
}

RealFn target_function(const Experiment& e, const std::vector<LevelWeightSet>& sets) {
  if (e.config.model.mode == TargetMode::kTanhTarget) return e.bundle.f;
  auto teacher = std::make_shared<HierarchicalModel>(make_model(e.shape, teacher_weights(e, sets)));
  return [teacher](double x) { return model_output(*teacher, x); };
}

std::vector<WeightVector> reference(const Experiment& e, const std::vector<LevelWeightSet>& sets) {
  if (e.config.model.mode == TargetMode::kPlantedTeacher) return teacher_weights(e, sets);
  return reference_weights(e.bundle, e.shape);
}

TemperatureSchedule temperatures(const Experiment& e, std::span<const std::uint64_t> sizes) {
  if (!e.config.train.lambda_bar.empty()) return TemperatureSchedule::from_increments(e.config.train.lambda_bar);
  return lambda_schedule(e.ladder, e.rho, e.config.train.n, sizes);
}

}  // namespace msent::cli

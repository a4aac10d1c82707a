#include "msent/io.hpp"

#include <cstdio>
#include <fstream>

#include "msent/errors.hpp"

namespace msent {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace

Json to_json(const DiscreteDistribution& p) {
  return Json{{"support", p.support()}, {"probs", std::vector<double>(p.probs().begin(), p.probs().end())}};
}

DiscreteDistribution distribution_from_json(const Json& j) {
  return DiscreteDistribution(get<std::vector<Label>>(j, "support"), get<std::vector<double>>(j, "probs"));
}

Json to_json(const ScaleLadder& ladder) {
  return Json{{"epsilon", ladder.epsilon()}, {"beta", ladder.beta()}, {"d", ladder.d()}};
}

ScaleLadder ladder_from_json(const Json& j) {
  return ScaleLadder(get<double>(j, "epsilon"), get<double>(j, "beta"), get<int>(j, "d"));
}

Json to_json(const LevelSpec& spec) {
  return Json{{"tau", spec.tau}, {"eta", spec.eta}, {"rho", spec.rho}, {"span", spec.span}};
}

LevelSpec level_spec_from_json(const Json& j) {
  return LevelSpec(get<int>(j, "tau"), get<double>(j, "eta"), get<double>(j, "rho"), get<double>(j, "span"));
}

Json to_json(const WeightVector& w) {
  Json units = Json::array();
  for (auto u : w.tap_units()) units.push_back(u);
  units.push_back(w.constant_units());
  return units;
}

WeightVector weights_from_json(const Json& j, double eta) {
  if (!j.is_array() || j.empty()) throw ConfigError("weights must be a non-empty array of integers");
  std::vector<std::int64_t> units;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ConfigError("weights must be integer multiples of eta");
    units.push_back(v.get<std::int64_t>());
  }
  const auto c = units.back();
  units.pop_back();
  return WeightVector(std::move(units), c, eta);
}

Json to_json(const HierarchicalModel& m, int trained_levels) {
  Json levels = Json::array();
  for (int k = 1; k <= m.shape.d(); ++k) {
    Json l = to_json(m.shape.level(k));
    l["weights"] = to_json(m.weights.at(static_cast<std::size_t>(k - 1)));
    levels.push_back(std::move(l));
  }
  return Json{{"ladder", to_json(m.shape.ladder)},
              {"base_slope", m.shape.base_slope},
              {"trained_levels", trained_levels},
              {"levels", std::move(levels)}};
}

HierarchicalModel model_from_json(const Json& j) {
  ModelTemplate t;
  t.ladder = ladder_from_json(field(j, "ladder"));
  t.base_slope = get<double>(j, "base_slope");
  std::vector<WeightVector> weights;
  for (const auto& l : field(j, "levels")) {
    t.levels.push_back(level_spec_from_json(l));
    weights.push_back(weights_from_json(field(l, "weights"), t.levels.back().eta));
  }
  return make_model(std::move(t), std::move(weights));
}

Json to_json(const TrainState& s) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < s.levels.size(); ++i) {
    const auto& tr = s.levels[i];
    levels.push_back(Json{{"k", tr.k},
                          {"lambda", tr.lambda},
                          {"log_partition", tr.log_partition},
                          {"chosen", tr.chosen},
                          {"chosen_weights", to_json(s.sampled.at(i))},
                          {"eta", s.sampled.at(i).eta()},
                          {"chosen_loss", tr.chosen_loss},
                          {"min_loss", tr.min_loss},
                          {"set_size", tr.set_size}});
  }
  return Json{{"seed", s.seed}, {"trained_levels", s.trained_levels()}, {"levels", std::move(levels)}};
}

TrainState train_state_from_json(const Json& j) {
  TrainState s;
  s.seed = get<std::uint64_t>(j, "seed");
  for (const auto& l : field(j, "levels")) {
    LevelTrace tr;
    tr.k = get<int>(l, "k");
    tr.lambda = get<double>(l, "lambda");
    tr.log_partition = get<double>(l, "log_partition");
    tr.chosen = get<std::size_t>(l, "chosen");
    tr.chosen_loss = get<double>(l, "chosen_loss");
    tr.min_loss = get<double>(l, "min_loss");
    tr.set_size = get<std::size_t>(l, "set_size");
    if (tr.k != s.trained_levels() + 1) throw ConfigError("trace levels must be consecutive from 1");
    s.sampled.push_back(weights_from_json(field(l, "chosen_weights"), get<double>(l, "eta")));
    s.levels.push_back(std::move(tr));
  }
  return s;
}

Json to_json(const LevelCertificate& c) {
  return Json{{"k", c.k},
              {"domain", {c.domain.lo, c.domain.hi}},
              {"lipschitz_estimate", c.lip_est},
              {"lipschitz_bound", c.lip_bound},
              {"lipschitz_margin", c.lip_bound - c.lip_est},
              {"smoothness_estimate", c.smooth_est},
              {"smoothness_bound", c.smooth_bound},
              {"smoothness_margin", c.smooth_bound - c.smooth_est},
              {"pass", c.pass}};
}

Json to_json(const DilationCertificate& c) {
  return Json{{"gamma", c.gamma},
              {"lipschitz_estimate", c.lip_est},
              {"bound", c.bound},
              {"margin", c.bound - c.lip_est},
              {"pass", c.pass}};
}

Json to_json(const RiskEstimate& e) {
  return Json{{"value", e.value}, {"std_error", e.std_error}, {"fell_back", e.fell_back}};
}

Json to_json(const Theorem4Check& t) {
  return Json{{"factor", t.factor}, {"statistical_risk", t.statistical}, {"chained_risk", t.chained},
              {"slack", t.slack},   {"lhs", t.lhs},                       {"rhs", t.rhs},
              {"margin", t.margin()}, {"pass", t.pass}};
}

Json to_json(const RiskReport& r) {
  Json method{{"name", r.method}};
  if (r.method == "monte-carlo") {
    method["n_mc"] = r.n_mc;
    method["seed"] = r.eval_seed;
  }
  Json per_level = Json::array();
  for (const auto& e : r.chained.per_level) per_level.push_back(to_json(e));
  Json bounds{{"thm3_statement", r.thm3.statement},
              {"thm3_proof_form", r.thm3.proof_form},
              {"cor2", r.cor2},
              {"proof_form_minimum", r.proof_form_min},
              {"powerlaw_factor", r.powerlaw_factor}};
  if (r.risk_bound) {
    bounds["risk_bound"] = *r.risk_bound;
  } else {
    bounds["risk_bound"] = nullptr;
    bounds["risk_bound_error"] = r.risk_bound_error;
  }
  bounds["erm_bound"] = r.erm;
  Json out{{"method", std::move(method)},
           {"statistical_risk", to_json(r.statistical)},
           {"chained_risk", to_json(r.chained.total)},
           {"per_level_deviations", std::move(per_level)},
           {"bounds", std::move(bounds)},
           {"lambda_ratio", r.lambda_ratio}};
  if (r.theorem4) {
    out["theorem4"] = to_json(*r.theorem4);
  } else {
    out["theorem4"] = Json{{"error", r.theorem4_error}};
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw StructuralError("CSV row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

}  // namespace msent

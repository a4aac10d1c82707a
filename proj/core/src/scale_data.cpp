#include "msent/scale_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msent/errors.hpp"
#include "msent/rng.hpp"

namespace msent {

ScaleLadder::ScaleLadder(double epsilon, double beta, int d)
    : epsilon_(epsilon), beta_(beta), d_(d) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
  if (!(beta > 1.0) || !std::isfinite(beta)) throw InvalidArgument("beta must exceed 1");
  if (d < 1) throw InvalidArgument("the ladder needs d >= 1 levels");
  R_ = epsilon_ * std::pow(beta_, d_);
  gamma_.resize(static_cast<std::size_t>(d_) + 1);
  edges_.resize(static_cast<std::size_t>(d_) + 1);
  for (int k = 0; k <= d_; ++k) {
    gamma_[static_cast<std::size_t>(k)] = std::pow(beta_, k - d_);
    edges_[static_cast<std::size_t>(k)] = epsilon_ * std::pow(beta_, k);
  }
  gamma_.back() = 1.0;
  edges_.front() = epsilon_;
  edges_.back() = R_;
}

bool ScaleLadder::contains(double x) const {
  const double a = std::abs(x);
  return a >= epsilon_ && a < R_;
}

ScaleLadder build_ladder(double epsilon, double beta, int d) { return ScaleLadder(epsilon, beta, d); }

int scale_of(double x, const ScaleLadder& ladder) {
  const double a = std::abs(x);
  if (!(a >= ladder.epsilon() && a < ladder.R())) {
    std::ostringstream os;
    os << "instance " << x << " outside the domain [" << ladder.epsilon() << ", " << ladder.R()
       << ")";
    throw DomainError(os.str());
  }
  // First edge strictly above |x|; edges are increasing so this is unique.
  int lo = 1, hi = ladder.d();
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (a < ladder.edge(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

PowerLaw::PowerLaw(double alpha, ScaleLadder ladder) : alpha_(alpha), ladder_(std::move(ladder)) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw InvalidArgument("power-law shape must be >= 1");
  const double eps = ladder_.epsilon(), R = ladder_.R();
  if (alpha_ == 1.0) {
    normalizer_ = 2.0 * std::log(R / eps);
  } else {
    normalizer_ = 2.0 * (std::pow(eps, 1.0 - alpha_) - std::pow(R, 1.0 - alpha_)) / (alpha_ - 1.0);
  }
}

double PowerLaw::density(double x) const {
  if (!ladder_.contains(x)) return 0.0;
  return 1.0 / (normalizer_ * std::pow(std::abs(x), alpha_));
}

double PowerLaw::magnitude_cdf(double r) const {
  const double eps = ladder_.epsilon(), R = ladder_.R();
  r = std::clamp(r, eps, R);
  if (alpha_ == 1.0) return std::log(r / eps) / std::log(R / eps);
  const double a = 1.0 - alpha_;
  return (std::pow(eps, a) - std::pow(r, a)) / (std::pow(eps, a) - std::pow(R, a));
}

double PowerLaw::magnitude_quantile(double u) const {
  const double eps = ladder_.epsilon(), R = ladder_.R();
  double r;
  if (alpha_ == 1.0) {
    r = eps * std::pow(R / eps, u);
  } else {
    const double a = 1.0 - alpha_;
    const double ea = std::pow(eps, a);
    r = std::pow(ea - u * (ea - std::pow(R, a)), 1.0 / a);
  }
  // Keep the right-open edge open under rounding.
  return std::clamp(r, eps, std::nextafter(R, 0.0));
}

double scale_mass(const PowerLaw& law, int k) {
  const auto& L = law.ladder();
  if (k < 1 || k > L.d()) throw InvalidArgument("scale index out of range");
  if (law.alpha() == 1.0) {
    return std::log(L.edge(k) / L.edge(k - 1)) / std::log(L.R() / L.epsilon());
  }
  return law.magnitude_cdf(L.edge(k)) - law.magnitude_cdf(L.edge(k - 1));
}

std::vector<double> sample_power_law(const PowerLaw& law, std::size_t n, std::uint64_t seed) {
  Rng rng(seed, Stream::kSampling);
  std::vector<double> xs(n);
  for (auto& x : xs) {
    const double s = rng.sign();
    x = s * law.magnitude_quantile(rng.uniform());
  }
  return xs;
}

double scale_invariance_check(const PowerLaw& law, std::size_t grid_n) {
  const auto& L = law.ladder();
  if (grid_n < 2) throw InvalidArgument("grid needs at least two points");
  const double lo = L.epsilon() * L.beta();
  const double hi = L.R();
  const double ba = std::pow(L.beta(), law.alpha());
  double worst = 0.0;
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_n);
    for (double s : {-1.0, 1.0}) {
      const double q = law.density(s * x);
      const double qs = law.density(s * x / L.beta());
      worst = std::max(worst, std::abs(qs - ba * q) / q);
    }
  }
  return worst;
}

std::string to_string(TargetMode m) {
  return m == TargetMode::kTanhTarget ? "tanh-target" : "planted-teacher";
}

TargetMode target_mode_from_string(const std::string& s) {
  if (s == "tanh-target") return TargetMode::kTanhTarget;
  if (s == "planted-teacher") return TargetMode::kPlantedTeacher;
  throw ConfigError("unknown target mode '" + s + "'");
}

Dataset generate_dataset(const RealFn& target, TargetMode mode, const PowerLaw& law,
                         std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("a dataset needs n >= 1 samples");
  Dataset ds;
  ds.instances = sample_power_law(law, n, seed);
  ds.labels.reserve(n);
  for (double x : ds.instances) ds.labels.push_back(target(x));
  ds.seed = seed;
  ds.mode = mode;
  ds.alpha = law.alpha();
  ds.ladder = law.ladder();
  return ds;
}

Dataset generate_dataset(const DiffeoBundle& target, const PowerLaw& law, std::size_t n,
                         std::uint64_t seed) {
  if (law.ladder().R() > target.R) {
    throw DomainError("target bundle is not defined on the whole instance domain");
  }
  return generate_dataset(target.f, TargetMode::kTanhTarget, law, n, seed);
}

void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                  const std::filesystem::path& manifest_path) {
  for (const auto& p : {csv_path, manifest_path}) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream csv(csv_path);
  if (!csv) throw ConfigError("cannot write " + csv_path.string());
  csv << "x,y\n";
  char buf[64];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", ds.instances[i], ds.labels[i]);
    csv << buf;
  }
  nlohmann::json m = {{"alpha", ds.alpha},
                      {"epsilon", ds.ladder.epsilon()},
                      {"beta", ds.ladder.beta()},
                      {"d", ds.ladder.d()},
                      {"n", ds.n()},
                      {"seed", ds.seed},
                      {"mode", to_string(ds.mode)}};
  std::ofstream man(manifest_path);
  if (!man) throw ConfigError("cannot write " + manifest_path.string());
  man << m.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& manifest_path) {
  std::ifstream man(manifest_path);
  if (!man) throw ConfigError("cannot read " + manifest_path.string());
  nlohmann::json m;
  try {
    man >> m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed dataset manifest: " + std::string(e.what()));
  }
  Dataset ds;
  try {
    ds.alpha = m.at("alpha").get<double>();
    ds.ladder = ScaleLadder(m.at("epsilon").get<double>(), m.at("beta").get<double>(),
                            m.at("d").get<int>());
    ds.seed = m.at("seed").get<std::uint64_t>();
    ds.mode = target_mode_from_string(m.at("mode").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("dataset manifest: " + std::string(e.what()));
  }
  std::ifstream csv(csv_path);
  if (!csv) throw ConfigError("cannot read " + csv_path.string());
  std::string line;
  if (!std::getline(csv, line) || line != "x,y") throw ConfigError("dataset CSV must start with 'x,y'");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("dataset row without a comma: " + line);
    char* end = nullptr;
    const double x = std::strtod(line.c_str(), &end);
    const double y = std::strtod(line.c_str() + comma + 1, &end);
    ds.instances.push_back(x);
    ds.labels.push_back(y);
  }
  if (ds.n() != m.at("n").get<std::size_t>()) throw ConfigError("dataset row count differs from manifest");
  return ds;
}

}  // namespace msent

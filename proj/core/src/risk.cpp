#include "msent/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msent/errors.hpp"
#include "msent/ladder.hpp"
#include "msent/rng.hpp"

namespace msent {

namespace {

void check_scale(const ScaleLadder& ladder, int k) {
  if (k < 0 || k > ladder.d()) throw InvalidArgument("scale index out of range");
}

}  // namespace

QuadratureExpectation::QuadratureExpectation(PowerLaw law, QuadratureOptions opt)
    : law_(std::move(law)), opt_(opt) {
  if (opt_.panels == 0) throw InvalidArgument("quadrature needs at least one panel");
  if (opt_.adaptive && !(opt_.tolerance > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
}

double QuadratureExpectation::midpoint(const ScaleFn& g, int k, std::size_t panels) const {
  const auto& L = law_.ladder();
  const double u_lo = law_.magnitude_cdf(L.edge(k - 1));
  const double u_hi = k == L.d() ? 1.0 : law_.magnitude_cdf(L.edge(k));
  const double h = (u_hi - u_lo) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double r = law_.magnitude_quantile(u_lo + (static_cast<double>(i) + 0.5) * h);
    sum += g(r, k) + g(-r, k);
  }
  // Each sign carries half of the magnitude mass.
  return 0.5 * h * sum;
}

RiskEstimate QuadratureExpectation::integrate(const ScaleFn& g, int k) const {
  check_scale(law_.ladder(), k);
  RiskEstimate out;
  const int first = k == 0 ? 1 : k, last = k == 0 ? law_.ladder().d() : k;
  for (int s = first; s <= last; ++s) {
    double value = midpoint(g, s, opt_.panels);
    if (opt_.adaptive) {
      bool converged = false;
      for (std::size_t p = 2 * opt_.panels; p <= opt_.max_panels; p *= 2) {
        const double refined = midpoint(g, s, p);
        const bool close = std::abs(refined - value) <= opt_.tolerance;
        value = refined;
        if (close) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        const MonteCarloExpectation mc(law_, opt_.fallback_n_mc, opt_.fallback_seed);
        const auto est = mc.integrate(g, s);
        value = est.value;
        out.std_error = std::hypot(out.std_error, est.std_error);
        out.fell_back = true;
      }
    }
    out.value += value;
  }
  return out;
}

MonteCarloExpectation::MonteCarloExpectation(const PowerLaw& law, std::size_t n, std::uint64_t seed)
    : ladder_(law.ladder()), seed_(seed) {
  if (n < 2) throw InvalidArgument("Monte Carlo needs at least two draws");
  Rng rng(seed, Stream::kEvaluation);
  x_.resize(n);
  k_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = rng.sign();
    x_[i] = s * law.magnitude_quantile(rng.uniform());
    k_[i] = scale_of(x_[i], ladder_);
  }
}

RiskEstimate MonteCarloExpectation::integrate(const ScaleFn& g, int k) const {
  check_scale(ladder_, k);
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double v = (k == 0 || k_[i] == k) ? g(x_[i], k_[i]) : 0.0;
    // Welford update.
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(x_.size());
  return RiskEstimate{mean, std::sqrt(m2 / (n - 1.0) / n), false};
}

DiscreteExpectation::DiscreteExpectation(ScaleLadder ladder, std::vector<double> points,
                                         std::vector<double> probs)
    : ladder_(std::move(ladder)), x_(std::move(points)), p_(std::move(probs)) {
  if (x_.empty() || x_.size() != p_.size()) throw InvalidArgument("discrete measure needs matching points and weights");
  double total = 0.0;
  for (double p : p_) {
    if (!(p >= 0.0)) throw InvalidArgument("discrete measure weights must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormTolerance) throw InvalidArgument("discrete measure weights must sum to 1");
  for (double x : x_) k_.push_back(scale_of(x, ladder_));
}

RiskEstimate DiscreteExpectation::integrate(const ScaleFn& g, int k) const {
  check_scale(ladder_, k);
  double sum = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (k == 0 || k_[i] == k) sum += p_[i] * g(x_[i], k_[i]);
  }
  return RiskEstimate{sum, 0.0, false};
}

double level_loss_at(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                     const WeightVector& v, const RealFn& target, double x, int k) {
  const double g = shape.ladder.gamma(k);
  const double h = forward_prefix(shape, prefix, k - 1, x / g);
  return std::abs(g * (h + heaviside_net_eval(shape.level(k), v, h)) - target(x));
}

RiskEstimate statistical_risk(const HierarchicalModel& model, const RealFn& target,
                              const Expectation& mu) {
  if (!(model.shape.ladder == mu.ladder())) throw StructuralError("model and law use different ladders");
  const auto& w = model.weights;
  return mu.integrate([&](double x, int k) {
    return level_loss_at(model.shape, w, w[static_cast<std::size_t>(k - 1)], target, x, k);
  });
}

ChainedRisk chained_risk(const HierarchicalModel& w, std::span<const WeightVector> w_hat,
                         const RealFn& target, const Expectation& mu) {
  const auto& shape = w.shape;
  if (!(shape.ladder == mu.ladder())) throw StructuralError("model and law use different ladders");
  if (static_cast<int>(w_hat.size()) != shape.d()) throw StructuralError("reference weights need one vector per level");
  for (int k = 1; k <= shape.d(); ++k) check_fits(shape.level(k), w_hat[static_cast<std::size_t>(k - 1)]);

  const auto deviation = [&](double x, int k) {
    const auto kk = static_cast<std::size_t>(k - 1);
    const double g = shape.ladder.gamma(k);
    const double h = forward_prefix(shape, w.weights, k - 1, x / g);
    const double y = target(x);
    const double own = std::abs(g * (h + heaviside_net_eval(shape.level(k), w.weights[kk], h)) - y);
    const double ref = std::abs(g * (h + heaviside_net_eval(shape.level(k), w_hat[kk], h)) - y);
    return own - ref;
  };
  ChainedRisk out;
  out.total = mu.integrate(deviation);
  for (int k = 1; k <= shape.d(); ++k) out.per_level.push_back(mu.integrate(deviation, k));
  return out;
}

std::vector<WeightVector> reference_weights(const DiffeoBundle& b, const ModelTemplate& shape) {
  check_template(shape);
  std::vector<WeightVector> out;
  for (int k = 1; k <= shape.d(); ++k) {
    const double gp = shape.ladder.gamma(k - 1), gn = shape.ladder.gamma(k);
    const auto& spec = shape.level(k);
    const Interval dom = psi_domain(b, gp);
    const auto cont = riemann_network_from([&](double x) { return psi_k_prime(b, gp, gn, x); },
                                           psi_k(b, gp, gn, dom.lo), dom, spec);
    out.push_back(discretize_weights(cont, spec.eta));
  }
  return out;
}

std::vector<double> log_sizes_of(std::span<const std::uint64_t> set_sizes) {
  std::vector<double> out;
  for (auto s : set_sizes) {
    if (s == 0) throw InvalidArgument("weight sets must be non-empty");
    out.push_back(std::log(static_cast<double>(s)));
  }
  return out;
}

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b || a == 0) throw StructuralError("per-level inputs must have equal, non-zero length");
}

void check_n(std::size_t n) {
  if (n == 0) throw InvalidArgument("sample size must be >= 1");
}

/// sum_k gamma_k rho_k sqrt(sum_{m<=k} log|W_m|).
double chain_sum(const ScaleLadder& ladder, std::span<const double> rho, std::span<const double> log_sizes) {
  check_lengths(rho.size(), log_sizes.size());
  if (static_cast<int>(rho.size()) != ladder.d()) throw StructuralError("per-level inputs must have length d");
  double cum = 0.0, total = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    cum += log_sizes[k];
    total += ladder.gamma(static_cast<int>(k) + 1) * rho[k] * std::sqrt(cum);
  }
  return total;
}

}  // namespace

Thm3Bound thm3_bound(const TemperatureSchedule& schedule, std::span<const double> log_sizes,
                     std::span<const double> rho, std::span<const double> gamma, std::size_t n) {
  check_n(n);
  check_lengths(rho.size(), log_sizes.size());
  check_lengths(rho.size(), gamma.size());
  if (static_cast<int>(rho.size()) != schedule.d()) throw StructuralError("schedule length differs from d");
  const double nn = static_cast<double>(n);
  Thm3Bound out;
  double cum = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    cum += log_sizes[k];
    const double lb = schedule.lambda_bar(static_cast<int>(k) + 1);
    out.statement += 2.0 * lb * cum + rho[k] * rho[k] / (2.0 * nn * lb);
    out.proof_form += 2.0 * lb * cum + 8.0 * gamma[k] * gamma[k] * rho[k] * rho[k] / (nn * lb);
  }
  return out;
}

double cor2_bound(const ScaleLadder& ladder, std::span<const double> rho, std::span<const double> log_sizes,
                  std::size_t n) {
  check_n(n);
  return 4.0 / std::sqrt(static_cast<double>(n)) * chain_sum(ladder, rho, log_sizes);
}

double proof_form_minimum(const ScaleLadder& ladder, std::span<const double> rho,
                          std::span<const double> log_sizes, std::size_t n) {
  check_n(n);
  return 8.0 / std::sqrt(static_cast<double>(n)) * chain_sum(ladder, rho, log_sizes);
}

double powerlaw_factor(double alpha, double beta, double C1, double R) {
  if (!(alpha >= 1.0)) throw InvalidArgument("alpha must be >= 1");
  if (!(beta > 1.0)) throw InvalidArgument("beta must be > 1");
  return 1.0 - std::pow(beta, 1.0 - alpha) * (1.0 + C1 * R * (1.0 - 1.0 / beta));
}

double risk_bound(const ScaleLadder& ladder, std::span<const double> rho, std::span<const double> log_sizes,
                  std::size_t n, double alpha, double C1) {
  const double factor = powerlaw_factor(alpha, ladder.beta(), C1, ladder.R());
  if (!(factor > 0.0)) {
    throw BoundInapplicable("power-law factor is " + std::to_string(factor) + " (must be positive)");
  }
  return cor2_bound(ladder, rho, log_sizes, n) / factor;
}

double erm_bound(std::span<const double> rho, std::span<const double> log_sizes, std::size_t n) {
  check_n(n);
  check_lengths(rho.size(), log_sizes.size());
  const double rho_sum = std::accumulate(rho.begin(), rho.end(), 0.0);
  const double log_sum = std::accumulate(log_sizes.begin(), log_sizes.end(), 0.0);
  return rho_sum * std::sqrt(log_sum) / std::sqrt(static_cast<double>(n));
}

double lambda_ratio(double R_bar, int d, RatioConvention conv) {
  if (!(R_bar > 1.0)) throw InvalidArgument("R_bar must be > 1");
  if (d < 1) throw InvalidArgument("d must be >= 1");
  const double beta = std::pow(R_bar, 1.0 / d);
  const double sd = std::sqrt(static_cast<double>(d));
  double num = 0.0, den = 0.0;
  for (int k = 1; k <= d; ++k) {
    num += std::pow(beta, 2 * k - d) * std::sqrt(static_cast<double>(k));
    den += std::pow(beta, k) * sd;
  }
  if (conv == RatioConvention::kFromZero) den += sd;
  const double r = num / den;
  return r * r;
}

Theorem4Check theorem4_check(const HierarchicalModel& w, std::span<const WeightVector> w_hat,
                             const RealFn& target, const Expectation& mu, double alpha, double C1,
                             double slack) {
  if (!(slack >= 0.0)) throw InvalidArgument("slack must be non-negative");
  const auto& L = w.shape.ladder;
  Theorem4Check out;
  out.factor = powerlaw_factor(alpha, L.beta(), C1, L.R());
  if (!(out.factor > 0.0)) {
    throw BoundInapplicable("power-law factor is " + std::to_string(out.factor) + " (must be positive)");
  }
  out.statistical = statistical_risk(w, target, mu).value;
  out.chained = chained_risk(w, w_hat, target, mu).total.value;
  out.slack = slack;
  out.lhs = out.factor * out.statistical;
  out.rhs = out.chained + slack;
  out.pass = out.lhs <= out.rhs;
  return out;
}

}  // namespace msent

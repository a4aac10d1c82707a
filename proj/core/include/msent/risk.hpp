#pragma once

// Population risk of hierarchical models under the power-law instance law,
// the chained risk against reference weights, and closed-form evaluators for
// the generalization bounds.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msent/heaviside.hpp"
#include "msent/scale_data.hpp"
#include "msent/trainer.hpp"

namespace msent {

struct RiskEstimate {
  double value = 0.0;
  /// Zero for deterministic rules.
  double std_error = 0.0;
  /// Set when adaptive quadrature ran out of budget and Monte Carlo was used.
  bool fell_back = false;
};

/// g(x, k) with k the scale of x, as known to the integration rule.
using ScaleFn = std::function<double(double, int)>;

/// Expectation operator of the instance law.
class Expectation {
 public:
  virtual ~Expectation() = default;
  /// E[1{X in X_k} g(X, k)]; k = 0 integrates over every scale.
  virtual RiskEstimate integrate(const ScaleFn& g, int k = 0) const = 0;
  virtual const ScaleLadder& ladder() const = 0;
  /// "quadrature", "monte-carlo" or "discrete".
  virtual std::string method() const = 0;
};

struct QuadratureOptions {
  std::size_t panels = 2048;
  /// When set, panels double until successive values agree within `tolerance`
  /// or `max_panels` is reached, at which point Monte Carlo takes over.
  bool adaptive = false;
  double tolerance = 1e-9;
  std::size_t max_panels = 1 << 16;
  std::size_t fallback_n_mc = 100000;
  std::uint64_t fallback_seed = 0;
};

/// Composite midpoint rule in CDF coordinates, per scale and per sign.
class QuadratureExpectation final : public Expectation {
 public:
  explicit QuadratureExpectation(PowerLaw law, QuadratureOptions opt = {});
  RiskEstimate integrate(const ScaleFn& g, int k = 0) const override;
  const ScaleLadder& ladder() const override { return law_.ladder(); }
  std::string method() const override { return "quadrature"; }
  const QuadratureOptions& options() const { return opt_; }

 private:
  double midpoint(const ScaleFn& g, int k, std::size_t panels) const;
  PowerLaw law_;
  QuadratureOptions opt_;
};

/// Sample mean over n draws from the evaluation substream of `seed`.
class MonteCarloExpectation final : public Expectation {
 public:
  MonteCarloExpectation(const PowerLaw& law, std::size_t n, std::uint64_t seed);
  RiskEstimate integrate(const ScaleFn& g, int k = 0) const override;
  const ScaleLadder& ladder() const override { return ladder_; }
  std::string method() const override { return "monte-carlo"; }
  std::size_t n() const { return x_.size(); }
  std::uint64_t seed() const { return seed_; }

 private:
  ScaleLadder ladder_;
  std::uint64_t seed_;
  std::vector<double> x_;
  std::vector<int> k_;
};

/// Finite measure sum_i p_i delta_{x_i} on the domain.
class DiscreteExpectation final : public Expectation {
 public:
  DiscreteExpectation(ScaleLadder ladder, std::vector<double> points, std::vector<double> probs);
  RiskEstimate integrate(const ScaleFn& g, int k = 0) const override;
  const ScaleLadder& ladder() const override { return ladder_; }
  std::string method() const override { return "discrete"; }

 private:
  ScaleLadder ladder_;
  std::vector<double> x_;
  std::vector<double> p_;
  std::vector<int> k_;
};

/// l_k(w_1^{k-1} v, x) = |gamma_k (I + net_v)(h_{k-1}(x / gamma_k)) - target(x)|
/// with h_{k-1} from `prefix`.
double level_loss_at(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                     const WeightVector& v, const RealFn& target, double x, int k);

/// L_mu(w) = E|model(X) - target(X)|.
RiskEstimate statistical_risk(const HierarchicalModel& model, const RealFn& target,
                              const Expectation& mu);

struct ChainedRisk {
  RiskEstimate total;
  /// E[l_k(w_1^k, X)] - E[l_k(w_1^{k-1} w_hat_k, X)] for k = 1..d.
  std::vector<RiskEstimate> per_level;
};

/// Throws StructuralError when w_hat does not fit the model's level specs.
ChainedRisk chained_risk(const HierarchicalModel& w, std::span<const WeightVector> w_hat,
                         const RealFn& target, const Expectation& mu);

/// Reference weights for a diffeomorphism target: eta-rounded Riemann networks
/// of every psi_k over its domain.
std::vector<WeightVector> reference_weights(const DiffeoBundle& b, const ModelTemplate& shape);

/// log|W_k| per level.
std::vector<double> log_sizes_of(std::span<const std::uint64_t> set_sizes);

struct Thm3Bound {
  /// sum_k 2 lbar_k sum_{m<=k} log|W_m| + rho_k^2 / (2 n lbar_k).
  double statement = 0.0;
  /// sum_k 2 lbar_k sum_{m<=k} log|W_m| + 8 gamma_k^2 rho_k^2 / (n lbar_k).
  double proof_form = 0.0;
};

/// `gamma` holds gamma_1..gamma_d.
Thm3Bound thm3_bound(const TemperatureSchedule& schedule, std::span<const double> log_sizes,
                     std::span<const double> rho, std::span<const double> gamma, std::size_t n);

/// (4 / sqrt n) sum_k gamma_k rho_k sqrt(sum_{m<=k} log|W_m|).
double cor2_bound(const ScaleLadder& ladder, std::span<const double> rho,
                  std::span<const double> log_sizes, std::size_t n);

/// Minimum over lbar of the proof form: (8 / sqrt n) sum_k gamma_k rho_k sqrt(...).
double proof_form_minimum(const ScaleLadder& ladder, std::span<const double> rho,
                          std::span<const double> log_sizes, std::size_t n);

/// 1 - beta^(1-alpha) (1 + C1 R (1 - 1/beta)). May be <= 0.
double powerlaw_factor(double alpha, double beta, double C1, double R);

/// cor2_bound / powerlaw_factor. Throws BoundInapplicable when the factor is
/// not positive.
double risk_bound(const ScaleLadder& ladder, std::span<const double> rho,
                  std::span<const double> log_sizes, std::size_t n, double alpha, double C1);

/// (sum_k rho_k) sqrt(sum_m log|W_m|) / sqrt n.
double erm_bound(std::span<const double> rho, std::span<const double> log_sizes, std::size_t n);

enum class RatioConvention {
  /// Denominator summed over k = 0..d.
  kFromZero,
  /// Both sums over k = 1..d.
  kFromOne,
};

/// (sum_{k=1}^d beta^(2k-d) sqrt k / sum_k beta^k sqrt d)^2, beta = R_bar^(1/d).
double lambda_ratio(double R_bar, int d, RatioConvention conv = RatioConvention::kFromZero);

struct Theorem4Check {
  double factor = 0.0;
  double statistical = 0.0;
  double chained = 0.0;
  double slack = 0.0;
  /// factor * L_mu(w).
  double lhs = 0.0;
  /// L^C_mu(w) + slack.
  double rhs = 0.0;
  double margin() const { return rhs - lhs; }
  bool pass = false;
};

/// Throws BoundInapplicable when the power-law factor is not positive.
Theorem4Check theorem4_check(const HierarchicalModel& w, std::span<const WeightVector> w_hat,
                             const RealFn& target, const Expectation& mu, double alpha, double C1,
                             double slack);

/// Everything the evaluate command reports. Bounds that do not apply carry
/// their reason instead of a value.
struct RiskReport {
  std::string method;
  std::size_t n_mc = 0;
  std::uint64_t eval_seed = 0;
  RiskEstimate statistical;
  ChainedRisk chained;
  Thm3Bound thm3;
  double cor2 = 0.0;
  double proof_form_min = 0.0;
  double powerlaw_factor = 0.0;
  std::optional<double> risk_bound;
  std::string risk_bound_error;
  double erm = 0.0;
  double lambda_ratio = 0.0;
  std::optional<Theorem4Check> theorem4;
  std::string theorem4_error;
};

}  // namespace msent

#pragma once

// Discretized two-layer Heaviside networks and the hierarchical model built
// from them.
//
// A level network of width tau evaluates
//   F(x; w) = sum_j w_j H(x - b_j) + w_c,   b_j = (-1 + 2j/tau) M1 R,
// with every weight an integer multiple of eta and |w|_1 <= rho. Levels are
// chained as near-identity maps h_k = h_{k-1} + F(h_{k-1}; w_k) starting from
// the linear base h_0(x) = c0 x, and an instance x in scale k is answered
// by gamma_k h_k(x / gamma_k), so only the first k levels ever run.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "msent/ladder.hpp"
#include "msent/scale_data.hpp"

namespace msent {

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

struct LevelSpec {
  int tau = 2;
  double eta = 0.1;
  double rho = 1.0;
  /// Breakpoint half-span M1 R.
  double span = 1.0;

  LevelSpec() = default;
  /// Throws InvalidArgument unless tau >= 1, eta > 0, rho >= 0, span > 0.
  LevelSpec(int tau, double eta, double rho, double span);

  /// b_j for j = 1..tau.
  double breakpoint(int j) const;
  std::vector<double> breakpoints() const;
  /// Largest integer r with r * eta <= rho.
  std::int64_t max_units() const;
  /// Number of weights, tau + 1.
  std::size_t dim() const { return static_cast<std::size_t>(tau) + 1; }

  bool operator==(const LevelSpec&) const = default;
};

/// Weights stored as integer multiples of eta, so the lattice constraint holds
/// by construction.
class WeightVector {
 public:
  WeightVector() = default;
  WeightVector(std::vector<std::int64_t> tap_units, std::int64_t constant_units, double eta);
  static WeightVector zeros(int tau, double eta);

  int tau() const { return static_cast<int>(taps_.size()); }
  double eta() const { return eta_; }
  double tap(int j) const { return static_cast<double>(taps_.at(static_cast<std::size_t>(j))) * eta_; }
  double constant() const { return static_cast<double>(constant_) * eta_; }
  const std::vector<std::int64_t>& tap_units() const { return taps_; }
  std::int64_t constant_units() const { return constant_; }
  std::int64_t l1_units() const;
  double l1() const { return static_cast<double>(l1_units()) * eta_; }
  /// Sum of |tap| only (the plateau variation of the network).
  double tap_l1() const;

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<std::int64_t> taps_;
  std::int64_t constant_ = 0;
  double eta_ = 1.0;
};

/// Undiscretized network weights.
struct ContinuousWeights {
  std::vector<double> taps;
  double constant = 0.0;
  double l1() const;
};

/// Throws StructuralError unless w has spec.tau taps and spec.eta.
void check_fits(const LevelSpec& spec, const WeightVector& w);
/// check_fits plus |w|_1 <= rho.
void check_member(const LevelSpec& spec, const WeightVector& w);

/// H is right-continuous: H(0) = 1.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

double heaviside_net_eval(const LevelSpec& spec, const WeightVector& w, double x);
double heaviside_net_eval(const LevelSpec& spec, const ContinuousWeights& w, double x);

/// Riemann-sum network for a function Psi with Psi(0) = 0 on `domain`:
/// w_j = 2 M1 R Psi'(b_j) / tau for b_j in the domain, else 0; w_c = Psi(a1).
ContinuousWeights riemann_network_from(const RealFn& psi_prime, double psi_at_a1,
                                       const Interval& domain, const LevelSpec& spec);

/// Nearest multiple of eta per coordinate, ties away from zero.
WeightVector discretize_weights(const ContinuousWeights& w, double eta);

using LevelWeightSet = std::vector<WeightVector>;

/// |{z in Z^dim : |z|_1 <= r}| = sum_k 2^k C(dim,k) C(r,k), saturating at
/// uint64 max.
std::uint64_t lattice_ball_count(std::size_t dim, std::int64_t r);

/// Every weight vector of the level in lexicographic order of
/// (w_1, ..., w_tau, w_c). Throws ResourceCapError when the count exceeds cap.
LevelWeightSet enumerate_weight_set(const LevelSpec& spec, std::size_t cap = kDefaultEnumerationCap);

/// rho_k = 3 M1 C1 R^2 beta^(k-d-1) (beta-1) + 4 M1^2 R^2 C2 / tau + (tau+1) eta / 2.
std::vector<double> rho_schedule(const ScaleLadder& ladder, double M1, double C1, double C2,
                                 int tau, double eta);

/// (tau+1) eta / 2 + 2 (M1 R)^2 phi2 / tau.
double approx_error_bound(int tau, double eta, double M1R, double phi2);

/// 3 M1 R phi1 + 4 (M1 R)^2 phi2 / tau + (tau+1) eta / 2.
double bounded_norm_bound(int tau, double eta, double M1R, double phi1, double phi2);

/// Ladder, base map and level specs: everything but the weights.
struct ModelTemplate {
  ScaleLadder ladder{1.0, 2.0, 1};
  double base_slope = 1.0;
  /// Optional f_[gamma_0] replacing c0 x. Not serialized.
  RealFn base_map;
  std::vector<LevelSpec> levels;

  double base(double x) const { return base_map ? base_map(x) : base_slope * x; }
  int d() const { return ladder.d(); }
  const LevelSpec& level(int k) const { return levels.at(static_cast<std::size_t>(k - 1)); }
};

/// Throws StructuralError when the template's level count differs from d.
void check_template(const ModelTemplate& t);

struct HierarchicalModel {
  ModelTemplate shape;
  std::vector<WeightVector> weights;
};

/// Validates the template and that every weight vector is a member of its level.
HierarchicalModel make_model(ModelTemplate shape, std::vector<WeightVector> weights);
HierarchicalModel zero_model(ModelTemplate shape);

struct EvalStats {
  std::size_t level_evals = 0;
};

/// h_k(x) from the first k weights of `prefix`.
double forward_prefix(const ModelTemplate& t, std::span<const WeightVector> prefix, int k, double x,
                      EvalStats* stats = nullptr);
double model_forward_level(const HierarchicalModel& m, int k, double x);

/// gamma_k h_k(x / gamma_k) with k = scale_of(x). Only k levels are evaluated.
double model_output(const HierarchicalModel& m, double x, EvalStats* stats = nullptr);
/// Same from a prefix; requires prefix.size() >= scale_of(x).
double prefix_output(const ModelTemplate& t, std::span<const WeightVector> prefix, double x,
                     EvalStats* stats = nullptr);

}  // namespace msent

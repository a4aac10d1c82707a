#pragma once

// Scale geometry of the instance domain, the power-law instance law and
// training datasets.
//
// The domain X = {eps <= |x| < R}, R = eps beta^d, is split into scales
// X_k = {eps beta^(k-1) <= |x| < eps beta^k}, k = 1..d, with matching
// dilation factors gamma_k = beta^(k-d).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "msent/ladder.hpp"

namespace msent {

class ScaleLadder {
 public:
  /// Throws InvalidArgument unless eps > 0, beta > 1, d >= 1.
  ScaleLadder(double epsilon, double beta, int d);

  double epsilon() const { return epsilon_; }
  double beta() const { return beta_; }
  int d() const { return d_; }
  double R() const { return R_; }
  double gamma(int k) const { return gamma_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& gammas() const { return gamma_; }
  /// Lower magnitude edge of scale k (edge(0) = eps, edge(d) = R).
  double edge(int k) const { return edges_.at(static_cast<std::size_t>(k)); }

  bool contains(double x) const;
  LadderSpec spec() const { return LadderSpec(gamma_); }

  bool operator==(const ScaleLadder& o) const {
    return epsilon_ == o.epsilon_ && beta_ == o.beta_ && d_ == o.d_;
  }

 private:
  double epsilon_;
  double beta_;
  int d_;
  double R_;
  std::vector<double> gamma_;
  std::vector<double> edges_;
};

ScaleLadder build_ladder(double epsilon, double beta, int d);

/// The unique k in 1..d with x in X_k. Throws DomainError outside X.
int scale_of(double x, const ScaleLadder& ladder);

/// Density q(x) = 1 / (C' |x|^alpha) on X, alpha >= 1.
class PowerLaw {
 public:
  PowerLaw(double alpha, ScaleLadder ladder);

  double alpha() const { return alpha_; }
  const ScaleLadder& ladder() const { return ladder_; }
  double normalizer() const { return normalizer_; }
  double density(double x) const;

  /// P(|X| < r) for r in [eps, R].
  double magnitude_cdf(double r) const;
  /// Inverse of magnitude_cdf on [0, 1].
  double magnitude_quantile(double u) const;

 private:
  double alpha_;
  ScaleLadder ladder_;
  double normalizer_;
};

/// P(X in X_k), analytic.
double scale_mass(const PowerLaw& law, int k);

/// n i.i.d. draws: uniform sign, magnitude by inverse CDF. Uses the sampling
/// substream of `seed`.
std::vector<double> sample_power_law(const PowerLaw& law, std::size_t n, std::uint64_t seed);

/// max over grid of |q(x/beta) - beta^alpha q(x)| / q(x), x in [eps beta, R).
double scale_invariance_check(const PowerLaw& law, std::size_t grid_n);

enum class TargetMode { kTanhTarget, kPlantedTeacher };

std::string to_string(TargetMode m);
TargetMode target_mode_from_string(const std::string& s);

struct Dataset {
  std::vector<double> instances;
  std::vector<double> labels;
  std::uint64_t seed = 0;
  TargetMode mode = TargetMode::kTanhTarget;
  double alpha = 1.0;
  ScaleLadder ladder{1.0, 2.0, 1};

  std::size_t n() const { return instances.size(); }
};

/// Instances from sample_power_law, labels y_i = target(x_i).
Dataset generate_dataset(const RealFn& target, TargetMode mode, const PowerLaw& law,
                         std::size_t n, std::uint64_t seed);
Dataset generate_dataset(const DiffeoBundle& target, const PowerLaw& law, std::size_t n,
                         std::uint64_t seed);

/// CSV with header "x,y" (17 significant digits) plus a JSON manifest with
/// alpha, epsilon, beta, d, n, seed and mode.
void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                  const std::filesystem::path& manifest_path);
Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& manifest_path);

}  // namespace msent

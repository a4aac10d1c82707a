#pragma once

// Multiscale entropic training: level k's weights are drawn from the Gibbs
// measure exp(-l_k / lambda_k) over the enumerated weight set W_k, given the
// already sampled prefix w_1..w_{k-1}. Here l_k is the empirical absolute
// loss on the samples of scale k, normalized by the total sample count n.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msent/entropy.hpp"
#include "msent/heaviside.hpp"
#include "msent/scale_data.hpp"

namespace msent {

/// lambda_bar_k = lambda_k - lambda_{k+1} > 0 with lambda_{d+1} = 0.
class TemperatureSchedule {
 public:
  /// Builds cumulative temperatures by suffix sums. Throws InvalidArgument on
  /// any non-positive increment.
  static TemperatureSchedule from_increments(std::vector<double> lambda_bar);

  int d() const { return static_cast<int>(lambda_bar_.size()); }
  /// 1-based.
  double lambda_bar(int k) const { return lambda_bar_.at(static_cast<std::size_t>(k - 1)); }
  double lambda(int k) const { return lambda_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<double>& increments() const { return lambda_bar_; }
  const std::vector<double>& cumulative() const { return lambda_; }

 private:
  std::vector<double> lambda_bar_;
  std::vector<double> lambda_;
};

/// lambda_bar_k = 2 gamma_k rho_k / sqrt(n sum_{m<=k} log|W_m|).
TemperatureSchedule lambda_schedule(const ScaleLadder& ladder, std::span<const double> rho,
                                    std::size_t n, std::span<const std::uint64_t> set_sizes);

/// (1/n) sum over samples in X_k of |gamma_k h_k(x/gamma_k) - y|, where
/// k = prefix.size().
double level_empirical_loss(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                            const Dataset& ds);

/// l_k(w_1^{k-1} w', s) for every w' in `candidates`, in enumeration order.
/// `prefix` holds w_1..w_{k-1}.
std::vector<double> candidate_losses(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                                     const Dataset& ds, const LevelWeightSet& candidates);

/// Kolmogorov mean of the candidate losses at lambda_k.
double kolmogorov_level_loss(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                             const Dataset& ds, double lambda_k, const LevelWeightSet& candidates);

/// Gibbs distribution over W_k (labels are enumeration indices).
DiscreteDistribution gibbs_level_distribution(const ModelTemplate& shape,
                                              std::span<const WeightVector> prefix,
                                              const Dataset& ds, double lambda_k,
                                              const LevelWeightSet& candidates);

struct TrainConfig {
  ModelTemplate shape;
  std::vector<LevelWeightSet> sets;
  TemperatureSchedule schedule;

  std::vector<std::uint64_t> set_sizes() const;
};

/// Enumerates every level's weight set (each under `cap`).
std::vector<LevelWeightSet> enumerate_all(const ModelTemplate& shape,
                                          std::size_t cap = kDefaultEnumerationCap);

struct LevelTrace {
  int k = 0;
  double lambda = 0.0;
  double log_partition = 0.0;
  std::size_t chosen = 0;
  double chosen_loss = 0.0;
  double min_loss = 0.0;
  std::size_t set_size = 0;
  /// Gibbs probabilities in enumeration order (not serialized).
  std::vector<double> probs;
};

struct TrainState {
  std::uint64_t seed = 0;
  std::vector<WeightVector> sampled;
  std::vector<LevelTrace> levels;

  int trained_levels() const { return static_cast<int>(sampled.size()); }
};

struct TrainResult {
  /// Untrained levels (after stop_after) hold zero weights.
  HierarchicalModel model;
  TrainState state;
};

/// Samples w_1, then w_2 | w_1, ... up to min(d, stop_after). Level k draws
/// one uniform from the training substream (seed, k), so the result is
/// prefix-stable: stopping at k and resuming from the returned state yields
/// the same model as an uninterrupted run.
TrainResult train_multiscale_entropic(const TrainConfig& cfg, const Dataset& ds, std::uint64_t seed,
                                      std::optional<int> stop_after = std::nullopt,
                                      const TrainState* resume = nullptr);

/// Index drawn by inverse CDF over `probs` for uniform u in [0, 1).
std::size_t sample_index(std::span<const double> probs, double u);

enum class ErmMode { kGreedy, kGlobal };

inline constexpr std::uint64_t kGlobalErmCap = 10'000'000;

/// Greedy: argmin of l_k level by level. Global: argmin of sum_k l_k over the
/// product set. Ties go to the first vector in enumeration order.
HierarchicalModel train_erm(const TrainConfig& cfg, const Dataset& ds, ErmMode mode,
                            std::uint64_t global_cap = kGlobalErmCap);

/// Joint distribution over W_1 x ... x W_d induced by the sequential Gibbs
/// kernels.
ProductDistribution gibbs_joint(const TrainConfig& cfg, const Dataset& ds);

inline constexpr std::size_t kObjectiveAtomCap = 10'000;

/// E_P[sum_k (l_k - lbar_k)] - sum_k (lambda_k - lambda_{k+1}) H(W_1^k),
/// with lbar_k the Kolmogorov level loss.
double multiscale_objective(const ProductDistribution& p, const TrainConfig& cfg, const Dataset& ds);

/// sum_k lambda_k D(P_{W_k|W_1^{k-1}} || P*_{W_k|W_1^{k-1}} | P_{W_1^{k-1}}).
double gibbs_divergence_sum(const ProductDistribution& p, const TrainConfig& cfg, const Dataset& ds);

struct CongruencyReport {
  std::size_t trials = 0;
  /// max over trials of |(L(P)-R(P)) - (L(P0)-R(P0))|.
  double max_gap = 0.0;
  /// L(P0) - R(P0) for the reference P0 = P*.
  double offset = 0.0;
  /// -sum_k lambda_k log|W_k|, the offset predicted in closed form.
  double predicted_offset = 0.0;
  double objective_at_gibbs = 0.0;
  /// min over trials of L(P) - L(P*); non-negative when P* is the minimizer.
  double min_excess = 0.0;
};

CongruencyReport congruency_gap(const TrainConfig& cfg, const Dataset& ds, std::size_t trials,
                                std::uint64_t seed);

}  // namespace msent

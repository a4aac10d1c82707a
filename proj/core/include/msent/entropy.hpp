#pragma once

// Finite-support distributions and the information measures built on them.
// All logarithms are natural; divergences that are infinite are returned as
// +infinity rather than raised, so that bound formulas can propagate them.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace msent {

using Label = std::string;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance on sum(probs) == 1.
inline constexpr double kNormTolerance = 1e-12;

class DiscreteDistribution {
 public:
  /// Validates non-negativity, unit mass (within kNormTolerance) and label
  /// uniqueness. Throws InvalidArgument otherwise.
  DiscreteDistribution(std::vector<Label> support, std::vector<double> probs);

  static DiscreteDistribution uniform(std::vector<Label> support);
  static DiscreteDistribution dirac(std::vector<Label> support, std::size_t at);
  /// Support labels "0", "1", ..., "n-1".
  static DiscreteDistribution over_indices(std::vector<double> probs);
  /// Normalizes non-negative weights before validation.
  static DiscreteDistribution from_weights(std::vector<Label> support,
                                           std::vector<double> weights);

  const std::vector<Label>& support() const { return support_; }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::size_t size() const { return probs_.size(); }

  /// Throws InvalidArgument when the label is absent.
  std::size_t index_of(const Label& label) const;
  bool same_support(const DiscreteDistribution& other) const;

 private:
  std::vector<Label> support_;
  std::vector<double> probs_;
};

std::vector<Label> index_labels(std::size_t n);

/// Kernel P_{Y|X}: one row per conditioning label, all rows over one support.
class ConditionalDistribution {
 public:
  ConditionalDistribution(std::vector<Label> given_support,
                          std::vector<DiscreteDistribution> rows);

  const std::vector<Label>& given_support() const { return given_; }
  const std::vector<DiscreteDistribution>& rows() const { return rows_; }
  const DiscreteDistribution& row(std::size_t i) const { return rows_[i]; }
  const std::vector<Label>& output_support() const { return rows_.front().support(); }

 private:
  std::vector<Label> given_;
  std::vector<DiscreteDistribution> rows_;
};

/// Joint distribution over a product of index sets [0,n_1) x ... x [0,n_d),
/// stored row-major (last coordinate fastest).
class ProductDistribution {
 public:
  ProductDistribution(std::vector<std::size_t> dims, std::vector<double> probs);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t atoms() const { return probs_.size(); }

  /// Decodes a flat index into per-coordinate indices.
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const std::size_t> coords) const;

  /// Law of the first k coordinates (k in 1..rank).
  ProductDistribution prefix_marginal(std::size_t k) const;

  /// Kernel of coordinate k (1-based) given coordinates 1..k-1. Rows of
  /// prefixes with zero mass are set to uniform; they never contribute
  /// to a conditional divergence.
  ConditionalDistribution conditional(std::size_t k) const;

  /// Flat view with labels "i1,i2,...".
  DiscreteDistribution flat() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> probs_;
};

double entropy(const DiscreteDistribution& p);
double entropy(std::span<const double> probs);

/// D(P||Q); +inf when P is not absolutely continuous w.r.t. Q.
/// Throws StructuralError on mismatched supports.
double relative_entropy(const DiscreteDistribution& p, const DiscreteDistribution& q);
double relative_entropy(std::span<const double> p, std::span<const double> q);

/// D(P_{Y|X} || Q_{Y|X} | P_X). Rows with P_X(x) = 0 contribute nothing.
double conditional_relative_entropy(const ConditionalDistribution& p,
                                    const ConditionalDistribution& q,
                                    const DiscreteDistribution& px);

/// (P)^lambda, probabilities proportional to p^lambda. lambda = 0 yields the
/// uniform distribution over the full declared support.
DiscreteDistribution scaled_distribution(const DiscreteDistribution& p, double lambda);

/// (P, Q)^lambda, probabilities proportional to p^lambda q^(1-lambda).
DiscreteDistribution tilted_distribution(const DiscreteDistribution& p,
                                         const DiscreteDistribution& q, double lambda);

/// Renyi divergence of order lambda > 0; lambda == 1 is D(P||Q).
double renyi_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q,
                        double lambda);

/// log sum exp(v) evaluated with a max shift.
double log_sum_exp(std::span<const double> values);

/// Probabilities proportional to exp(-energy/lambda), max-shifted.
std::vector<double> gibbs_probabilities(std::span<const double> energies, double lambda);

DiscreteDistribution gibbs_measure(std::vector<Label> support,
                                   std::span<const double> energies, double lambda);

/// -lambda log((1/N) sum exp(-z_j/lambda)).
double kolmogorov_mean(std::span<const double> z, double lambda);

}  // namespace msent

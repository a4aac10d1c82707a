#include "msent/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "msent/errors.hpp"

namespace msent {

namespace {

void require_same_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (!p.same_support(q)) {
    throw StructuralError("distributions are defined over different supports");
  }
}

double checked_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidArgument("probability weights must be finite and non-negative");
    }
    s += x;
  }
  return s;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<Label> support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.size() != probs_.size()) {
    throw InvalidArgument("support and probability vectors differ in length");
  }
  if (support_.empty()) throw InvalidArgument("empty support");
  const double total = checked_sum(probs_);
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw InvalidArgument("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(support_.size());
  for (const auto& l : support_) {
    if (!seen.insert(l).second) throw InvalidArgument("duplicate support label '" + l + "'");
  }
}

DiscreteDistribution DiscreteDistribution::uniform(std::vector<Label> support) {
  const std::size_t n = support.size();
  if (n == 0) throw InvalidArgument("empty support");
  return DiscreteDistribution(std::move(support), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteDistribution DiscreteDistribution::dirac(std::vector<Label> support, std::size_t at) {
  if (at >= support.size()) throw InvalidArgument("dirac index outside support");
  std::vector<double> p(support.size(), 0.0);
  p[at] = 1.0;
  return DiscreteDistribution(std::move(support), std::move(p));
}

DiscreteDistribution DiscreteDistribution::over_indices(std::vector<double> probs) {
  auto labels = index_labels(probs.size());
  return DiscreteDistribution(std::move(labels), std::move(probs));
}

DiscreteDistribution DiscreteDistribution::from_weights(std::vector<Label> support,
                                                        std::vector<double> weights) {
  const double total = checked_sum(weights);
  if (!(total > 0.0)) throw InvalidArgument("weights sum to zero");
  for (double& w : weights) w /= total;
  return DiscreteDistribution(std::move(support), std::move(weights));
}

std::size_t DiscreteDistribution::index_of(const Label& label) const {
  auto it = std::find(support_.begin(), support_.end(), label);
  if (it == support_.end()) throw InvalidArgument("label '" + label + "' not in support");
  return static_cast<std::size_t>(it - support_.begin());
}

bool DiscreteDistribution::same_support(const DiscreteDistribution& other) const {
  return support_ == other.support_;
}

std::vector<Label> index_labels(std::size_t n) {
  std::vector<Label> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

ConditionalDistribution::ConditionalDistribution(std::vector<Label> given_support,
                                                 std::vector<DiscreteDistribution> rows)
    : given_(std::move(given_support)), rows_(std::move(rows)) {
  if (given_.size() != rows_.size()) {
    throw InvalidArgument("one row per conditioning label is required");
  }
  if (rows_.empty()) throw InvalidArgument("empty conditioning support");
  for (const auto& r : rows_) {
    if (!r.same_support(rows_.front())) {
      throw StructuralError("conditional rows do not share an output support");
    }
  }
}

ProductDistribution::ProductDistribution(std::vector<std::size_t> dims, std::vector<double> probs)
    : dims_(std::move(dims)), probs_(std::move(probs)) {
  if (dims_.empty()) throw InvalidArgument("product distribution needs at least one coordinate");
  std::size_t atoms = 1;
  for (auto n : dims_) {
    if (n == 0) throw InvalidArgument("empty coordinate set");
    atoms *= n;
  }
  if (atoms != probs_.size()) throw InvalidArgument("probability vector does not match dims");
  if (std::abs(checked_sum(probs_) - 1.0) > kNormTolerance) {
    throw InvalidArgument("joint probabilities do not sum to 1");
  }
}

std::vector<std::size_t> ProductDistribution::unflatten(std::size_t flat) const {
  std::vector<std::size_t> c(dims_.size());
  for (std::size_t i = dims_.size(); i-- > 0;) {
    c[i] = flat % dims_[i];
    flat /= dims_[i];
  }
  return c;
}

std::size_t ProductDistribution::flatten(std::span<const std::size_t> coords) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) flat = flat * dims_[i] + coords[i];
  return flat;
}

ProductDistribution ProductDistribution::prefix_marginal(std::size_t k) const {
  if (k == 0 || k > dims_.size()) throw InvalidArgument("marginal rank out of range");
  std::size_t tail = 1;
  for (std::size_t i = k; i < dims_.size(); ++i) tail *= dims_[i];
  std::vector<double> m(probs_.size() / tail, 0.0);
  for (std::size_t i = 0; i < probs_.size(); ++i) m[i / tail] += probs_[i];
  return ProductDistribution(std::vector<std::size_t>(dims_.begin(), dims_.begin() + k), std::move(m));
}

ConditionalDistribution ProductDistribution::conditional(std::size_t k) const {
  if (k == 0 || k > dims_.size()) throw InvalidArgument("conditional coordinate out of range");
  const auto joint = prefix_marginal(k);
  const std::size_t width = dims_[k - 1];
  const std::size_t prefixes = joint.atoms() / width;
  const auto out_labels = index_labels(width);
  std::vector<Label> given;
  std::vector<DiscreteDistribution> rows;
  given.reserve(prefixes);
  rows.reserve(prefixes);
  for (std::size_t r = 0; r < prefixes; ++r) {
    given.push_back(k == 1 ? Label("()") : std::to_string(r));
    std::vector<double> row(joint.probs().begin() + static_cast<std::ptrdiff_t>(r * width),
                            joint.probs().begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
    const double mass = std::accumulate(row.begin(), row.end(), 0.0);
    if (mass > 0.0) {
      rows.push_back(DiscreteDistribution::from_weights(out_labels, std::move(row)));
    } else {
      rows.push_back(DiscreteDistribution::uniform(out_labels));
    }
  }
  return ConditionalDistribution(std::move(given), std::move(rows));
}

DiscreteDistribution ProductDistribution::flat() const {
  std::vector<Label> labels;
  labels.reserve(probs_.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const auto c = unflatten(i);
    std::string s;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j) s += ',';
      s += std::to_string(c[j]);
    }
    labels.push_back(std::move(s));
  }
  return DiscreteDistribution(std::move(labels), probs_);
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double entropy(const DiscreteDistribution& p) { return entropy(p.probs()); }

double relative_entropy(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw StructuralError("distributions differ in support size");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(d, 0.0);
}

double relative_entropy(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require_same_support(p, q);
  return relative_entropy(p.probs(), q.probs());
}

double conditional_relative_entropy(const ConditionalDistribution& p,
                                    const ConditionalDistribution& q,
                                    const DiscreteDistribution& px) {
  if (p.given_support() != q.given_support() || p.given_support() != px.support()) {
    throw StructuralError("conditioning supports differ");
  }
  if (p.output_support() != q.output_support()) {
    throw StructuralError("conditional output supports differ");
  }
  double d = 0.0;
  for (std::size_t x = 0; x < px.size(); ++x) {
    if (px[x] == 0.0) continue;
    const double row = relative_entropy(p.row(x).probs(), q.row(x).probs());
    if (std::isinf(row)) return kInf;
    d += px[x] * row;
  }
  return d;
}

DiscreteDistribution scaled_distribution(const DiscreteDistribution& p, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("scaling exponent must lie in [0,1]");
  if (lambda == 0.0) return DiscreteDistribution::uniform(p.support());
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = p[i] > 0.0 ? std::pow(p[i], lambda) : 0.0;
  return DiscreteDistribution::from_weights(p.support(), std::move(w));
}

DiscreteDistribution tilted_distribution(const DiscreteDistribution& p,
                                         const DiscreteDistribution& q, double lambda) {
  require_same_support(p, q);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("tilt parameter must lie in [0,1]");
  std::vector<double> w(p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    w[i] = std::pow(p[i], lambda) * std::pow(q[i], 1.0 - lambda);
    total += w[i];
  }
  if (!(total > 0.0)) throw DegenerateTilt("geometric mixture vanishes on the whole support");
  return DiscreteDistribution::from_weights(p.support(), std::move(w));
}

double renyi_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q,
                        double lambda) {
  require_same_support(p, q);
  if (!(lambda > 0.0)) throw InvalidArgument("Renyi order must be positive");
  if (lambda == 1.0) return relative_entropy(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      if (lambda > 1.0) return kInf;
      continue;
    }
    s += std::exp(lambda * std::log(p[i]) + (1.0 - lambda) * std::log(q[i]));
  }
  if (s == 0.0) return kInf;
  return std::max(std::log(s) / (lambda - 1.0), 0.0);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("log-sum-exp of an empty vector");
  const double m = *std::max_element(values.begin(), values.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

std::vector<double> gibbs_probabilities(std::span<const double> energies, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("Gibbs temperature must be positive");
  if (energies.empty()) throw InvalidArgument("Gibbs measure over an empty set");
  const double lo = *std::min_element(energies.begin(), energies.end());
  std::vector<double> w(energies.size());
  double total = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    w[i] = std::exp(-(energies[i] - lo) / lambda);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

DiscreteDistribution gibbs_measure(std::vector<Label> support, std::span<const double> energies,
                                   double lambda) {
  if (support.size() != energies.size()) throw InvalidArgument("one energy per label is required");
  auto p = gibbs_probabilities(energies, lambda);
  return DiscreteDistribution(std::move(support), std::move(p));
}

double kolmogorov_mean(std::span<const double> z, double lambda) {
  if (z.empty()) throw InvalidArgument("Kolmogorov mean of an empty vector");
  if (!(lambda > 0.0)) throw InvalidArgument("Kolmogorov mean parameter must be positive");
  const double lo = *std::min_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(-(v - lo) / lambda);
  return lo - lambda * std::log(s / static_cast<double>(z.size()));
}

}  // namespace msent

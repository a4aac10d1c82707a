#include "msent/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "msent/errors.hpp"
#include "msent/rng.hpp"

namespace msent {

TemperatureSchedule TemperatureSchedule::from_increments(std::vector<double> lambda_bar) {
  if (lambda_bar.empty()) throw InvalidArgument("temperature schedule needs at least one level");
  for (double v : lambda_bar) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("temperature increments must be positive");
  }
  TemperatureSchedule s;
  s.lambda_bar_ = std::move(lambda_bar);
  s.lambda_.assign(s.lambda_bar_.size(), 0.0);
  double acc = 0.0;
  for (std::size_t k = s.lambda_bar_.size(); k-- > 0;) {
    acc += s.lambda_bar_[k];
    s.lambda_[k] = acc;
  }
  return s;
}

TemperatureSchedule lambda_schedule(const ScaleLadder& ladder, std::span<const double> rho,
                                    std::size_t n, std::span<const std::uint64_t> set_sizes) {
  const auto d = static_cast<std::size_t>(ladder.d());
  if (rho.size() != d || set_sizes.size() != d) throw StructuralError("rho and set sizes need one entry per level");
  if (n == 0) throw InvalidArgument("lambda schedule needs n >= 1");
  std::vector<double> bar(d);
  double log_sum = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    if (set_sizes[k] < 2) throw InvalidArgument("every weight set needs |W_k| >= 2");
    log_sum += std::log(static_cast<double>(set_sizes[k]));
    bar[k] = 2.0 * ladder.gamma(static_cast<int>(k) + 1) * rho[k] /
             std::sqrt(static_cast<double>(n) * log_sum);
  }
  return TemperatureSchedule::from_increments(std::move(bar));
}

namespace {

void check_dataset(const ModelTemplate& shape, const Dataset& ds) {
  if (ds.n() == 0) throw InvalidArgument("empty dataset");
  if (!(ds.ladder == shape.ladder)) throw StructuralError("dataset and model use different ladders");
}

/// Samples of scale k with their level-(k-1) activations.
struct LevelSlice {
  double gamma = 1.0;
  std::vector<double> activation;  // h_{k-1}(x_i / gamma_k)
  std::vector<double> label;
};

LevelSlice slice_level(const ModelTemplate& shape, std::span<const WeightVector> prefix, int k,
                       const Dataset& ds) {
  LevelSlice s;
  s.gamma = shape.ladder.gamma(k);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double x = ds.instances[i];
    if (scale_of(x, shape.ladder) != k) continue;
    s.activation.push_back(forward_prefix(shape, prefix, k - 1, x / s.gamma));
    s.label.push_back(ds.labels[i]);
  }
  return s;
}

double slice_loss(const LevelSlice& s, const LevelSpec& spec, const WeightVector& w, double n) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.activation.size(); ++i) {
    const double h = s.activation[i];
    total += std::abs(s.gamma * (h + heaviside_net_eval(spec, w, h)) - s.label[i]);
  }
  return total / n;
}

void check_prefix(const ModelTemplate& shape, std::span<const WeightVector> prefix) {
  check_template(shape);
  if (static_cast<int>(prefix.size()) > shape.d()) throw StructuralError("prefix longer than the model");
  for (std::size_t j = 0; j < prefix.size(); ++j) check_fits(shape.levels[j], prefix[j]);
}

}  // namespace

double level_empirical_loss(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                            const Dataset& ds) {
  check_prefix(shape, prefix);
  check_dataset(shape, ds);
  const int k = static_cast<int>(prefix.size());
  if (k == 0) throw StructuralError("level loss needs a non-empty prefix");
  const auto slice = slice_level(shape, prefix, k, ds);
  return slice_loss(slice, shape.level(k), prefix.back(), static_cast<double>(ds.n()));
}

std::vector<double> candidate_losses(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                                     const Dataset& ds, const LevelWeightSet& candidates) {
  check_prefix(shape, prefix);
  check_dataset(shape, ds);
  const int k = static_cast<int>(prefix.size()) + 1;
  if (k > shape.d()) throw StructuralError("prefix already covers every level");
  if (candidates.empty()) throw InvalidArgument("empty weight set");
  const auto& spec = shape.level(k);
  const auto slice = slice_level(shape, prefix, k, ds);
  // Breakpoint pattern per sample is shared by every candidate.
  const std::size_t m = slice.activation.size();
  const auto tau = static_cast<std::size_t>(spec.tau);
  std::vector<unsigned char> on(m * tau);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < tau; ++j) {
      on[i * tau + j] = slice.activation[i] >= spec.breakpoint(static_cast<int>(j) + 1) ? 1 : 0;
    }
  }
  const double n = static_cast<double>(ds.n());
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& w : candidates) {
    check_fits(spec, w);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double net = w.constant();
      for (std::size_t j = 0; j < tau; ++j) {
        if (on[i * tau + j]) net += w.tap(static_cast<int>(j));
      }
      total += std::abs(slice.gamma * (slice.activation[i] + net) - slice.label[i]);
    }
    out.push_back(total / n);
  }
  return out;
}

double kolmogorov_level_loss(const ModelTemplate& shape, std::span<const WeightVector> prefix,
                             const Dataset& ds, double lambda_k, const LevelWeightSet& candidates) {
  if (!(lambda_k > 0.0)) throw InvalidArgument("temperature must be positive");
  const auto losses = candidate_losses(shape, prefix, ds, candidates);
  return kolmogorov_mean(losses, lambda_k);
}

DiscreteDistribution gibbs_level_distribution(const ModelTemplate& shape,
                                              std::span<const WeightVector> prefix,
                                              const Dataset& ds, double lambda_k,
                                              const LevelWeightSet& candidates) {
  const auto losses = candidate_losses(shape, prefix, ds, candidates);
  return gibbs_measure(index_labels(losses.size()), losses, lambda_k);
}

std::vector<std::uint64_t> TrainConfig::set_sizes() const {
  std::vector<std::uint64_t> s;
  for (const auto& w : sets) s.push_back(w.size());
  return s;
}

std::vector<LevelWeightSet> enumerate_all(const ModelTemplate& shape, std::size_t cap) {
  check_template(shape);
  std::vector<LevelWeightSet> sets;
  for (int k = 1; k <= shape.d(); ++k) {
    try {
      sets.push_back(enumerate_weight_set(shape.level(k), cap));
    } catch (const ResourceCapError& e) {
      throw ResourceCapError("level " + std::to_string(k) + ": " + e.what());
    }
  }
  return sets;
}

std::size_t sample_index(std::span<const double> probs, double u) {
  if (probs.empty()) throw InvalidArgument("cannot sample from an empty distribution");
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = i;
    cum += probs[i];
    if (u < cum) return i;
  }
  // Only reached when rounding leaves the total just below u.
  return last_positive;
}

namespace {

void check_config(const TrainConfig& cfg) {
  check_template(cfg.shape);
  const auto d = static_cast<std::size_t>(cfg.shape.d());
  if (cfg.sets.size() != d) throw StructuralError("one weight set per level is required");
  if (cfg.schedule.d() != cfg.shape.d()) throw StructuralError("temperature schedule length differs from d");
  for (const auto& s : cfg.sets) {
    if (s.empty()) throw InvalidArgument("empty weight set");
  }
}

}  // namespace

TrainResult train_multiscale_entropic(const TrainConfig& cfg, const Dataset& ds, std::uint64_t seed,
                                      std::optional<int> stop_after, const TrainState* resume) {
  check_config(cfg);
  check_dataset(cfg.shape, ds);
  const int d = cfg.shape.d();
  const int last = stop_after ? std::clamp(*stop_after, 0, d) : d;

  TrainState state;
  state.seed = seed;
  if (resume) {
    if (resume->seed != seed) throw InvalidArgument("resume state was produced with a different seed");
    if (resume->trained_levels() > d) throw StructuralError("resume state has more levels than the model");
    state = *resume;
  }
  for (int k = state.trained_levels() + 1; k <= last; ++k) {
    const auto& set = cfg.sets[static_cast<std::size_t>(k - 1)];
    const double lambda = cfg.schedule.lambda(k);
    const auto losses = candidate_losses(cfg.shape, state.sampled, ds, set);
    LevelTrace tr;
    tr.k = k;
    tr.lambda = lambda;
    tr.set_size = set.size();
    tr.min_loss = *std::min_element(losses.begin(), losses.end());
    std::vector<double> scaled(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i) scaled[i] = -losses[i] / lambda;
    tr.log_partition = log_sum_exp(scaled);
    tr.probs = gibbs_probabilities(losses, lambda);
    Rng rng(seed, Stream::kTraining, static_cast<std::uint64_t>(k));
    tr.chosen = sample_index(tr.probs, rng.uniform());
    tr.chosen_loss = losses[tr.chosen];
    state.sampled.push_back(set[tr.chosen]);
    state.levels.push_back(std::move(tr));
  }

  std::vector<WeightVector> weights = state.sampled;
  for (int k = state.trained_levels() + 1; k <= d; ++k) {
    const auto& spec = cfg.shape.level(k);
    weights.push_back(WeightVector::zeros(spec.tau, spec.eta));
  }
  return TrainResult{HierarchicalModel{cfg.shape, std::move(weights)}, std::move(state)};
}

HierarchicalModel train_erm(const TrainConfig& cfg, const Dataset& ds, ErmMode mode,
                            std::uint64_t global_cap) {
  check_config(cfg);
  check_dataset(cfg.shape, ds);
  const int d = cfg.shape.d();
  if (mode == ErmMode::kGreedy) {
    std::vector<WeightVector> chosen;
    for (int k = 1; k <= d; ++k) {
      const auto& set = cfg.sets[static_cast<std::size_t>(k - 1)];
      const auto losses = candidate_losses(cfg.shape, chosen, ds, set);
      const auto best = std::min_element(losses.begin(), losses.end()) - losses.begin();
      chosen.push_back(set[static_cast<std::size_t>(best)]);
    }
    return HierarchicalModel{cfg.shape, std::move(chosen)};
  }

  unsigned __int128 product = 1;
  for (const auto& s : cfg.sets) {
    product *= s.size();
    if (product > global_cap) {
      throw ResourceCapError("global ERM product set exceeds the cap of " + std::to_string(global_cap));
    }
  }

  // Depth-first search over the product set. Each sample carries its running
  // activation h_j(x / gamma_s) along the path, s being the sample's scale.
  const auto& ladder = cfg.shape.ladder;
  const std::size_t n = ds.n();
  std::vector<int> scale(n);
  std::vector<double> start(n);
  for (std::size_t i = 0; i < n; ++i) {
    scale[i] = scale_of(ds.instances[i], ladder);
    start[i] = cfg.shape.base(ds.instances[i] / ladder.gamma(scale[i]));
  }
  std::vector<std::size_t> path(static_cast<std::size_t>(d)), best_path(path.size());
  double best = std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(n);

  std::function<void(int, const std::vector<double>&, double)> dfs =
      [&](int k, const std::vector<double>& act, double acc) {
        if (k > d) {
          if (acc < best) {
            best = acc;
            best_path = path;
          }
          return;
        }
        const auto& spec = cfg.shape.level(k);
        const auto& set = cfg.sets[static_cast<std::size_t>(k - 1)];
        std::vector<double> next(n);
        for (std::size_t c = 0; c < set.size(); ++c) {
          double loss = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            if (scale[i] < k) continue;
            next[i] = act[i] + heaviside_net_eval(spec, set[c], act[i]);
            if (scale[i] == k) loss += std::abs(ladder.gamma(k) * next[i] - ds.labels[i]);
          }
          path[static_cast<std::size_t>(k - 1)] = c;
          dfs(k + 1, next, acc + loss / nn);
        }
      };
  dfs(1, start, 0.0);

  std::vector<WeightVector> chosen;
  for (int k = 1; k <= d; ++k) {
    chosen.push_back(cfg.sets[static_cast<std::size_t>(k - 1)][best_path[static_cast<std::size_t>(k - 1)]]);
  }
  return HierarchicalModel{cfg.shape, std::move(chosen)};
}

namespace {

std::size_t product_atoms(const TrainConfig& cfg) {
  std::size_t atoms = 1;
  for (const auto& s : cfg.sets) {
    atoms *= s.size();
    if (atoms > kObjectiveAtomCap) {
      throw ResourceCapError("joint weight distribution exceeds " + std::to_string(kObjectiveAtomCap) +
                             " atoms");
    }
  }
  return atoms;
}

std::vector<std::size_t> set_dims(const TrainConfig& cfg) {
  std::vector<std::size_t> dims;
  for (const auto& s : cfg.sets) dims.push_back(s.size());
  return dims;
}

/// Per level k, per prefix (flat index over W_1..W_{k-1}): candidate losses.
std::vector<std::vector<std::vector<double>>> all_candidate_losses(const TrainConfig& cfg,
                                                                   const Dataset& ds) {
  const int d = cfg.shape.d();
  std::vector<std::vector<std::vector<double>>> out(static_cast<std::size_t>(d));
  std::vector<std::vector<WeightVector>> prefixes{{}};
  for (int k = 1; k <= d; ++k) {
    const auto& set = cfg.sets[static_cast<std::size_t>(k - 1)];
    std::vector<std::vector<WeightVector>> grown;
    for (const auto& p : prefixes) {
      out[static_cast<std::size_t>(k - 1)].push_back(candidate_losses(cfg.shape, p, ds, set));
      for (const auto& w : set) {
        auto q = p;
        q.push_back(w);
        grown.push_back(std::move(q));
      }
    }
    prefixes = std::move(grown);
  }
  return out;
}

}  // namespace

ProductDistribution gibbs_joint(const TrainConfig& cfg, const Dataset& ds) {
  check_config(cfg);
  const std::size_t atoms = product_atoms(cfg);
  const auto losses = all_candidate_losses(cfg, ds);
  std::vector<double> probs{1.0};
  for (int k = 1; k <= cfg.shape.d(); ++k) {
    const auto& level = losses[static_cast<std::size_t>(k - 1)];
    std::vector<double> next;
    next.reserve(probs.size() * cfg.sets[static_cast<std::size_t>(k - 1)].size());
    for (std::size_t r = 0; r < probs.size(); ++r) {
      const auto row = gibbs_probabilities(level[r], cfg.schedule.lambda(k));
      for (double p : row) next.push_back(probs[r] * p);
    }
    probs = std::move(next);
  }
  (void)atoms;
  return ProductDistribution(set_dims(cfg), std::move(probs));
}

double multiscale_objective(const ProductDistribution& p, const TrainConfig& cfg, const Dataset& ds) {
  check_config(cfg);
  product_atoms(cfg);
  if (p.dims() != set_dims(cfg)) throw StructuralError("joint distribution does not match the weight sets");
  const int d = cfg.shape.d();
  const auto losses = all_candidate_losses(cfg, ds);
  // Kolmogorov level loss per prefix.
  std::vector<std::vector<double>> lbar(static_cast<std::size_t>(d));
  for (int k = 1; k <= d; ++k) {
    for (const auto& row : losses[static_cast<std::size_t>(k - 1)]) {
      lbar[static_cast<std::size_t>(k - 1)].push_back(kolmogorov_mean(row, cfg.schedule.lambda(k)));
    }
  }
  double expected = 0.0;
  for (std::size_t a = 0; a < p.atoms(); ++a) {
    if (p.probs()[a] == 0.0) continue;
    const auto c = p.unflatten(a);
    double value = 0.0;
    std::size_t prefix = 0;
    for (int k = 1; k <= d; ++k) {
      const auto kk = static_cast<std::size_t>(k - 1);
      value += losses[kk][prefix][c[kk]] - lbar[kk][prefix];
      prefix = prefix * p.dims()[kk] + c[kk];
    }
    expected += p.probs()[a] * value;
  }
  double entropic = 0.0;
  for (int k = 1; k <= d; ++k) {
    entropic += cfg.schedule.lambda_bar(k) * entropy(p.prefix_marginal(static_cast<std::size_t>(k)).probs());
  }
  return expected - entropic;
}

double gibbs_divergence_sum(const ProductDistribution& p, const TrainConfig& cfg, const Dataset& ds) {
  check_config(cfg);
  product_atoms(cfg);
  if (p.dims() != set_dims(cfg)) throw StructuralError("joint distribution does not match the weight sets");
  const int d = cfg.shape.d();
  const auto losses = all_candidate_losses(cfg, ds);
  double total = 0.0;
  for (int k = 1; k <= d; ++k) {
    const auto kk = static_cast<std::size_t>(k - 1);
    const auto pk = p.conditional(static_cast<std::size_t>(k));
    std::vector<DiscreteDistribution> star_rows;
    for (const auto& row : losses[kk]) {
      star_rows.emplace_back(pk.output_support(), gibbs_probabilities(row, cfg.schedule.lambda(k)));
    }
    const ConditionalDistribution star(pk.given_support(), std::move(star_rows));
    DiscreteDistribution px({"()"}, {1.0});
    if (k > 1) {
      const auto marginal = p.prefix_marginal(kk);
      px = DiscreteDistribution::over_indices({marginal.probs().begin(), marginal.probs().end()});
    }
    total += cfg.schedule.lambda(k) * conditional_relative_entropy(pk, star, px);
  }
  return total;
}

CongruencyReport congruency_gap(const TrainConfig& cfg, const Dataset& ds, std::size_t trials,
                                std::uint64_t seed) {
  check_config(cfg);
  const std::size_t atoms = product_atoms(cfg);
  const auto dims = set_dims(cfg);
  CongruencyReport rep;
  rep.trials = trials;
  const auto star = gibbs_joint(cfg, ds);
  rep.objective_at_gibbs = multiscale_objective(star, cfg, ds);
  rep.offset = rep.objective_at_gibbs - gibbs_divergence_sum(star, cfg, ds);
  for (int k = 1; k <= cfg.shape.d(); ++k) {
    rep.predicted_offset -= cfg.schedule.lambda(k) * std::log(static_cast<double>(dims[static_cast<std::size_t>(k - 1)]));
  }
  rep.min_excess = std::numeric_limits<double>::infinity();
  Rng rng(seed, Stream::kVerification);
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> w(atoms, 0.0);
    if (t % 10 == 0) {
      w[rng.below(atoms)] = 1.0;
    } else {
      // Dirichlet draws with a random sharpness; some atoms are zeroed.
      const double sharp = 0.25 + 3.0 * rng.uniform();
      for (auto& x : w) x = rng.uniform() < 0.2 ? 0.0 : std::pow(rng.exponential(), sharp);
      w[rng.below(atoms)] += 1e-3;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    const ProductDistribution p(dims, std::move(w));
    const double L = multiscale_objective(p, cfg, ds);
    const double R = gibbs_divergence_sum(p, cfg, ds);
    rep.max_gap = std::max(rep.max_gap, std::abs((L - R) - rep.offset));
    rep.min_excess = std::min(rep.min_excess, L - rep.objective_at_gibbs);
  }
  if (trials == 0) rep.min_excess = 0.0;
  return rep;
}

}  // namespace msent

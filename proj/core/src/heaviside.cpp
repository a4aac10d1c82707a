#include "msent/heaviside.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "msent/errors.hpp"

namespace msent {

LevelSpec::LevelSpec(int tau_, double eta_, double rho_, double span_)
    : tau(tau_), eta(eta_), rho(rho_), span(span_) {
  if (tau < 1) throw InvalidArgument("network width tau must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("discretization step eta must be positive");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidArgument("norm budget rho must be non-negative");
  if (!(span > 0.0) || !std::isfinite(span)) throw InvalidArgument("breakpoint span M1 R must be positive");
}

double LevelSpec::breakpoint(int j) const {
  return (-1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(tau)) * span;
}

std::vector<double> LevelSpec::breakpoints() const {
  std::vector<double> b(static_cast<std::size_t>(tau));
  for (int j = 1; j <= tau; ++j) b[static_cast<std::size_t>(j - 1)] = breakpoint(j);
  return b;
}

std::int64_t LevelSpec::max_units() const {
  // Relative slack absorbs rho/eta landing a few ulps under an integer.
  return static_cast<std::int64_t>(std::floor(rho / eta * (1.0 + 1e-12)));
}

WeightVector::WeightVector(std::vector<std::int64_t> tap_units, std::int64_t constant_units, double eta)
    : taps_(std::move(tap_units)), constant_(constant_units), eta_(eta) {
  if (!(eta_ > 0.0)) throw InvalidArgument("weight step eta must be positive");
}

WeightVector WeightVector::zeros(int tau, double eta) {
  return WeightVector(std::vector<std::int64_t>(static_cast<std::size_t>(tau), 0), 0, eta);
}

std::int64_t WeightVector::l1_units() const {
  std::int64_t s = std::abs(constant_);
  for (auto t : taps_) s += std::abs(t);
  return s;
}

double WeightVector::tap_l1() const {
  std::int64_t s = 0;
  for (auto t : taps_) s += std::abs(t);
  return static_cast<double>(s) * eta_;
}

double ContinuousWeights::l1() const {
  double s = std::abs(constant);
  for (double t : taps) s += std::abs(t);
  return s;
}

void check_fits(const LevelSpec& spec, const WeightVector& w) {
  if (w.tau() != spec.tau) throw StructuralError("weight vector width differs from level width");
  if (w.eta() != spec.eta) throw StructuralError("weight vector step differs from level step");
}

void check_member(const LevelSpec& spec, const WeightVector& w) {
  check_fits(spec, w);
  if (w.l1_units() > spec.max_units()) {
    std::ostringstream os;
    os << "weight vector l1 norm " << w.l1() << " exceeds rho = " << spec.rho;
    throw StructuralError(os.str());
  }
}

double heaviside_net_eval(const LevelSpec& spec, const WeightVector& w, double x) {
  double s = w.constant();
  for (int j = 1; j <= spec.tau; ++j) {
    if (x >= spec.breakpoint(j)) s += w.tap(j - 1);
  }
  return s;
}

double heaviside_net_eval(const LevelSpec& spec, const ContinuousWeights& w, double x) {
  double s = w.constant;
  for (int j = 1; j <= spec.tau; ++j) {
    if (x >= spec.breakpoint(j)) s += w.taps[static_cast<std::size_t>(j - 1)];
  }
  return s;
}

ContinuousWeights riemann_network_from(const RealFn& psi_prime, double psi_at_a1,
                                       const Interval& domain, const LevelSpec& spec) {
  if (!(domain.lo < 0.0 && 0.0 < domain.hi)) throw InvalidArgument("network domain must contain 0");
  if (domain.lo < -spec.span || domain.hi > spec.span) {
    throw InvalidArgument("network domain must lie inside (-M1 R, M1 R)");
  }
  ContinuousWeights w;
  w.taps.assign(static_cast<std::size_t>(spec.tau), 0.0);
  const double cell = 2.0 * spec.span / static_cast<double>(spec.tau);
  for (int j = 1; j <= spec.tau; ++j) {
    const double b = spec.breakpoint(j);
    if (domain.contains(b)) w.taps[static_cast<std::size_t>(j - 1)] = cell * psi_prime(b);
  }
  w.constant = psi_at_a1;
  return w;
}

WeightVector discretize_weights(const ContinuousWeights& w, double eta) {
  if (!(eta > 0.0)) throw InvalidArgument("discretization step eta must be positive");
  // std::llround rounds halfway cases away from zero.
  auto q = [eta](double v) { return static_cast<std::int64_t>(std::llround(v / eta)); };
  std::vector<std::int64_t> taps;
  taps.reserve(w.taps.size());
  for (double t : w.taps) taps.push_back(q(t));
  return WeightVector(std::move(taps), q(w.constant), eta);
}

std::uint64_t lattice_ball_count(std::size_t dim, std::int64_t r) {
  if (r < 0) return 0;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 total = 0;
  unsigned __int128 c_dim = 1;  // C(dim, k)
  unsigned __int128 c_r = 1;    // C(r, k)
  unsigned __int128 pow2 = 1;
  const auto ur = static_cast<std::uint64_t>(r);
  for (std::size_t k = 0; k <= dim && k <= ur; ++k) {
    if (k > 0) {
      c_dim = c_dim * (dim - k + 1) / k;
      c_r = c_r * (ur - k + 1) / k;
      pow2 *= 2;
    }
    const unsigned __int128 term = pow2 * c_dim * c_r;
    total += term;
    if (total > kMax || c_r > kMax || c_dim > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(total);
}

namespace {

void enumerate_rec(std::vector<std::int64_t>& cur, std::size_t i, std::int64_t remaining,
                   double eta, LevelWeightSet& out) {
  if (i == cur.size()) {
    std::vector<std::int64_t> taps(cur.begin(), cur.end() - 1);
    out.emplace_back(std::move(taps), cur.back(), eta);
    return;
  }
  for (std::int64_t v = -remaining; v <= remaining; ++v) {
    cur[i] = v;
    enumerate_rec(cur, i + 1, remaining - std::abs(v), eta, out);
  }
  cur[i] = 0;
}

}  // namespace

LevelWeightSet enumerate_weight_set(const LevelSpec& spec, std::size_t cap) {
  if (cap == 0) throw InvalidArgument("enumeration cap must be positive");
  const std::int64_t r = spec.max_units();
  const std::uint64_t count = lattice_ball_count(spec.dim(), r);
  if (count > cap) {
    std::ostringstream os;
    os << "weight set has sum_k 2^k C(" << spec.dim() << ",k) C(" << r << ",k) = " << count
       << " vectors, above the cap of " << cap;
    throw ResourceCapError(os.str());
  }
  LevelWeightSet out;
  out.reserve(count);
  std::vector<std::int64_t> cur(spec.dim(), 0);
  enumerate_rec(cur, 0, r, spec.eta, out);
  return out;
}

std::vector<double> rho_schedule(const ScaleLadder& ladder, double M1, double C1, double C2,
                                 int tau, double eta) {
  if (tau < 1) throw InvalidArgument("tau must be >= 1");
  const double R = ladder.R(), beta = ladder.beta();
  const int d = ladder.d();
  std::vector<double> rho(static_cast<std::size_t>(d));
  for (int k = 1; k <= d; ++k) {
    rho[static_cast<std::size_t>(k - 1)] =
        3.0 * M1 * C1 * R * R * std::pow(beta, k - d - 1) * (beta - 1.0) +
        4.0 * M1 * M1 * R * R / static_cast<double>(tau) * C2 +
        static_cast<double>(tau + 1) * eta / 2.0;
  }
  return rho;
}

double approx_error_bound(int tau, double eta, double M1R, double phi2) {
  if (tau < 2) throw InvalidArgument("approximation bound needs tau >= 2");
  if (!(eta >= 0.0)) throw InvalidArgument("eta must be non-negative");
  return static_cast<double>(tau + 1) * eta / 2.0 + 2.0 * M1R * M1R * phi2 / static_cast<double>(tau);
}

double bounded_norm_bound(int tau, double eta, double M1R, double phi1, double phi2) {
  return 3.0 * M1R * phi1 + 4.0 * M1R * M1R * phi2 / static_cast<double>(tau) +
         static_cast<double>(tau + 1) * eta / 2.0;
}

void check_template(const ModelTemplate& t) {
  if (static_cast<int>(t.levels.size()) != t.ladder.d()) {
    throw StructuralError("model has " + std::to_string(t.levels.size()) + " levels for d = " +
                          std::to_string(t.ladder.d()));
  }
}

HierarchicalModel make_model(ModelTemplate shape, std::vector<WeightVector> weights) {
  check_template(shape);
  if (weights.size() != shape.levels.size()) throw StructuralError("one weight vector per level is required");
  for (std::size_t k = 0; k < weights.size(); ++k) check_member(shape.levels[k], weights[k]);
  return HierarchicalModel{std::move(shape), std::move(weights)};
}

HierarchicalModel zero_model(ModelTemplate shape) {
  check_template(shape);
  std::vector<WeightVector> w;
  for (const auto& l : shape.levels) w.push_back(WeightVector::zeros(l.tau, l.eta));
  return HierarchicalModel{std::move(shape), std::move(w)};
}

double forward_prefix(const ModelTemplate& t, std::span<const WeightVector> prefix, int k, double x,
                      EvalStats* stats) {
  if (k < 0 || k > t.d()) throw InvalidArgument("level index out of range");
  if (static_cast<std::size_t>(k) > prefix.size()) throw StructuralError("prefix shorter than the requested level");
  double h = t.base(x);
  for (int j = 1; j <= k; ++j) {
    h += heaviside_net_eval(t.level(j), prefix[static_cast<std::size_t>(j - 1)], h);
    if (stats) ++stats->level_evals;
  }
  return h;
}

double model_forward_level(const HierarchicalModel& m, int k, double x) {
  return forward_prefix(m.shape, m.weights, k, x);
}

double prefix_output(const ModelTemplate& t, std::span<const WeightVector> prefix, double x,
                     EvalStats* stats) {
  const int k = scale_of(x, t.ladder);
  const double g = t.ladder.gamma(k);
  return g * forward_prefix(t, prefix, k, x / g, stats);
}

double model_output(const HierarchicalModel& m, double x, EvalStats* stats) {
  return prefix_output(m.shape, m.weights, x, stats);
}

}  // namespace msent

#include "msent/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msent/errors.hpp"

namespace msent {

namespace {

double grid_point(double lo, double hi, std::size_t i, std::size_t n) {
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

double max_abs_on_grid(const RealFn& g, double lo, double hi, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(g(grid_point(lo, hi, i, n))));
  return m;
}

void finish_bundle(DiffeoBundle& b) {
  const auto c = certify_constants(b);
  b.M1 = c.M1;
  b.M2 = c.M2;
}

}  // namespace

RegularityConstants certify_constants(const DiffeoBundle& b, std::size_t grid, double inflation) {
  if (grid < 2) throw InvalidArgument("certification grid needs at least 2 points");
  const double ylo = b.f(-b.R);
  const double yhi = b.f(b.R);
  RegularityConstants c;
  c.M1 = std::max(max_abs_on_grid(b.df, -b.R, b.R, grid), max_abs_on_grid(b.dinv, ylo, yhi, grid));
  c.M2 = std::max(max_abs_on_grid(b.d2f, -b.R, b.R, grid), max_abs_on_grid(b.d2inv, ylo, yhi, grid));
  c.M1 *= inflation;
  c.M2 *= inflation;
  return c;
}

DiffeoBundle tanh_bundle(double R) {
  if (!(R > 0.0)) throw InvalidArgument("bundle radius must be positive");
  DiffeoBundle b;
  b.name = "tanh";
  b.R = R;
  b.f = [](double x) { return std::tanh(x); };
  b.df = [](double x) {
    const double s = 1.0 / std::cosh(x);
    return s * s;
  };
  b.d2f = [](double x) {
    const double s = 1.0 / std::cosh(x);
    return -2.0 * std::tanh(x) * s * s;
  };
  b.inv = [](double y) { return std::atanh(y); };
  b.dinv = [](double y) { return 1.0 / (1.0 - y * y); };
  b.d2inv = [](double y) {
    const double u = 1.0 - y * y;
    return 2.0 * y / (u * u);
  };
  finish_bundle(b);
  return b;
}

DiffeoBundle linear_bundle(double slope, double R) {
  if (!(slope > 0.0)) throw InvalidArgument("linear bundle slope must be positive");
  if (!(R > 0.0)) throw InvalidArgument("bundle radius must be positive");
  DiffeoBundle b;
  b.name = "linear";
  b.R = R;
  b.f = [slope](double x) { return slope * x; };
  b.df = [slope](double) { return slope; };
  b.d2f = [](double) { return 0.0; };
  b.inv = [slope](double y) { return y / slope; };
  b.dinv = [slope](double) { return 1.0 / slope; };
  b.d2inv = [](double) { return 0.0; };
  finish_bundle(b);
  return b;
}

DiffeoBundle scaled_sinh_bundle(double a, double R) {
  if (!(a > 0.0)) throw InvalidArgument("sinh scale must be positive");
  if (!(R > 0.0)) throw InvalidArgument("bundle radius must be positive");
  DiffeoBundle b;
  b.name = "sinh";
  b.R = R;
  b.f = [a](double x) { return a * std::sinh(x / a); };
  b.df = [a](double x) { return std::cosh(x / a); };
  b.d2f = [a](double x) { return std::sinh(x / a) / a; };
  b.inv = [a](double y) { return a * std::asinh(y / a); };
  b.dinv = [a](double y) {
    const double t = y / a;
    return 1.0 / std::sqrt(1.0 + t * t);
  };
  b.d2inv = [a](double y) {
    const double t = y / a;
    return -t / (a * std::pow(1.0 + t * t, 1.5));
  };
  finish_bundle(b);
  return b;
}

DiffeoBundle make_bundle(const std::string& name, double R, double param) {
  if (name == "tanh") return tanh_bundle(R);
  if (name == "linear") return linear_bundle(param, R);
  if (name == "sinh") return scaled_sinh_bundle(param, R);
  throw InvalidArgument("unknown target bundle '" + name + "'");
}

void validate_bundle(const DiffeoBundle& b, std::size_t grid) {
  auto fail = [&](const std::string& what) {
    throw InvalidArgument("bundle '" + b.name + "': " + what);
  };
  if (b.f(0.0) != 0.0) fail("f(0) != 0");
  if (b.M1 < 1.0) fail("M1 < 1");
  const double lo = -b.R, hi = b.R;
  for (std::size_t i = 1; i + 1 < grid; ++i) {
    const double x = grid_point(lo, hi, i, grid);
    if (std::abs(b.inv(b.f(x)) - x) > 1e-10) fail("inverse inconsistent at x=" + std::to_string(x));
    if (std::abs(b.df(x)) > b.M1) fail("|f'| exceeds M1");
    if (std::abs(b.d2f(x)) > b.M2) fail("|f''| exceeds M2");
    const double y = b.f(x);
    if (std::abs(b.dinv(y)) > b.M1) fail("|(f^-1)'| exceeds M1");
    if (std::abs(b.d2inv(y)) > b.M2) fail("|(f^-1)''| exceeds M2");
  }
}

LadderSpec::LadderSpec(std::vector<double> scales) : scales_(std::move(scales)) {
  if (scales_.size() < 2) throw InvalidArgument("a ladder needs at least gamma_0 and gamma_d");
  if (!(scales_.front() > 0.0)) throw InvalidArgument("gamma_0 must be positive");
  for (std::size_t k = 1; k < scales_.size(); ++k) {
    if (!(scales_[k] > scales_[k - 1])) throw InvalidArgument("scales must be strictly increasing");
  }
  if (scales_.back() != 1.0) throw InvalidArgument("gamma_d must equal 1");
}

LadderSpec LadderSpec::geometric(double beta, int d) {
  if (!(beta > 1.0) || d < 1) throw InvalidArgument("geometric ladder needs beta > 1, d >= 1");
  std::vector<double> g(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k) g[static_cast<std::size_t>(k)] = std::pow(beta, k - d);
  g.back() = 1.0;
  return LadderSpec(std::move(g));
}

double dilate(const DiffeoBundle& b, double gamma, double x) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("dilation scale must lie in (0,1]");
  if (!(std::abs(gamma * x) < b.R)) {
    std::ostringstream os;
    os << "dilation argument " << gamma * x << " outside (-R, R) with R=" << b.R;
    throw DomainError(os.str());
  }
  return b.f(gamma * x) / gamma;
}

double dilate_inverse(const DiffeoBundle& b, double gamma, double x) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("dilation scale must lie in (0,1]");
  const double y = gamma * x;
  if (!(y > b.range_lo() && y < b.range_hi())) {
    std::ostringstream os;
    os << "inverse-dilation argument " << y << " outside the range of f";
    throw DomainError(os.str());
  }
  return b.inv(y) / gamma;
}

double delta_k(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x) {
  if (gamma_prev > gamma_next) throw InvalidArgument("delta_k needs gamma_prev <= gamma_next");
  if (gamma_prev == gamma_next) return x;
  return dilate(b, gamma_next, dilate_inverse(b, gamma_prev, x));
}

double psi_k(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x) {
  return delta_k(b, gamma_prev, gamma_next, x) - x;
}

double psi_k_prime(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x) {
  const double v = dilate_inverse(b, gamma_prev, x);
  return b.df(gamma_next * v) * b.dinv(gamma_prev * x) - 1.0;
}

double psi_k_second(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x) {
  const double v = dilate_inverse(b, gamma_prev, x);
  const double gi = b.dinv(gamma_prev * x);
  return gamma_next * b.d2f(gamma_next * v) * gi * gi +
         gamma_prev * b.df(gamma_next * v) * b.d2inv(gamma_prev * x);
}

double tanh_psi_closed_form(double gamma_prev, double x) {
  const double g2 = gamma_prev * gamma_prev;
  return -g2 * x * x * x / (1.0 + g2 * x * x);
}

double ladder_compose(const DiffeoBundle& b, const LadderSpec& spec, double x) {
  double v = dilate(b, spec.gamma(0), x);
  for (int k = 1; k <= spec.d(); ++k) v = delta_k(b, spec.gamma(k - 1), spec.gamma(k), v);
  return v;
}

Interval psi_domain(const DiffeoBundle& b, double gamma_prev, double shrink) {
  constexpr std::size_t kRangeGrid = 1001;
  double lo = b.f(-gamma_prev * b.R) / gamma_prev;
  double hi = b.f(gamma_prev * b.R) / gamma_prev;
  for (std::size_t i = 0; i < kRangeGrid; ++i) {
    const double x = grid_point(-b.R, b.R, i, kRangeGrid);
    const double y = b.f(gamma_prev * x) / gamma_prev;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  Interval d{lo + shrink, hi - shrink};
  if (!(d.lo < 0.0 && d.hi > 0.0)) {
    throw DomainError("range of the dilation is too small to host psi_k");
  }
  return d;
}

double estimate_lipschitz(const RealFn& g, double lo, double hi, std::size_t grid_n) {
  if (!(lo < hi) || grid_n < 2) throw InvalidArgument("estimate_lipschitz needs lo < hi, grid_n >= 2");
  double best = 0.0;
  double x_prev = lo;
  double g_prev = g(lo);
  for (std::size_t i = 1; i < grid_n; ++i) {
    const double x = grid_point(lo, hi, i, grid_n);
    const double gx = g(x);
    best = std::max(best, std::abs(gx - g_prev) / (x - x_prev));
    x_prev = x;
    g_prev = gx;
  }
  return best;
}

double estimate_smoothness(const RealFn& g, double lo, double hi, std::size_t grid_n) {
  if (!(lo < hi) || grid_n < 2) throw InvalidArgument("estimate_smoothness needs lo < hi, grid_n >= 2");
  const double h = (hi - lo) / static_cast<double>(grid_n);
  double best = 0.0;
  double gm = g(lo);
  double g0 = g(lo + h);
  for (std::size_t i = 1; i < grid_n; ++i) {
    const double x_next = i + 1 == grid_n ? hi : lo + static_cast<double>(i + 1) * h;
    const double gp = g(x_next);
    best = std::max(best, std::abs(gp - 2.0 * g0 + gm) / (h * h));
    gm = g0;
    g0 = gp;
  }
  return best;
}

std::vector<LevelCertificate> verify_theorem1(const DiffeoBundle& b, const LadderSpec& spec,
                                              std::size_t grid_n) {
  std::vector<LevelCertificate> out;
  for (int k = 1; k <= spec.d(); ++k) {
    const double gp = spec.gamma(k - 1);
    const double gn = spec.gamma(k);
    LevelCertificate c;
    c.k = k;
    c.domain = psi_domain(b, gp);
    const RealFn psi = [&](double x) { return psi_k(b, gp, gn, x); };
    c.lip_est = estimate_lipschitz(psi, c.domain.lo, c.domain.hi, grid_n);
    c.lip_bound = b.C1() * b.R * (gn - gp);
    c.smooth_est = estimate_smoothness(psi, c.domain.lo, c.domain.hi, grid_n);
    c.smooth_bound = b.C2();
    c.pass = c.lip_est <= c.lip_bound && c.smooth_est <= c.smooth_bound;
    out.push_back(c);
  }
  return out;
}

DilationCertificate verify_prop1(const DiffeoBundle& b, double gamma, std::size_t grid_n) {
  const double slope0 = b.df(0.0);
  const RealFn g = [&](double x) { return dilate(b, gamma, x) - slope0 * x; };
  const double edge = b.R * (1.0 - 1e-9);
  DilationCertificate c;
  c.gamma = gamma;
  c.lip_est = estimate_lipschitz(g, -edge, edge, grid_n);
  c.bound = gamma * b.M2 * b.R;
  c.pass = c.lip_est <= c.bound;
  return c;
}

}  // namespace msent

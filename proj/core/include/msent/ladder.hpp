#pragma once

// Dilations and ladder decompositions of one-dimensional diffeomorphisms.
//
// For a scale 0 < g <= 1 the dilation of f is f_[g](x) = f(g x) / g. Given
// scales g_0 < g_1 < ... < g_d = 1 the ladder factors f as
//
//   f = D_d o ... o D_1 o f_[g_0],   D_k = f_[g_k] o f_[g_{k-1}]^{-1},
//
// and each rung psi_k = D_k - id is a small, smooth perturbation of the
// identity. This header evaluates all of these pieces and produces numerical
// certificates for their Lipschitz and smoothness constants.

#include <functional>
#include <string>
#include <vector>

namespace msent {

using RealFn = std::function<double(double)>;

/// An invertible, twice differentiable f on (-R, R) with f(0) = 0, together
/// with its inverse and the regularity constants (M1, M2) bounding the first
/// and second derivatives of both f and f^{-1}. Callables must be reentrant.
struct DiffeoBundle {
  std::string name;
  RealFn f, df, d2f;
  RealFn inv, dinv, d2inv;
  double M1 = 1.0;
  double M2 = 0.0;
  double R = 1.0;

  double C1() const { return 3.0 * M1 * M2; }
  double C2() const { return M2 * (M1 * M1 + M1); }
  /// f(-R) and f(R); f is increasing for every shipped bundle.
  double range_lo() const { return f(-R); }
  double range_hi() const { return f(R); }
};

struct RegularityConstants {
  double M1 = 0.0;
  double M2 = 0.0;
};

inline constexpr std::size_t kCertifyGrid = 100000;
inline constexpr double kCertifyInflation = 1.01;

/// Maximizes |f'|, |f''| on [-R, R] and |(f^-1)'|, |(f^-1)''| on [f(-R), f(R)]
/// over `grid` points each, then inflates by `inflation`.
RegularityConstants certify_constants(const DiffeoBundle& b, std::size_t grid = kCertifyGrid,
                                      double inflation = kCertifyInflation);

/// f = tanh, the running example. Constants are certified numerically.
DiffeoBundle tanh_bundle(double R);
/// f(x) = c x with c > 0.
DiffeoBundle linear_bundle(double slope, double R);
/// f(x) = a sinh(x / a).
DiffeoBundle scaled_sinh_bundle(double a, double R);
/// Looks a bundle up by name ("tanh", "linear", "sinh"); `param` is the
/// slope or the sinh scale and is ignored for tanh.
DiffeoBundle make_bundle(const std::string& name, double R, double param = 1.0);

/// Checks f(0)=0, inverse consistency on a grid, M1 >= 1 and the derivative
/// bounds. Throws InvalidArgument naming the first violated invariant.
void validate_bundle(const DiffeoBundle& b, std::size_t grid = 2001);

/// Scales 0 < g_0 < ... < g_d = 1.
class LadderSpec {
 public:
  explicit LadderSpec(std::vector<double> scales);
  /// g_k = beta^(k-d).
  static LadderSpec geometric(double beta, int d);

  int d() const { return static_cast<int>(scales_.size()) - 1; }
  double gamma(int k) const { return scales_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<double> scales_;
};

double dilate(const DiffeoBundle& b, double gamma, double x);
double dilate_inverse(const DiffeoBundle& b, double gamma, double x);

/// D_k(x) = f_[g_next](f_[g_prev]^{-1}(x)).
double delta_k(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x);
/// psi_k(x) = D_k(x) - x.
double psi_k(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x);
/// psi_k' by the chain rule through the bundle derivatives.
double psi_k_prime(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x);
double psi_k_second(const DiffeoBundle& b, double gamma_prev, double gamma_next, double x);

/// -g^2 x^3 / (1 + g^2 x^2): psi_k of tanh when g_k = 2 g_{k-1}.
double tanh_psi_closed_form(double gamma_prev, double x);

/// D_d o ... o D_1 o f_[g_0] evaluated at x.
double ladder_compose(const DiffeoBundle& b, const LadderSpec& spec, double x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo < x && x < hi; }
};

/// Range of f_[g_prev] over (-R, R), shrunk by `shrink` at both ends.
Interval psi_domain(const DiffeoBundle& b, double gamma_prev, double shrink = 1e-9);

/// Max slope between adjacent points of a `grid_n`-point grid on [lo, hi].
double estimate_lipschitz(const RealFn& g, double lo, double hi, std::size_t grid_n);

/// Max |g(x+h) - 2g(x) + g(x-h)| / h^2 over interior points, h = (hi-lo)/grid_n.
double estimate_smoothness(const RealFn& g, double lo, double hi, std::size_t grid_n);

struct LevelCertificate {
  int k = 0;
  Interval domain;
  double lip_est = 0.0;
  double lip_bound = 0.0;
  double smooth_est = 0.0;
  double smooth_bound = 0.0;
  bool pass = false;
};

/// psi_k is C1 R (g_k - g_{k-1})-Lipschitz and C2-smooth on its domain.
std::vector<LevelCertificate> verify_theorem1(const DiffeoBundle& b, const LadderSpec& spec,
                                              std::size_t grid_n);

struct DilationCertificate {
  double gamma = 0.0;
  double lip_est = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// f_[g](x) - f'(0) x is g M2 R-Lipschitz on (-R, R).
DilationCertificate verify_prop1(const DiffeoBundle& b, double gamma, std::size_t grid_n);

}  // namespace msent

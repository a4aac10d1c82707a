#pragma once

// Reference computations written independently of the library: plain loops,
// extended precision, brute force. Tests compare library results against these.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace msent::testing {

using Big = boost::multiprecision::cpp_dec_float_50;

inline long double oracle_entropy(const std::vector<double>& p) {
  long double h = 0;
  for (double v : p) {
    if (v > 0) h -= static_cast<long double>(v) * std::log(static_cast<long double>(v));
  }
  return h;
}

inline long double oracle_kl(const std::vector<double>& p, const std::vector<double>& q) {
  long double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (q[i] == 0) return std::numeric_limits<long double>::infinity();
    d += static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / q[i]);
  }
  return d;
}

/// Lambda ratio in 50-digit arithmetic; `from_zero` adds the k = 0 term to the
/// denominator.
inline double oracle_lambda_ratio(double R_bar, int d, bool from_zero) {
  using boost::multiprecision::pow;
  using boost::multiprecision::sqrt;
  const Big beta = pow(Big(R_bar), Big(1) / Big(d));
  Big num = 0, den = 0;
  for (int k = 1; k <= d; ++k) {
    num += pow(beta, 2 * k - d) * sqrt(Big(k));
    den += pow(beta, k) * sqrt(Big(d));
  }
  if (from_zero) den += sqrt(Big(d));
  const Big r = num / den;
  return static_cast<double>(r * r);
}

/// |{z in Z^dim : |z|_1 <= r}| by scanning the cube [-r, r]^dim.
inline std::uint64_t oracle_lattice_count(int dim, int r) {
  std::uint64_t count = 0;
  std::vector<int> z(static_cast<std::size_t>(dim), -r);
  while (true) {
    int l1 = 0;
    for (int v : z) l1 += std::abs(v);
    if (l1 <= r) ++count;
    int i = 0;
    while (i < dim && z[static_cast<std::size_t>(i)] == r) z[static_cast<std::size_t>(i++)] = -r;
    if (i == dim) break;
    ++z[static_cast<std::size_t>(i)];
  }
  return count;
}

/// Composite Simpson rule with n (even) intervals.
inline double oracle_simpson(const std::function<double(double)>& g, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double oracle_tanh_psi(double gamma_prev, double x) {
  const double g2 = gamma_prev * gamma_prev;
  return -g2 * x * x * x / (1.0 + g2 * x * x);
}

/// Two-layer step network sum_j taps_j 1{x >= b_j} + c with evenly spaced
/// breakpoints b_j = (-1 + 2j/tau) span.
inline double oracle_net(const std::vector<double>& taps, double c, double span, double x) {
  const auto tau = static_cast<double>(taps.size());
  double v = c;
  for (std::size_t j = 0; j < taps.size(); ++j) {
    const double b = (-1.0 + 2.0 * static_cast<double>(j + 1) / tau) * span;
    if (x >= b) v += taps[j];
  }
  return v;
}

}  // namespace msent::testing

#include "msent/rng.hpp"

#include <cmath>

#include "msent/errors.hpp"

namespace msent {

double Rng::exponential() { return -std::log(uniform_open()); }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::below needs n > 0");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % n;
}

}  // namespace msent

#include "rgo/rng.hpp"

#include <cmath>
#include <numbers>

namespace rgo {

double DetRng::next_gaussian() {
  const double u1 = next_unit_pos();
  const double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Permutation rng_permutation(DetRng& rng, std::size_t n) {
  Permutation p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i-- > 1;) {
    const std::size_t j = rng.next() % (i + 1);
    std::swap(p[i], p[j]);
  }
  return p;
}

}  // namespace rgo

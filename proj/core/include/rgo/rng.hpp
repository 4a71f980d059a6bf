#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace rgo {

// splitmix64 generator. Chosen because the whole algorithm fits in four
// lines and reproduces bit-exactly on every platform; every seeded draw in
// the project (weight init, permutations, synthetic data) goes through it.
class DetRng {
 public:
  explicit DetRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // (0, 1]  (safe for log())
  double next_unit_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Standard normal draw via Box-Muller; consumes two generator steps.
  double next_gaussian();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

using Permutation = std::vector<std::size_t>;

// Fisher-Yates shuffle of [0..n) driven by rng. Index draw at descending
// step i is next() mod (i+1); the recipe is part of the file-format-level
// contract, so do not change it.
Permutation rng_permutation(DetRng& rng, std::size_t n);

// out[i] = v[perm[i]]
template <typename T>
std::vector<T> apply_permutation(const std::vector<T>& v, const Permutation& perm) {
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = v[perm[i]];
  return out;
}

// Scatter back: out[perm[i]] = v[i]
template <typename T>
std::vector<T> apply_inverse_permutation(const std::vector<T>& v, const Permutation& perm) {
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = v[i];
  return out;
}

}  // namespace rgo

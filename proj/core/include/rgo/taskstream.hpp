#pragma once

#include <cstdint>
#include <vector>

#include "rgo/network.hpp"

namespace rgo {

// Train/test splits of a single supervised problem; the base material the
// task generators carve streams out of.
struct Dataset {
  std::vector<Sample> train;
  std::vector<Sample> test;
  std::size_t n_classes = 0;
  std::size_t input_dim = 0;
};

struct Task {
  int id = 0;  // 1-based task descriptor
  std::vector<Sample> train;
  std::vector<Sample> test;
};

struct TaskStream {
  std::vector<Task> tasks;
  std::size_t n_classes = 0;
  std::size_t input_dim = 0;
};

// Task 1 is the base data untouched; each task k > 1 applies one fixed
// DetRng(seed^k) pixel permutation to every sample of both splits.
TaskStream gen_permuted_tasks(const Dataset& base, std::size_t k, std::uint64_t seed);

// Classes partitioned into k contiguous groups, labels remapped to
// [0, classes/k) per task. Throws if the class count is not divisible by k.
TaskStream gen_split_tasks(const Dataset& base, std::size_t k);

// Self-contained stream: per task, class means drawn uniform in [-1,1]^dim,
// samples are mean plus noise_scale times Gaussian noise, labels round-robin.
TaskStream gen_synth_gaussian_tasks(std::size_t k, std::size_t dim, std::size_t classes,
                                    std::size_t n_train, std::size_t n_test,
                                    std::uint64_t seed, double noise_scale = 0.3);

// Digit-style base dataset for dataset-free permuted/split streams: each
// class is a sparse bright stroke pattern, every sample adds a strong
// classless background drawn from a few shared patterns (ink on textured
// paper). The background forces precise cancellation weights, which is
// what later tasks overwrite, so the stream actually exercises forgetting.
Dataset make_synth_base(std::size_t dim, std::size_t classes, std::size_t n_train,
                        std::size_t n_test, std::uint64_t seed);

}  // namespace rgo

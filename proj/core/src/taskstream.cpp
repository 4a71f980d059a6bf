#include "rgo/taskstream.hpp"

#include <algorithm>
#include <stdexcept>

namespace rgo {

namespace {

std::vector<Sample> permute_pixels(const std::vector<Sample>& in, const Permutation& perm) {
  std::vector<Sample> out;
  out.reserve(in.size());
  for (const Sample& s : in) out.push_back({apply_permutation(s.x, perm), s.label});
  return out;
}

void fill_class_samples(DetRng& rng, const std::vector<Vector>& means, std::size_t dim,
                        std::size_t count, double noise_scale, std::vector<Sample>& out) {
  const std::size_t classes = means.size();
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t label = i % classes;
    Vector x(dim);
    for (std::size_t d = 0; d < dim; ++d)
      x[d] = means[label][d] + noise_scale * rng.next_gaussian();
    out.push_back({std::move(x), static_cast<int>(label)});
  }
}

}  // namespace

TaskStream gen_permuted_tasks(const Dataset& base, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("gen_permuted_tasks: need at least one task");
  if (base.train.empty() || base.test.empty())
    throw std::invalid_argument("gen_permuted_tasks: base dataset has an empty split");

  TaskStream stream;
  stream.n_classes = base.n_classes;
  stream.input_dim = base.input_dim;
  for (std::size_t t = 1; t <= k; ++t) {
    Task task;
    task.id = static_cast<int>(t);
    if (t == 1) {
      task.train = base.train;
      task.test = base.test;
    } else {
      DetRng rng(seed ^ static_cast<std::uint64_t>(t));
      const Permutation perm = rng_permutation(rng, base.input_dim);
      task.train = permute_pixels(base.train, perm);
      task.test = permute_pixels(base.test, perm);
    }
    stream.tasks.push_back(std::move(task));
  }
  return stream;
}

TaskStream gen_split_tasks(const Dataset& base, std::size_t k) {
  if (k < 1) throw std::invalid_argument("gen_split_tasks: need at least one task");
  if (base.n_classes % k != 0)
    throw std::invalid_argument("gen_split_tasks: class count not divisible by task count");
  const std::size_t per_task = base.n_classes / k;

  TaskStream stream;
  stream.n_classes = per_task;
  stream.input_dim = base.input_dim;
  for (std::size_t t = 0; t < k; ++t) {
    Task task;
    task.id = static_cast<int>(t + 1);
    const int lo = static_cast<int>(t * per_task);
    const int hi = static_cast<int>((t + 1) * per_task);
    for (const Sample& s : base.train)
      if (s.label >= lo && s.label < hi) task.train.push_back({s.x, s.label - lo});
    for (const Sample& s : base.test)
      if (s.label >= lo && s.label < hi) task.test.push_back({s.x, s.label - lo});
    if (task.train.empty() || task.test.empty())
      throw std::invalid_argument("gen_split_tasks: a task has an empty split");
    stream.tasks.push_back(std::move(task));
  }
  return stream;
}

TaskStream gen_synth_gaussian_tasks(std::size_t k, std::size_t dim, std::size_t classes,
                                    std::size_t n_train, std::size_t n_test,
                                    std::uint64_t seed, double noise_scale) {
  if (k < 1 || dim < 1 || classes < 1 || n_train < 1 || n_test < 1)
    throw std::invalid_argument("gen_synth_gaussian_tasks: all counts must be >= 1");

  TaskStream stream;
  stream.n_classes = classes;
  stream.input_dim = dim;
  DetRng rng(seed);
  for (std::size_t t = 1; t <= k; ++t) {
    std::vector<Vector> means(classes, Vector(dim));
    for (auto& mean : means)
      for (auto& e : mean) e = rng.next_uniform(-1.0, 1.0);

    Task task;
    task.id = static_cast<int>(t);
    fill_class_samples(rng, means, dim, n_train, noise_scale, task.train);
    fill_class_samples(rng, means, dim, n_test, noise_scale, task.test);
    stream.tasks.push_back(std::move(task));
  }
  return stream;
}

Dataset make_synth_base(std::size_t dim, std::size_t classes, std::size_t n_train,
                        std::size_t n_test, std::uint64_t seed) {
  if (dim < 1 || classes < 1 || n_train < 1 || n_test < 1)
    throw std::invalid_argument("make_synth_base: all counts must be >= 1");

  constexpr std::size_t kBackgroundRank = 6;
  constexpr double kSignal = 0.6;
  constexpr double kBackground = 0.6;
  constexpr double kJitter = 0.05;

  DetRng rng(seed);
  const std::size_t stroke_pixels = std::max<std::size_t>(2, dim / 6);
  std::vector<Vector> strokes(classes, Vector(dim, 0.0));
  for (auto& stroke : strokes) {
    const Permutation order = rng_permutation(rng, dim);
    for (std::size_t i = 0; i < std::min(stroke_pixels, dim); ++i)
      stroke[order[i]] = rng.next_uniform(0.6, 1.0);
  }
  std::vector<Vector> paper(kBackgroundRank, Vector(dim));
  for (auto& pattern : paper)
    for (auto& e : pattern) e = rng.next_unit();

  Dataset base;
  base.n_classes = classes;
  base.input_dim = dim;
  auto fill = [&](std::vector<Sample>& out, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t label = i % classes;
      Vector x(dim, 0.0);
      for (const Vector& pattern : paper) {
        const double weight = kBackground * rng.next_unit();
        for (std::size_t d = 0; d < dim; ++d) x[d] += weight * pattern[d];
      }
      for (std::size_t d = 0; d < dim; ++d)
        x[d] = std::clamp(x[d] + kSignal * strokes[label][d] + kJitter * rng.next_gaussian(),
                          0.0, 2.0);
      out.push_back({std::move(x), static_cast<int>(label)});
    }
  };
  fill(base.train, n_train);
  fill(base.test, n_test);
  return base;
}

}  // namespace rgo

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgo/continual.hpp"

namespace rgo {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Everything a `run` invocation needs, parsed from a flat key=value file.
struct RunConfig {
  std::string stream = "permuted";  // permuted | split | synthetic
  std::string train_images;         // optional IDX inputs; synthetic base when empty
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::size_t train_limit = 1000;
  std::size_t test_limit = 500;
  bool downsample = false;

  std::size_t tasks = 5;
  std::size_t classes = 10;
  std::size_t input_dim = 64;
  std::size_t train_per_task = 1000;  // synthetic stream sizes
  std::size_t test_per_task = 400;

  std::vector<std::size_t> hidden = {64};
  std::string activation = "relu";
  double init_scale = 1.0;

  double learning_rate = 0.1;
  std::size_t steps_per_task = 300;
  std::size_t batch_size = 10;
  double alpha = 1.0;

  std::vector<std::uint64_t> seeds = {1};
  std::vector<OptimizerKind> arms = {OptimizerKind::rgo, OptimizerKind::sgd, OptimizerKind::stl};
  std::string output_dir = "out";

  // Input and output widths come from the built stream (IDX ingestion sets
  // the pixel count; split streams remap labels to classes/K).
  NetworkSpec network_spec(std::uint64_t seed, std::size_t n_in, std::size_t n_out) const;
  TrainConfig train_config() const;
};

// Line-oriented `key = value` file; '#' starts a comment, blank lines are
// skipped, unknown keys and out-of-range values are errors that name the
// key and line. Missing keys keep the defaults above; an empty file is the
// all-default config. Dataset paths named in the file must exist.
RunConfig parse_config(const std::string& path);

// Same grammar, parsing from memory (test seam).
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

}  // namespace rgo

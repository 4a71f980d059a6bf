#include "rgo/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rgo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& origin, std::size_t line, const std::string& key,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    fail(origin, line, "key '" + key + "': not a number: '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& origin, std::size_t line, const std::string& key,
                        const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    fail(origin, line, "key '" + key + "': not a non-negative integer: '" + value + "'");
  return v;
}

bool parse_bool(const std::string& origin, std::size_t line, const std::string& key,
                const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(origin, line, "key '" + key + "': expected true/false: '" + value + "'");
}

}  // namespace

NetworkSpec RunConfig::network_spec(std::uint64_t seed, std::size_t n_in, std::size_t n_out) const {
  NetworkSpec spec;
  spec.layer_widths.push_back(n_in);
  for (std::size_t h : hidden) spec.layer_widths.push_back(h);
  spec.layer_widths.push_back(n_out);
  spec.hidden_activation = activation == "identity" ? Activation::identity : Activation::relu;
  spec.init_seed = seed;
  spec.init_scale = init_scale;
  return spec;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig cfg;
  cfg.learning_rate = learning_rate;
  cfg.steps_per_task = steps_per_task;
  cfg.batch_size = batch_size;
  cfg.eta_max = learning_rate;
  return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value': '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "empty key");

    if (key == "stream") {
      if (value != "permuted" && value != "split" && value != "synthetic")
        fail(origin, lineno, "key 'stream': must be permuted, split or synthetic");
      cfg.stream = value;
    } else if (key == "train_images") {
      cfg.train_images = value;
    } else if (key == "train_labels") {
      cfg.train_labels = value;
    } else if (key == "test_images") {
      cfg.test_images = value;
    } else if (key == "test_labels") {
      cfg.test_labels = value;
    } else if (key == "train_limit") {
      cfg.train_limit = parse_u64(origin, lineno, key, value);
      if (cfg.train_limit < 1) fail(origin, lineno, "key 'train_limit': must be >= 1");
    } else if (key == "test_limit") {
      cfg.test_limit = parse_u64(origin, lineno, key, value);
      if (cfg.test_limit < 1) fail(origin, lineno, "key 'test_limit': must be >= 1");
    } else if (key == "downsample") {
      cfg.downsample = parse_bool(origin, lineno, key, value);
    } else if (key == "tasks") {
      cfg.tasks = parse_u64(origin, lineno, key, value);
      if (cfg.tasks < 1) fail(origin, lineno, "key 'tasks': must be >= 1");
    } else if (key == "classes") {
      cfg.classes = parse_u64(origin, lineno, key, value);
      if (cfg.classes < 2) fail(origin, lineno, "key 'classes': must be >= 2");
    } else if (key == "input_dim") {
      cfg.input_dim = parse_u64(origin, lineno, key, value);
      if (cfg.input_dim < 1) fail(origin, lineno, "key 'input_dim': must be >= 1");
    } else if (key == "train_per_task") {
      cfg.train_per_task = parse_u64(origin, lineno, key, value);
      if (cfg.train_per_task < 1) fail(origin, lineno, "key 'train_per_task': must be >= 1");
    } else if (key == "test_per_task") {
      cfg.test_per_task = parse_u64(origin, lineno, key, value);
      if (cfg.test_per_task < 1) fail(origin, lineno, "key 'test_per_task': must be >= 1");
    } else if (key == "hidden") {
      cfg.hidden.clear();
      for (const std::string& h : split_list(value)) {
        const std::uint64_t w = parse_u64(origin, lineno, key, h);
        if (w < 1) fail(origin, lineno, "key 'hidden': widths must be >= 1");
        cfg.hidden.push_back(w);
      }
      if (cfg.hidden.empty()) fail(origin, lineno, "key 'hidden': need at least one width");
    } else if (key == "activation") {
      if (value != "relu" && value != "identity")
        fail(origin, lineno, "key 'activation': must be relu or identity");
      cfg.activation = value;
    } else if (key == "init_scale") {
      cfg.init_scale = parse_double(origin, lineno, key, value);
      if (cfg.init_scale < 0.0) fail(origin, lineno, "key 'init_scale': must be >= 0");
    } else if (key == "learning_rate") {
      cfg.learning_rate = parse_double(origin, lineno, key, value);
      if (cfg.learning_rate <= 0.0) fail(origin, lineno, "key 'learning_rate': must be > 0");
    } else if (key == "steps_per_task") {
      cfg.steps_per_task = parse_u64(origin, lineno, key, value);
      if (cfg.steps_per_task < 1) fail(origin, lineno, "key 'steps_per_task': must be >= 1");
    } else if (key == "batch_size") {
      cfg.batch_size = parse_u64(origin, lineno, key, value);
      if (cfg.batch_size < 1) fail(origin, lineno, "key 'batch_size': must be >= 1");
    } else if (key == "alpha") {
      cfg.alpha = parse_double(origin, lineno, key, value);
      if (cfg.alpha <= 0.0) fail(origin, lineno, "key 'alpha': must be > 0");
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const std::string& s : split_list(value))
        cfg.seeds.push_back(parse_u64(origin, lineno, key, s));
      if (cfg.seeds.empty()) fail(origin, lineno, "key 'seeds': need at least one seed");
    } else if (key == "arms") {
      cfg.arms.clear();
      for (const std::string& a : split_list(value)) {
        try {
          cfg.arms.push_back(optimizer_kind_from_string(a));
        } catch (const std::exception&) {
          fail(origin, lineno, "key 'arms': unknown arm '" + a + "'");
        }
      }
      if (cfg.arms.empty()) fail(origin, lineno, "key 'arms': need at least one arm");
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      fail(origin, lineno, "unknown key '" + key + "'");
    }
  }

  for (const std::string& path :
       {cfg.train_images, cfg.train_labels, cfg.test_images, cfg.test_labels}) {
    if (!path.empty() && !std::filesystem::exists(path))
      throw ConfigError(origin + ": referenced path does not exist: " + path);
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace rgo

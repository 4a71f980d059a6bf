#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rgo/config.hpp"
#include "rgo/csv.hpp"
#include "rgo/idx.hpp"
#include "rgo/verify.hpp"

namespace fs = std::filesystem;

namespace {

struct ArmResult {
  std::vector<rgo::SummaryRow> rows;
  // filename -> matrix, written after all arms finish
  std::vector<std::pair<std::string, rgo::AccuracyMatrix>> matrices;
};

rgo::Dataset load_idx_base(const rgo::RunConfig& cfg) {
  const rgo::IdxDataset train =
      rgo::load_idx(cfg.train_images, cfg.train_labels, cfg.train_limit, cfg.downsample);
  const rgo::IdxDataset test =
      rgo::load_idx(cfg.test_images, cfg.test_labels, cfg.test_limit, cfg.downsample);

  rgo::Dataset base;
  int max_label = 0;
  for (std::size_t i = 0; i < train.images.size(); ++i) {
    max_label = std::max(max_label, train.labels[i]);
    base.train.push_back({train.images[i], train.labels[i]});
  }
  for (std::size_t i = 0; i < test.images.size(); ++i) {
    max_label = std::max(max_label, test.labels[i]);
    base.test.push_back({test.images[i], test.labels[i]});
  }
  base.n_classes = static_cast<std::size_t>(max_label) + 1;
  base.input_dim = train.rows * train.cols;
  return base;
}

rgo::TaskStream build_stream(const rgo::RunConfig& cfg) {
  // The benchmark data is seeded by the first run seed so every arm and
  // seed in one invocation sees the same stream.
  const std::uint64_t stream_seed = cfg.seeds.front();

  const bool have_idx = !cfg.train_images.empty();
  if (have_idx &&
      (cfg.train_labels.empty() || cfg.test_images.empty() || cfg.test_labels.empty()))
    throw rgo::ConfigError("IDX input needs all four of train/test images/labels paths");

  if (cfg.stream == "synthetic")
    return rgo::gen_synth_gaussian_tasks(cfg.tasks, cfg.input_dim, cfg.classes,
                                         cfg.train_per_task, cfg.test_per_task, stream_seed);

  const rgo::Dataset base =
      have_idx ? load_idx_base(cfg)
               : rgo::make_synth_base(cfg.input_dim, cfg.classes, cfg.train_per_task,
                                      cfg.test_per_task, stream_seed);
  if (cfg.stream == "permuted") return rgo::gen_permuted_tasks(base, cfg.tasks, stream_seed);
  return rgo::gen_split_tasks(base, cfg.tasks);
}

std::string matrix_filename(const std::string& arm, std::uint64_t seed, bool multi_seed) {
  if (!multi_seed) return "acc_matrix_" + arm + ".csv";
  return "acc_matrix_" + arm + "_seed" + std::to_string(seed) + ".csv";
}

ArmResult run_arm(rgo::OptimizerKind arm, const rgo::RunConfig& cfg,
                  const rgo::TaskStream& stream) {
  ArmResult result;
  const bool multi_seed = cfg.seeds.size() > 1;
  for (std::uint64_t seed : cfg.seeds) {
    const rgo::NetworkSpec spec = cfg.network_spec(seed, stream.input_dim, stream.n_classes);
    const rgo::TrainConfig train_cfg = cfg.train_config();
    rgo::RunReport report;
    if (arm == rgo::OptimizerKind::stl)
      report = rgo::run_stl(spec, stream, train_cfg);
    else
      report = rgo::run_continual(spec, stream, arm, train_cfg, nullptr, cfg.alpha);

    const std::string arm_name = rgo::to_string(arm);
    result.rows.push_back({arm_name, seed, report.acc, report.bwt, report.wall_time});
    result.matrices.emplace_back(matrix_filename(arm_name, seed, multi_seed),
                                 report.acc_matrix);
  }
  return result;
}

void print_summary_table(std::ostream& out, const std::vector<rgo::SummaryRow>& rows) {
  out << std::left << std::setw(6) << "arm" << std::setw(8) << "seed" << std::right
      << std::setw(10) << "acc(%)" << std::setw(10) << "bwt(%)" << std::setw(12) << "time(s)"
      << "\n";
  out << std::fixed << std::setprecision(2);
  for (const rgo::SummaryRow& r : rows) {
    out << std::left << std::setw(6) << r.arm << std::setw(8) << r.seed << std::right
        << std::setw(10) << 100.0 * r.acc << std::setw(10) << 100.0 * r.bwt << std::setw(12)
        << std::setprecision(3) << r.wall_time << std::setprecision(2) << "\n";
  }
  out.unsetf(std::ios::fixed);
}

int cmd_run(const rgo::RunConfig& cfg, bool parallel_arms) {
  const rgo::TaskStream stream = build_stream(cfg);
  fs::create_directories(cfg.output_dir);

  std::vector<ArmResult> results(cfg.arms.size());
  std::vector<std::string> errors(cfg.arms.size());

  auto worker = [&](std::size_t i) {
    try {
      results[i] = run_arm(cfg.arms[i], cfg, stream);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  if (parallel_arms) {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < cfg.arms.size(); ++i) threads.emplace_back(worker, i);
    for (auto& t : threads) t.join();
  } else {
    for (std::size_t i = 0; i < cfg.arms.size(); ++i) worker(i);
  }

  bool failed = false;
  std::vector<rgo::SummaryRow> all_rows;
  for (std::size_t i = 0; i < cfg.arms.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "arm " << rgo::to_string(cfg.arms[i]) << " failed: " << errors[i] << "\n";
      failed = true;
      continue;
    }
    for (const auto& [name, matrix] : results[i].matrices)
      rgo::write_acc_matrix((fs::path(cfg.output_dir) / name).string(), matrix);
    all_rows.insert(all_rows.end(), results[i].rows.begin(), results[i].rows.end());
  }
  rgo::write_summary((fs::path(cfg.output_dir) / "summary.csv").string(), all_rows);
  print_summary_table(std::cout, all_rows);
  std::cout << "wrote " << cfg.output_dir << "/summary.csv\n";
  return failed ? 1 : 0;
}

int cmd_report(const std::string& dir) {
  const std::vector<rgo::SummaryRow> rows =
      rgo::read_summary((fs::path(dir) / "summary.csv").string());
  if (rows.empty()) {
    std::cerr << "report: empty summary in " << dir << "\n";
    return 1;
  }

  // Cross-check every summary row against its accuracy matrix.
  for (const rgo::SummaryRow& row : rows) {
    fs::path matrix_path = fs::path(dir) / matrix_filename(row.arm, row.seed, true);
    if (!fs::exists(matrix_path))
      matrix_path = fs::path(dir) / matrix_filename(row.arm, row.seed, false);
    const rgo::AccuracyMatrix m = rgo::read_acc_matrix(matrix_path.string());
    const auto [acc, bwt] = rgo::acc_bwt(m);
    if (std::abs(acc - row.acc) > 1e-9 || std::abs(bwt - row.bwt) > 1e-9) {
      std::cerr << "report: " << matrix_path.filename().string()
                << " disagrees with summary.csv (recomputed acc=" << rgo::format_double(acc)
                << " bwt=" << rgo::format_double(bwt) << ")\n";
      return 1;
    }
  }

  // Aggregate mean +/- population std over seeds, per arm.
  std::map<std::string, std::vector<const rgo::SummaryRow*>> by_arm;
  std::vector<std::string> arm_order;
  for (const rgo::SummaryRow& row : rows) {
    if (!by_arm.contains(row.arm)) arm_order.push_back(row.arm);
    by_arm[row.arm].push_back(&row);
  }

  std::cout << std::left << std::setw(6) << "arm" << std::right << std::setw(18) << "acc(%)"
            << std::setw(18) << "bwt(%)" << std::setw(8) << "seeds" << "\n";
  std::cout << std::fixed << std::setprecision(2);
  for (const std::string& arm : arm_order) {
    std::vector<double> accs, bwts;
    for (const auto* row : by_arm[arm]) {
      accs.push_back(row->acc);
      bwts.push_back(row->bwt);
    }
    const auto [acc_mean, acc_std] = rgo::mean_and_std(accs);
    const auto [bwt_mean, bwt_std] = rgo::mean_and_std(bwts);
    std::ostringstream acc_cell, bwt_cell;
    acc_cell << std::fixed << std::setprecision(2) << 100.0 * acc_mean << "+-"
             << 100.0 * acc_std;
    bwt_cell << std::fixed << std::setprecision(2) << 100.0 * bwt_mean << "+-"
             << 100.0 * bwt_std;
    std::cout << std::left << std::setw(6) << arm << std::right << std::setw(18)
              << acc_cell.str() << std::setw(18) << bwt_cell.str() << std::setw(8)
              << accs.size() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continual-learning workbench: projected-gradient optimizer, task streams, metrics"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool have_seed = false;
  std::uint64_t limit_override = 0;
  bool have_limit = false;
  bool downsample_override = false;
  bool parallel_arms = false;

  CLI::App* run = app.add_subcommand("run", "train the configured arms and write CSV reports");
  run->add_option("--config", config_path, "key = value config file (defaults apply when omitted)");
  auto* seed_opt = run->add_option("--seed", seed_override, "replace the config's seed list");
  auto* limit_opt = run->add_option("--limit", limit_override, "cap loaded IDX train samples");
  run->add_flag("--downsample", downsample_override, "average 2x2 pixel blocks of IDX images");
  run->add_flag("--parallel-arms", parallel_arms, "run independent arms on separate threads");

  CLI::App* verify = app.add_subcommand("verify", "run the full property suite and report pass/fail");
  std::string inject_fault;
  verify->add_option("--inject-fault", inject_fault,
                     "internal: sabotage the named property to exercise failure reporting");

  CLI::App* report = app.add_subcommand("report", "recompute metrics from CSVs and cross-check");
  std::string report_dir;
  report->add_option("--dir", report_dir, "directory with summary.csv and accuracy matrices")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      rgo::RunConfig cfg =
          config_path.empty() ? rgo::RunConfig{} : rgo::parse_config(config_path);
      have_seed = seed_opt->count() > 0;
      have_limit = limit_opt->count() > 0;
      if (have_seed) cfg.seeds = {seed_override};
      if (have_limit) cfg.train_limit = limit_override;
      if (downsample_override) cfg.downsample = true;
      return cmd_run(cfg, parallel_arms);
    }
    if (verify->parsed()) {
      rgo::VerifyOptions options;
      options.inject_fault = inject_fault;
      return rgo::run_verify_suite(options, std::cout) == 0 ? 0 : 1;
    }
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgo/continual.hpp"

namespace rgo {

// One row of summary.csv.
struct SummaryRow {
  std::string arm;
  std::uint64_t seed = 0;
  double acc = 0.0;
  double bwt = 0.0;
  double wall_time = 0.0;
};

// Doubles print with 17 significant digits, so write-then-read is exact.
std::string format_double(double v);

// Accuracy matrix CSV: one row per after-task index, columns are tasks,
// cells above the diagonal stay empty.
std::string acc_matrix_to_csv(const AccuracyMatrix& m);
AccuracyMatrix acc_matrix_from_csv(const std::string& text);

void write_acc_matrix(const std::string& path, const AccuracyMatrix& m);
AccuracyMatrix read_acc_matrix(const std::string& path);

// summary.csv with header arm,seed,acc,bwt,wall_time.
void write_summary(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary(const std::string& path);

// Mean and population standard deviation, used for the per-arm aggregate
// table.
std::pair<double, double> mean_and_std(const std::vector<double>& values);

}  // namespace rgo

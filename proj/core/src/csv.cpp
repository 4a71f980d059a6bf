#include "rgo/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rgo {

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("csv: bad number '" + cell + "' in " + context);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("csv: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("csv: cannot write " + path);
  out << text;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string acc_matrix_to_csv(const AccuracyMatrix& m) {
  m.validate();
  const std::size_t t = m.num_tasks();
  std::string out;
  for (std::size_t row = 0; row < t; ++row) {
    for (std::size_t col = 0; col < t; ++col) {
      if (col > 0) out += ',';
      if (col < m.rows[row].size()) out += format_double(m.rows[row][col]);
    }
    out += '\n';
  }
  return out;
}

AccuracyMatrix acc_matrix_from_csv(const std::string& text) {
  AccuracyMatrix m;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_cells(line);
    std::vector<double> values;
    for (std::size_t col = 0; col < cells.size(); ++col) {
      if (cells[col].empty()) continue;
      if (col != values.size())
        throw std::runtime_error("csv: non-contiguous accuracy row " + std::to_string(row));
      values.push_back(parse_cell(cells[col], "accuracy row " + std::to_string(row)));
    }
    if (values.size() != row + 1)
      throw std::runtime_error("csv: accuracy row " + std::to_string(row) + " has " +
                               std::to_string(values.size()) + " cells, expected " +
                               std::to_string(row + 1));
    m.rows.push_back(std::move(values));
    ++row;
  }
  m.validate();
  return m;
}

void write_acc_matrix(const std::string& path, const AccuracyMatrix& m) {
  write_file(path, acc_matrix_to_csv(m));
}

AccuracyMatrix read_acc_matrix(const std::string& path) {
  return acc_matrix_from_csv(read_file(path));
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::string out = "arm,seed,acc,bwt,wall_time\n";
  for (const SummaryRow& r : rows) {
    out += r.arm;
    out += ',' + std::to_string(r.seed);
    out += ',' + format_double(r.acc);
    out += ',' + format_double(r.bwt);
    out += ',' + format_double(r.wall_time);
    out += '\n';
  }
  write_file(path, out);
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_and_std: empty input");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

std::vector<SummaryRow> read_summary(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "arm,seed,acc,bwt,wall_time")
    throw std::runtime_error("csv: bad summary header in " + path);
  std::vector<SummaryRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != 5)
      throw std::runtime_error("csv: summary line " + std::to_string(lineno) +
                               " has " + std::to_string(cells.size()) + " cells");
    SummaryRow r;
    r.arm = cells[0];
    r.seed = static_cast<std::uint64_t>(
        std::stoull(cells[1]));
    r.acc = parse_cell(cells[2], "summary line " + std::to_string(lineno));
    r.bwt = parse_cell(cells[3], "summary line " + std::to_string(lineno));
    r.wall_time = parse_cell(cells[4], "summary line " + std::to_string(lineno));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace rgo

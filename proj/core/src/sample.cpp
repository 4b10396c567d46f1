#include "aese/sample.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace aese {

namespace {

void validate_rows(const RowMatrixXd& pts) {
  for (int j = 0; j < pts.rows(); ++j) {
    double prev = 0.0;
    for (int i = 0; i < pts.cols(); ++i) {
      const double v = pts(j, i);
      if (!(v >= prev) || v > 1.0) {
        std::ostringstream os;
        os << "sample row " << j + 1 << " is not sorted within [0,1]";
        throw std::invalid_argument(os.str());
      }
      prev = v;
    }
  }
}

}  // namespace

SimplexSample SimplexSample::from_matrix(RowMatrixXd pts) {
  if (pts.cols() < 2) throw std::invalid_argument("SimplexSample: need d >= 2 columns");
  validate_rows(pts);
  return SimplexSample{std::move(pts)};
}

SimplexSample SimplexSample::from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("sample CSV: empty input");
  // header x1,...,xd
  int d = 0;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
      ++d;
      std::string expect = "x" + std::to_string(d);
      if (cell != expect)
        throw std::runtime_error("sample CSV: bad header column '" + cell + "', expected '" + expect + "'");
    }
  }
  if (d < 2) throw std::runtime_error("sample CSV: need at least two columns");

  std::vector<double> values;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::string cell;
    int got = 0;
    while (std::getline(rs, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("sample CSV: bad number '" + cell + "' in row " + std::to_string(rows + 1));
      }
      ++got;
    }
    if (got != d)
      throw std::runtime_error("sample CSV: row " + std::to_string(rows + 1) + " has " +
                               std::to_string(got) + " cells, expected " + std::to_string(d));
    ++rows;
  }
  RowMatrixXd pts(rows, d);
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < d; ++i) pts(j, i) = values[static_cast<size_t>(j) * d + i];
  return from_matrix(std::move(pts));
}

SimplexSample SimplexSample::from_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open sample file: " + path);
  return from_csv(is);
}

void SimplexSample::to_csv(std::ostream& os) const {
  for (int i = 1; i <= dim(); ++i) os << (i > 1 ? "," : "") << 'x' << i;
  os << '\n';
  char buf[40];
  for (int j = 0; j < size(); ++j) {
    for (int i = 0; i < dim(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", points(j, i));
      os << (i > 0 ? "," : "") << buf;
    }
    os << '\n';
  }
}

void SimplexSample::to_csv_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  to_csv(os);
}

}  // namespace aese

#pragma once

/// \file sample.hpp
/// Samples of ordered points and their CSV representation (header x1,...,xd;
/// one point per row, coordinates already sorted — the loader validates, it
/// does not sort).

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>

namespace aese {

/// Row-major so that each point is a contiguous span.
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SimplexSample {
  RowMatrixXd points;  // n x d, every row satisfies 0 <= x_1 <= ... <= x_d <= 1

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  std::span<const double> row(int j) const {
    return {points.data() + static_cast<std::ptrdiff_t>(j) * dim(), static_cast<size_t>(dim())};
  }

  /// Validates ordering; throws std::invalid_argument naming the first bad row.
  static SimplexSample from_matrix(RowMatrixXd pts);

  static SimplexSample from_csv(std::istream& is);
  static SimplexSample from_csv_file(const std::string& path);
  void to_csv(std::ostream& os) const;
  void to_csv_file(const std::string& path) const;
};

}  // namespace aese

#pragma once

/// \file expmodel.hpp
/// The additive exponential series density on the ordered simplex:
///   f_theta = exp( sum_i sum_k theta_{i,k} phi_{i,k}(x_i) - psi(theta) ) 1_simplex,
/// its log-normalizer psi, the moment map A_m(theta) = E_theta[phi_m(X)] and
/// the covariance of phi_m(X) (the Hessian of psi).

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "aese/basis.hpp"
#include "aese/quadrature.hpp"

namespace aese {

/// Per-coordinate truncation degrees m = (m_1, ..., m_d), all >= 1.
/// Coefficient vectors are flat with coordinate blocks in order:
/// (i, k) maps to offset(i) + k - 1, with 1 <= k <= m_i.
struct ModelIndex {
  std::vector<int> degrees;

  ModelIndex() = default;
  explicit ModelIndex(std::vector<int> m);
  static ModelIndex uniform(int d, int v);

  int dim() const { return static_cast<int>(degrees.size()); }
  int total() const;
  /// Flat offset of the first coefficient of coordinate i (1-based).
  int offset(int i) const;

  bool operator==(const ModelIndex& o) const { return degrees == o.degrees; }
};

/// Grid-bound tables for one model index: phi_{i,k} at the quadrature nodes.
/// Built once per fit; all queries are const and reentrant.
class ModelWorkspace {
 public:
  ModelWorkspace(ModelIndex index, const QuadratureGrid& grid);
  // the workspace keeps a reference to the grid
  ModelWorkspace(ModelIndex, QuadratureGrid&&) = delete;

  const ModelIndex& index() const { return index_; }
  const QuadratureGrid& grid() const { return *grid_; }
  /// Rows 1..m_i of phi values for coordinate i (1-based), shape m_i x N.
  const Eigen::MatrixXd& basis_nodes(int i) const { return phi_[i - 1]; }

  /// g_i = theta_i . phi_{i,.} at the grid nodes, one vector per coordinate.
  std::vector<Eigen::VectorXd> log_components(const Eigen::VectorXd& theta) const;

  double log_normalizer(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd moment_map(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd covariance(const Eigen::VectorXd& theta) const;

  /// Moments E_theta[phi_{i,k}] for an enclosing index (ext.degrees[i] >=
  /// index().degrees[i]); used for Kullback-Leibler divergences between
  /// densities of different truncation degrees.
  Eigen::VectorXd moment_map_extended(const Eigen::VectorXd& theta, const ModelIndex& ext) const;

 private:
  void check_theta(const Eigen::VectorXd& theta) const;

  ModelIndex index_;
  const QuadratureGrid* grid_;
  std::vector<Eigen::MatrixXd> phi_;  // per coordinate, rows k = 1..m_i
};

/// A fitted density: immutable, evaluable in log-space anywhere on I^d.
class SeriesDensity {
 public:
  SeriesDensity(ModelIndex index, Eigen::VectorXd theta, double log_norm);

  int dim() const { return index_.dim(); }
  const ModelIndex& index() const { return index_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  /// Cached psi(theta).
  double log_norm() const { return log_norm_; }

  /// theta . phi_m(x) - psi on the simplex, -inf off it.
  double log_density(std::span<const double> x) const;
  /// Smooth extension theta . phi_m(x) - psi on all of I^d (no indicator);
  /// agrees with log_density on the simplex.
  double log_unconstrained(std::span<const double> x) const;
  /// Per-coordinate log component sum_k theta_{i,k} phi_{i,k}(t), 1-based i.
  double log_component(int i, double t) const;

  /// Versioned plain-text record; round-trips bit-exactly.
  void save(std::ostream& os) const;
  static SeriesDensity load(std::istream& is);

 private:
  ModelIndex index_;
  Eigen::VectorXd theta_;
  double log_norm_;
  std::vector<BasisFamily> families_;
};

/// psi(theta) = log int exp(theta . phi_m) over the simplex.
double log_normalizer(const ModelIndex& index, const Eigen::VectorXd& theta,
                      const QuadratureGrid& grid);

/// A_m(theta) = grad psi = E_theta[phi_m(X)], length |m|.
Eigen::VectorXd moment_map(const ModelIndex& index, const Eigen::VectorXd& theta,
                           const QuadratureGrid& grid);

/// Cov_theta[phi_m(X)] = Hessian of psi, |m| x |m|, positive definite.
Eigen::MatrixXd covariance_matrix(const ModelIndex& index, const Eigen::VectorXd& theta,
                                  const QuadratureGrid& grid);

/// Builds the density with psi computed on the given grid.
SeriesDensity make_series_density(const ModelIndex& index, Eigen::VectorXd theta,
                                  const QuadratureGrid& grid);

/// Sup-norm/L2 comparison constant kappa_m = sqrt(2 d!) sqrt(sum (m_i+d)^{2d}).
double kappa_m(const ModelIndex& index);

/// True when x_1 <= x_2 <= ... <= x_d with all entries in [0,1].
bool on_simplex(std::span<const double> x);

}  // namespace aese

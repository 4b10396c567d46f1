#pragma once

/// \file basis.hpp
/// The shifted Jacobi families phi_{i,k} on [0,1], orthonormal with respect to
/// the marginal measures q_i of Lebesgue measure on the ordered simplex, their
/// cross-coordinate scalar products and the degree-k correlation matrices R_k.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "aese/quadrature.hpp"

namespace aese {

/// One family (phi_{i,k}, 0 <= k <= max_degree) for a fixed coordinate i of
/// dimension d:
///   phi_{i,k}(t) = rho_{i,k} sqrt((d-i)!(i-1)!) P_k^{(d-i,i-1)}(2t - 1),
///   rho_{i,k} = sqrt((2k+d) k! (k+d-1)! / ((k+d-i)! (k+i-1)!)).
/// Immutable after construction; safe for concurrent reads.
class BasisFamily {
 public:
  BasisFamily(int d, int i, int max_degree);

  int dim() const { return d_; }
  int coordinate() const { return i_; }
  int max_degree() const { return max_degree_; }

  /// rho_{i,k}.
  double normalizer(int k) const;

  /// phi_{i,k}(t); throws std::domain_error for t outside [0,1].
  double eval(int k, double t) const;

  /// All members phi_{i,0..max_degree}(t) in one recurrence sweep.
  Eigen::VectorXd eval_all(double t) const;

  /// Matrix (max_degree+1) x grid.size() of phi values at the grid nodes;
  /// row k holds phi_{i,k}.
  Eigen::MatrixXd values_on_grid(const QuadratureGrid& grid) const;

  /// Uniform bound sqrt((d-1)!) sqrt(2k+d) (k+d-1)!/k! on |phi_{i,k}|.
  double sup_norm_bound(int k) const;

 private:
  int d_, i_, max_degree_;
  std::vector<double> scale_;  // rho_{i,k} * sqrt((d-i)!(i-1)!)
  std::vector<double> rho_;
};

/// int over the simplex of phi_{[i],k} phi_{[j],l}, 1 <= i < j <= d, by the
/// closed form: 0 when k != l, otherwise
///   sqrt((j-1)!(d-i)!/((i-1)!(d-j)!)) *
///   sqrt((k+d-j)!(k+i-1)!/((k+d-i)!(k+j-1)!)),
/// always in [0,1].
double mixed_scalar_product(int d, int i, int j, int k, int l);

/// Correlation matrix R_k(i,j) = int phi_{[i],k} phi_{[j],k} of degree k >= 1:
/// symmetric, unit diagonal, positive definite, smallest eigenvalue
/// k/(k+d-1).
struct CorrelationMatrix {
  int k = 1;
  int d = 2;
  Eigen::MatrixXd entries;

  double min_eigenvalue() const;
};

CorrelationMatrix correlation_matrix(int d, int k);

/// Coefficients beta_k = int_I h phi_{i,k} q_i for 1 <= k <= m_i (the
/// degree-0 coefficient is omitted: expansions of centered log-components).
std::vector<double> project_log_component(const std::function<double(double)>& h,
                                          const BasisFamily& family, int m_i,
                                          const QuadratureGrid& grid);

}  // namespace aese

#include "aese/basis.hpp"

#include <cmath>
#include <stdexcept>

#include "aese/jacobi.hpp"

namespace aese {

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

BasisFamily::BasisFamily(int d, int i, int max_degree) : d_(d), i_(i), max_degree_(max_degree) {
  if (d < 2) throw std::invalid_argument("BasisFamily: need d >= 2");
  if (i < 1 || i > d) throw std::invalid_argument("BasisFamily: need 1 <= i <= d");
  if (max_degree < 0) throw std::invalid_argument("BasisFamily: need max_degree >= 0");

  scale_.resize(max_degree_ + 1);
  rho_.resize(max_degree_ + 1);
  const double log_meas = 0.5 * (log_factorial(d - i) + log_factorial(i - 1));
  for (int k = 0; k <= max_degree_; ++k) {
    const double log_rho = 0.5 * (std::log(2.0 * k + d) + log_factorial(k) + log_factorial(k + d - 1) -
                                  log_factorial(k + d - i) - log_factorial(k + i - 1));
    rho_[k] = std::exp(log_rho);
    scale_[k] = std::exp(log_rho + log_meas);
  }
}

double BasisFamily::normalizer(int k) const {
  if (k < 0 || k > max_degree_) throw std::invalid_argument("BasisFamily::normalizer: degree out of range");
  return rho_[k];
}

double BasisFamily::eval(int k, double t) const {
  if (k < 0 || k > max_degree_) throw std::invalid_argument("BasisFamily::eval: degree out of range");
  if (t < 0.0 || t > 1.0) throw std::domain_error("BasisFamily::eval: t outside [0, 1]");
  const JacobiParams p{static_cast<double>(d_ - i_), static_cast<double>(i_ - 1)};
  return scale_[k] * jacobi_eval(p, k, 2.0 * t - 1.0);
}

Eigen::VectorXd BasisFamily::eval_all(double t) const {
  if (t < 0.0 || t > 1.0) throw std::domain_error("BasisFamily::eval_all: t outside [0, 1]");
  const double a = d_ - i_, b = i_ - 1;
  const double s = 2.0 * t - 1.0;
  Eigen::VectorXd out(max_degree_ + 1);
  double pm1 = 1.0;
  out[0] = scale_[0];
  if (max_degree_ == 0) return out;
  double pk = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * s;
  out[1] = scale_[1] * pk;
  for (int n = 1; n < max_degree_; ++n) {
    const double c1 = 2.0 * (n + 1.0) * (n + a + b + 1.0) * (2.0 * n + a + b);
    const double c2 = (2.0 * n + a + b + 1.0) * (a * a - b * b);
    const double c3 = (2.0 * n + a + b) * (2.0 * n + a + b + 1.0) * (2.0 * n + a + b + 2.0);
    const double c4 = 2.0 * (n + a) * (n + b) * (2.0 * n + a + b + 2.0);
    const double pnext = ((c2 + c3 * s) * pk - c4 * pm1) / c1;
    pm1 = pk;
    pk = pnext;
    out[n + 1] = scale_[n + 1] * pk;
  }
  return out;
}

Eigen::MatrixXd BasisFamily::values_on_grid(const QuadratureGrid& grid) const {
  Eigen::MatrixXd out(max_degree_ + 1, grid.size());
  for (int j = 0; j < grid.size(); ++j) out.col(j) = eval_all(grid.nodes()[j]);
  return out;
}

double BasisFamily::sup_norm_bound(int k) const {
  if (k < 0) throw std::invalid_argument("sup_norm_bound: need k >= 0");
  return std::exp(0.5 * log_factorial(d_ - 1) + 0.5 * std::log(2.0 * k + d_) +
                  log_factorial(k + d_ - 1) - log_factorial(k));
}

double mixed_scalar_product(int d, int i, int j, int k, int l) {
  if (d < 2) throw std::invalid_argument("mixed_scalar_product: need d >= 2");
  if (!(1 <= i && i < j && j <= d))
    throw std::invalid_argument("mixed_scalar_product: need 1 <= i < j <= d");
  if (k < 0 || l < 0) throw std::invalid_argument("mixed_scalar_product: need k, l >= 0");
  if (k != l) return 0.0;
  const double log_val =
      0.5 * (log_factorial(j - 1) + log_factorial(d - i) - log_factorial(i - 1) - log_factorial(d - j)) +
      0.5 * (log_factorial(k + d - j) + log_factorial(k + i - 1) - log_factorial(k + d - i) -
             log_factorial(k + j - 1));
  return std::exp(log_val);
}

double CorrelationMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CorrelationMatrix correlation_matrix(int d, int k) {
  if (d < 2) throw std::invalid_argument("correlation_matrix: need d >= 2");
  if (k < 1) throw std::invalid_argument("correlation_matrix: need k >= 1");
  CorrelationMatrix R;
  R.k = k;
  R.d = d;
  R.entries = Eigen::MatrixXd::Identity(d, d);
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      const double v = mixed_scalar_product(d, i, j, k, k);
      R.entries(i - 1, j - 1) = v;
      R.entries(j - 1, i - 1) = v;
    }
  return R;
}

std::vector<double> project_log_component(const std::function<double(double)>& h,
                                          const BasisFamily& family, int m_i,
                                          const QuadratureGrid& grid) {
  if (m_i < 1 || m_i > family.max_degree())
    throw std::invalid_argument("project_log_component: degree out of range");
  const MarginalMeasure mm{family.dim(), family.coordinate()};
  const Eigen::VectorXd hv = grid.tabulate(h);
  const Eigen::MatrixXd phi = family.values_on_grid(grid);
  std::vector<double> beta(m_i);
  for (int k = 1; k <= m_i; ++k)
    beta[k - 1] = integrate_marginal(hv.cwiseProduct(phi.row(k).transpose()), mm, grid);
  return beta;
}

}  // namespace aese

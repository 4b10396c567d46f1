#pragma once

/// \file mle.hpp
/// Maximum-likelihood fitting of the additive exponential series model:
/// empirical moments mu_hat = (1/n) sum phi_m(X^j) and damped-Newton
/// maximization of the strictly concave F(theta) = theta . mu_hat - psi(theta).
/// At the optimum A_m(theta_hat) = mu_hat (moment matching).

#include <Eigen/Dense>

#include "aese/expmodel.hpp"
#include "aese/sample.hpp"

namespace aese {

/// Coordinate-wise sample means of phi_{i,k}(X^j_i). Requires n >= 2.
Eigen::VectorXd empirical_moments(const SimplexSample& s, const ModelIndex& index);

struct FitOptions {
  double grad_tol = 1e-8;      // stop when ||mu - A(theta)||_inf below this
  int max_iterations = 200;
  double armijo_slope = 1e-4;  // sufficient-decrease constant
  double backtrack = 0.5;      // step shrink factor
};

struct FitResult {
  SeriesDensity density;
  double residual = 0.0;  // ||A_m(theta_hat) - mu_hat||_inf
  int iterations = 0;
  bool converged = false;
};

/// Fit by moment matching to the empirical moments of the sample.
FitResult fit(const SimplexSample& s, const ModelIndex& index, const QuadratureGrid& grid,
              const FitOptions& opts = {});

/// Fit to externally supplied moments (synthetic-recovery oracle, information
/// projections). Non-convergence is reported through the flag, never as a
/// silently wrong answer.
FitResult fit_to_moments(const Eigen::VectorXd& mu, const ModelIndex& index,
                         const QuadratureGrid& grid, const FitOptions& opts = {});

/// KL(p || q) for two series densities of equal dimension:
///   E_p[(theta_p - theta_q) . phi] - psi_p + psi_q,
/// with the expectation from the moment map of p (closed form in the
/// exponential family, no extra quadrature beyond the moments).
double kl_between_series(const SeriesDensity& p, const SeriesDensity& q,
                         const QuadratureGrid& grid);

}  // namespace aese

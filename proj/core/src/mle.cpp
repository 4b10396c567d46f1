#include "aese/mle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aese {

Eigen::VectorXd empirical_moments(const SimplexSample& s, const ModelIndex& index) {
  if (s.dim() != index.dim()) throw std::invalid_argument("empirical_moments: dimension mismatch");
  if (s.size() < 2) throw std::invalid_argument("empirical_moments: need n >= 2");
  const int d = index.dim();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(index.total());
  for (int i = 1; i <= d; ++i) {
    BasisFamily fam(d, i, index.degrees[i - 1]);
    const int mi = index.degrees[i - 1];
    const int oi = index.offset(i);
    for (int j = 0; j < s.size(); ++j)
      mu.segment(oi, mi) += fam.eval_all(s.points(j, i - 1)).tail(mi);
  }
  return mu / s.size();
}

namespace {

FitResult newton_fit(const Eigen::VectorXd& mu, const ModelIndex& index,
                     const QuadratureGrid& grid, const FitOptions& opts) {
  const ModelWorkspace ws(index, grid);
  const int M = index.total();
  if (mu.size() != M) throw std::invalid_argument("fit: moment vector length does not match |m|");

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(M);
  double psi = ws.log_normalizer(theta);
  double objective = theta.dot(mu) - psi;

  Eigen::VectorXd grad = mu - ws.moment_map(theta);
  double residual = grad.lpNorm<Eigen::Infinity>();
  int iter = 0;
  bool converged = residual < opts.grad_tol;

  while (!converged && iter < opts.max_iterations) {
    ++iter;
    Eigen::VectorXd step;
    const Eigen::MatrixXd cov = ws.covariance(theta);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    } else {
      step = grad;  // gradient ascent for this iteration
    }
    if (!(grad.dot(step) > 0.0)) {
      step = grad;  // numerically non-ascent Newton direction; fall back
    }

    // Armijo backtracking on F(theta) = theta . mu - psi(theta)
    double t = 1.0;
    bool accepted = false;
    const double directional = grad.dot(step);
    for (int bt = 0; bt < 60; ++bt) {
      const Eigen::VectorXd cand = theta + t * step;
      const double cand_psi = ws.log_normalizer(cand);
      const double cand_obj = cand.dot(mu) - cand_psi;
      if (std::isfinite(cand_obj) && cand_obj >= objective + opts.armijo_slope * t * directional) {
        theta = cand;
        psi = cand_psi;
        objective = cand_obj;
        accepted = true;
        break;
      }
      t *= opts.backtrack;
    }
    if (!accepted) break;  // line search exhausted; report best point found

    grad = mu - ws.moment_map(theta);
    residual = grad.lpNorm<Eigen::Infinity>();
    converged = residual < opts.grad_tol;
  }

  FitResult out{SeriesDensity(index, theta, psi), residual, iter, converged};
  return out;
}

}  // namespace

FitResult fit(const SimplexSample& s, const ModelIndex& index, const QuadratureGrid& grid,
              const FitOptions& opts) {
  return newton_fit(empirical_moments(s, index), index, grid, opts);
}

FitResult fit_to_moments(const Eigen::VectorXd& mu, const ModelIndex& index,
                         const QuadratureGrid& grid, const FitOptions& opts) {
  return newton_fit(mu, index, grid, opts);
}

double kl_between_series(const SeriesDensity& p, const SeriesDensity& q,
                         const QuadratureGrid& grid) {
  if (p.dim() != q.dim()) throw std::invalid_argument("kl_between_series: dimension mismatch");
  const int d = p.dim();
  std::vector<int> degrees(d);
  for (int i = 0; i < d; ++i) degrees[i] = std::max(p.index().degrees[i], q.index().degrees[i]);
  const ModelIndex ext(degrees);

  auto embed = [&](const SeriesDensity& f) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(ext.total());
    for (int i = 1; i <= d; ++i)
      t.segment(ext.offset(i), f.index().degrees[i - 1]) =
          f.theta().segment(f.index().offset(i), f.index().degrees[i - 1]);
    return t;
  };

  const ModelWorkspace ws(p.index(), grid);
  const Eigen::VectorXd moments = ws.moment_map_extended(p.theta(), ext);
  return (embed(p) - embed(q)).dot(moments) - p.log_norm() + q.log_norm();
}

}  // namespace aese

#pragma once

/// \file metrics.hpp
/// Scoring of estimators against the true density: Kullback-Leibler and L2
/// distances by simplex quadrature, and the truncated Gaussian kernel
/// baseline with Scott's-rule bandwidths.

#include <Eigen/Dense>
#include <span>

#include "aese/expmodel.hpp"
#include "aese/quadrature.hpp"
#include "aese/sample.hpp"

namespace aese {

/// A scoreable density on the ordered simplex. log_unconstrained is the
/// smooth extension used by the quadrature rules (they interpolate slightly
/// across the diagonal); it must agree with log_density on the simplex.
class Density {
 public:
  virtual ~Density() = default;
  virtual int dim() const = 0;
  virtual double log_density(std::span<const double> x) const = 0;
  virtual double log_unconstrained(std::span<const double> x) const = 0;

  /// log_unconstrained on the full tensor grid of the rule (entry (a,b) is the
  /// point (t_a, t_b)); estimators with structure may override this with a
  /// fast path. Only entries with inner panel <= outer panel are ever used.
  virtual Eigen::MatrixXd log_on_grid(const TriangleRule& rule) const;
};

/// Non-owning view over any type with the three density members.
template <class T>
class DensityRef final : public Density {
 public:
  explicit DensityRef(const T& ref) : p_(&ref) {}
  int dim() const override { return p_->dim(); }
  double log_density(std::span<const double> x) const override { return p_->log_density(x); }
  double log_unconstrained(std::span<const double> x) const override {
    return p_->log_unconstrained(x);
  }

 private:
  const T* p_;
};

template <class T>
DensityRef<T> as_density(const T& ref) {
  return DensityRef<T>(ref);
}

/// KL(p || q) = int p log(p/q) over the simplex, d = 2 rule. Clamped at zero
/// from below within -1e-10; +infinity when q vanishes where p does not.
double kl_divergence(const Density& p, const Density& q, const TriangleRule& rule);
/// d >= 3 variant on a (coarse) grid via recursive nested quadrature.
double kl_divergence(const Density& p, const Density& q, const QuadratureGrid& grid, int d);

/// sqrt( int (p - q)^2 ) over the simplex.
double l2_distance(const Density& p, const Density& q, const TriangleRule& rule);
double l2_distance(const Density& p, const Density& q, const QuadratureGrid& grid, int d);

/// int q over the simplex (normalization check of a scored density).
double simplex_mass(const Density& q, const TriangleRule& rule);

/// Truncated Gaussian product-kernel estimate: bandwidths h_i = sigma_i *
/// n^{-1/(d+4)} (Scott's rule on the observed, truncated sample), kernel
/// mixture renormalized over the simplex.
class KernelEstimate final : public Density {
 public:
  KernelEstimate(const SimplexSample& s, const QuadratureGrid& grid);

  int dim() const override { return static_cast<int>(pts_.cols()); }
  const Eigen::VectorXd& bandwidths() const { return h_; }
  /// Mass of the raw kernel mixture on the simplex.
  double truncation_mass() const { return c_; }

  double log_density(std::span<const double> x) const override;
  double log_unconstrained(std::span<const double> x) const override;
  Eigen::MatrixXd log_on_grid(const TriangleRule& rule) const override;

 private:
  double log_raw(std::span<const double> x) const;  // log of the unrenormalized mixture

  RowMatrixXd pts_;
  Eigen::VectorXd h_;
  double c_ = 1.0;
  double log_c_ = 0.0;
};

/// Fits the kernel baseline; throws when a coordinate has zero variance.
KernelEstimate kernel_fit(const SimplexSample& s, const QuadratureGrid& grid);

/// Scores several estimators against one truth without re-evaluating the
/// truth per estimator (d = 2).
class TriangleScorer {
 public:
  TriangleScorer(const Density& truth, const TriangleRule& rule);
  // the scorer keeps a reference to the rule
  TriangleScorer(const Density&, TriangleRule&&) = delete;

  struct Scores {
    double kl = 0.0;
    double ise = 0.0;  // integrated squared error int (p - q)^2; l2 = sqrt(ise)
  };
  Scores score(const Density& estimator) const;

 private:
  const TriangleRule* rule_;
  Eigen::MatrixXd truth_log_;
  Eigen::MatrixXd truth_;  // exp of the above
};

}  // namespace aese

#pragma once

/// \file aggregate.hpp
/// Adaptive estimation by convex aggregation of fitted log-densities.
/// Candidates f_m are fitted on one part of the sample; weights lambda over
/// the probability simplex are chosen on the held-out part by maximizing the
/// penalized criterion
///   H(lambda) = mean log-likelihood(lambda) - psi_lambda - pen(lambda)/2,
///   pen(lambda) = sum_m lambda_m KL(f_lambda || f_m)
///               = sum_m lambda_m psi_m - psi_lambda,
/// which makes H concave in lambda. The aggregate itself is a series density
/// with blended coefficients theta_lambda = sum_m lambda_m theta_m embedded
/// in the enclosing index.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "aese/expmodel.hpp"
#include "aese/sample.hpp"

namespace aese {

/// Candidate degrees {floor(n^{1/(2(d+j)+1)}) : 1 <= j <= N_n}, deduplicated;
/// every candidate is the constant index m = (v, ..., v).
struct CandidateGrid {
  int d = 2;
  std::vector<int> degrees;  // ascending, unique

  std::vector<ModelIndex> indices() const;
};

CandidateGrid build_candidates(int n, int d, int N_n);

/// Seeded-shuffle prefix split into sizes (floor(ce*n), rest). Both parts
/// must end up with at least two points.
std::pair<SimplexSample, SimplexSample> split_sample(const SimplexSample& s, double ce,
                                                     uint64_t seed);

/// The fitted aggregate: candidate densities, weights in the probability
/// simplex, and the blended density (union index, theta_lambda, psi_lambda).
class AggregateDensity {
 public:
  AggregateDensity(std::vector<SeriesDensity> candidates, Eigen::VectorXd lambda,
                   const QuadratureGrid& grid);

  const std::vector<SeriesDensity>& candidates() const { return candidates_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  const SeriesDensity& blended() const { return blended_; }
  double log_norm() const { return blended_.log_norm(); }
  int dim() const { return blended_.dim(); }

  double log_density(std::span<const double> x) const { return blended_.log_density(x); }
  double log_unconstrained(std::span<const double> x) const {
    return blended_.log_unconstrained(x);
  }

  /// Candidate records in the series format plus a `lambda` line; the loader
  /// recomputes psi_lambda on its own grid.
  void save(std::ostream& os) const;
  static AggregateDensity load(std::istream& is, const QuadratureGrid& grid);

 private:
  std::vector<SeriesDensity> candidates_;
  Eigen::VectorXd lambda_;
  SeriesDensity blended_;
};

/// Smallest index enclosing every candidate (coordinate-wise max of degrees).
ModelIndex union_index(const std::vector<SeriesDensity>& candidates);

/// theta of candidate c embedded into the union index (zero padding).
Eigen::VectorXd embed_theta(const SeriesDensity& f, const ModelIndex& ext);

/// psi_lambda = log int exp(sum_m lambda_m l_m) over the simplex.
double aggregate_log_norm(const std::vector<SeriesDensity>& candidates,
                          const Eigen::VectorXd& lambda, const QuadratureGrid& grid);

/// pen(lambda) = sum_m lambda_m psi_m - psi_lambda (>= 0 by convexity of psi).
double penalty(const std::vector<SeriesDensity>& candidates, const Eigen::VectorXd& lambda,
               const QuadratureGrid& grid);

/// H(lambda) on the held-out part.
double criterion_H(const std::vector<SeriesDensity>& candidates, const Eigen::VectorXd& lambda,
                   const SimplexSample& part2, const QuadratureGrid& grid);

struct AggregateOptions {
  double step = 0.5;    // initial mirror-ascent step, halved on non-improvement
  double tol = 1e-9;    // stop when max |lambda change| below this
  int max_iterations = 5000;
};

struct WeightSelection {
  AggregateDensity density;
  double criterion = 0.0;  // H at the selected weights
  int iterations = 0;
  bool converged = false;  // best iterate is returned either way
};

/// Maximizes H over the probability simplex by entropic mirror ascent
/// (multiplicative weights) from the uniform start; the returned weights are
/// also checked against every single-candidate indicator so the selection
/// never trails the best individual model.
WeightSelection select_weights(const std::vector<SeriesDensity>& candidates,
                               const SimplexSample& part2, const QuadratureGrid& grid,
                               const AggregateOptions& opts = {});

}  // namespace aese

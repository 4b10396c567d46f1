#pragma once

/// \file truncmodel.hpp
/// Ground truth for the random truncation model: independent coordinates
/// Z_i ~ p_i observed only when 0 <= Z_1 <= ... <= Z_d <= 1, whose joint
/// density is f0(x) = (1/alpha) prod_i p_i(x_i) on the ordered simplex with
/// alpha the acceptance mass.

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aese/quadrature.hpp"
#include "aese/rng.hpp"
#include "aese/sample.hpp"

namespace aese {

struct NormalSpec {
  double mu = 0.0;
  double var = 1.0;  // variance, not standard deviation
};

struct NormalMixSpec {
  double mu1 = 0.0, var1 = 1.0;
  double mu2 = 0.0, var2 = 1.0;
  double w = 0.5;  // weight of the first component, in (0, 1]
};

/// Shifted Beta on (a, b) with density
/// (t-a)^{alpha-1} (b-t)^{beta-alpha-1} / ((b-a)^{beta-1} B(alpha, beta-alpha)).
struct BetaSpec {
  double alpha = 1.0, beta = 2.0;  // 0 < alpha < beta
  double a = -1.0, b = 2.0;        // a < 0 < 1 < b
};

struct GumbelSpec {
  double alpha = 1.0;  // > 0
  double beta = 0.0;
};

struct UniformSpec {};

/// One marginal family; parameters are validated at construction, never at
/// evaluation.
class MarginalSpec {
 public:
  using Variant = std::variant<NormalSpec, NormalMixSpec, BetaSpec, GumbelSpec, UniformSpec>;

  MarginalSpec(Variant v);  // NOLINT: implicit by design

  double pdf(double t) const;
  double log_pdf(double t) const;  // -inf where the density vanishes
  double sample(Rng& rng) const;

  const Variant& value() const { return v_; }

  /// Text forms like "normal:0.8,0.2", "normalmix:0.2,0.1,0.6,0.1,0.5",
  /// "beta:1,6,-1,2", "gumbel:4,0.3", "uniform".
  static MarginalSpec parse(const std::string& text);
  std::string to_string() const;

 private:
  Variant v_;
};

struct TruncationModel {
  std::vector<MarginalSpec> marginals;
  double alpha = 1.0;      // acceptance mass of the ordering constraint
  double log_alpha = 0.0;

  int dim() const { return static_cast<int>(marginals.size()); }
  /// sum_i log p_i(x_i) - log alpha on the simplex, -inf off it.
  double true_log_density(std::span<const double> x) const;
  double log_density(std::span<const double> x) const { return true_log_density(x); }
  /// Same without the simplex indicator (still -inf where some p_i = 0).
  double log_unconstrained(std::span<const double> x) const;
};

/// Computes alpha by nested quadrature of prod p_i over the simplex.
/// Throws if the truncation region carries negligible mass (< 1e-12).
TruncationModel build_model(std::vector<MarginalSpec> specs, const QuadratureGrid& grid);

struct SampleStats {
  long proposals = 0;
  int accepted = 0;
  double acceptance_rate() const { return proposals > 0 ? double(accepted) / proposals : 0.0; }
};

/// Rejection sampling: draw independent Z_i ~ p_i, accept when the tuple is
/// ordered and inside [0,1]^d; deterministic given the seed. Throws if 1e7
/// proposals are exhausted before n accepts.
SimplexSample sample(const TruncationModel& model, int n, uint64_t seed,
                     SampleStats* stats = nullptr);

}  // namespace aese

#pragma once

/// \file jacobi.hpp
/// Jacobi polynomials P_k^{(alpha,beta)} on [-1,1], orthogonal against the
/// weight (1-t)^alpha (1+t)^beta.

namespace aese {

struct JacobiParams {
  double alpha;  // > -1
  double beta;   // > -1
};

/// P_k^{(alpha,beta)}(t) by the standard three-term recurrence.
/// Throws std::domain_error if t is outside [-1, 1].
double jacobi_eval(const JacobiParams& p, int k, double t);

/// int_{-1}^{1} P_k^2 (1-t)^alpha (1+t)^beta dt
/// = 2^{a+b+1}/(2k+a+b+1) * Gamma(k+a+1)Gamma(k+b+1)/(Gamma(k+a+b+1) k!).
double jacobi_squared_norm(const JacobiParams& p, int k);

}  // namespace aese

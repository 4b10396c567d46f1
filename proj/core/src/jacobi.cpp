#include "aese/jacobi.hpp"

#include <cmath>
#include <stdexcept>

namespace aese {

double jacobi_eval(const JacobiParams& p, int k, double t) {
  if (k < 0) throw std::invalid_argument("jacobi_eval: need k >= 0");
  if (p.alpha <= -1.0 || p.beta <= -1.0)
    throw std::invalid_argument("jacobi_eval: need alpha, beta > -1");
  if (t < -1.0 || t > 1.0) throw std::domain_error("jacobi_eval: t outside [-1, 1]");

  const double a = p.alpha, b = p.beta;
  double pm1 = 1.0;
  if (k == 0) return pm1;
  double pk = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * t;
  for (int n = 1; n < k; ++n) {
    const double c1 = 2.0 * (n + 1.0) * (n + a + b + 1.0) * (2.0 * n + a + b);
    const double c2 = (2.0 * n + a + b + 1.0) * (a * a - b * b);
    const double c3 = (2.0 * n + a + b) * (2.0 * n + a + b + 1.0) * (2.0 * n + a + b + 2.0);
    const double c4 = 2.0 * (n + a) * (n + b) * (2.0 * n + a + b + 2.0);
    const double pnext = ((c2 + c3 * t) * pk - c4 * pm1) / c1;
    pm1 = pk;
    pk = pnext;
  }
  return pk;
}

double jacobi_squared_norm(const JacobiParams& p, int k) {
  if (k < 0) throw std::invalid_argument("jacobi_squared_norm: need k >= 0");
  const double a = p.alpha, b = p.beta;
  return std::exp((a + b + 1.0) * std::log(2.0) - std::log(2.0 * k + a + b + 1.0) +
                  std::lgamma(k + a + 1.0) + std::lgamma(k + b + 1.0) -
                  std::lgamma(k + a + b + 1.0) - std::lgamma(k + 1.0));
}

}  // namespace aese

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aese/basis.hpp"
#include "aese/jacobi.hpp"
#include "aese/quadrature.hpp"

using namespace aese;

namespace {

// Quadrature of P_k^2 against the Jacobi weight, for cross-checking norms.
double byquad_generic(double a, double b, int k) {
  const aese::GaussRule gj = aese::GaussRule::jacobi(k + 4, a, b);
  double acc = 0.0;
  for (int j = 0; j < gj.nodes.size(); ++j) {
    const double v = aese::jacobi_eval({a, b}, k, gj.nodes[j]);
    acc += gj.weights[j] * v * v;
  }
  return acc;
}

// Independent oracle for small degrees: the binomial-sum expansion
//   P_k^{(a,b)}(t) = sum_s C(k+a, k-s) C(k+b, s) ((t-1)/2)^s ((t+1)/2)^{k-s},
// the polynomial Rodrigues' formula produces.
double jacobi_expansion(double a, double b, int k, double t) {
  auto gbinom = [](double x, int j) {
    return std::exp(std::lgamma(x + 1.0) - std::lgamma(j + 1.0) - std::lgamma(x - j + 1.0));
  };
  double acc = 0.0;
  for (int s = 0; s <= k; ++s)
    acc += gbinom(k + a, k - s) * gbinom(k + b, s) * std::pow((t - 1.0) / 2.0, s) *
           std::pow((t + 1.0) / 2.0, k - s);
  return acc;
}

}  // namespace

TEST_CASE("degree zero and one Jacobi polynomials") {
  CHECK(jacobi_eval({1.0, 0.0}, 0, 0.3) == 1.0);
  CHECK(jacobi_eval({1.0, 0.0}, 1, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  for (double t : {-1.0, -0.25, 0.4, 0.9})
    CHECK(jacobi_eval({1.0, 0.0}, 1, t) == doctest::Approx((3.0 * t + 1.0) / 2.0).epsilon(1e-15));
  CHECK_THROWS_AS(jacobi_eval({1.0, 0.0}, 1, 1.5), std::domain_error);
}

TEST_CASE("recurrence agrees with the symbolic expansion for k <= 3") {
  const double params[3][2] = {{1.0, 0.0}, {2.0, 1.0}, {0.5, -0.3}};
  for (const auto& p : params)
    for (int k = 0; k <= 3; ++k)
      for (double t : {-0.9, -0.3, 0.0, 0.5, 0.95}) {
        const double expect = jacobi_expansion(p[0], p[1], k, t);
        CHECK(jacobi_eval({p[0], p[1]}, k, t) == doctest::Approx(expect).epsilon(1e-12));
      }
}

TEST_CASE("squared norms match the closed form and quadrature") {
  // int ((3t+1)/2)^2 (1-t) dt over [-1,1] = 1 by direct expansion, and the
  // closed form 2^{a+b+1}/(2k+a+b+1) * G(k+a+1)G(k+b+1)/(G(k+a+b+1) k!) = 4/4.
  CHECK(jacobi_squared_norm({1.0, 0.0}, 1) == doctest::Approx(1.0).epsilon(1e-14));
  const GaussRule gj = GaussRule::jacobi(8, 1.0, 0.0);
  double byquad = 0.0;
  for (int j = 0; j < gj.nodes.size(); ++j) {
    const double v = jacobi_eval({1.0, 0.0}, 1, gj.nodes[j]);
    byquad += gj.weights[j] * v * v;
  }
  CHECK(byquad == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(jacobi_squared_norm({2.0, 0.0}, 1) == doctest::Approx(byquad_generic(2.0, 0.0, 1)).epsilon(1e-12));
}

TEST_CASE("the degree-zero members are the constant sqrt(d!)") {
  const BasisFamily b21(2, 1, 0);
  CHECK(b21.eval(0, 0.123) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  for (int d = 2; d <= 5; ++d)
    for (int i = 1; i <= d; ++i) {
      const BasisFamily fam(d, i, 0);
      CHECK(fam.eval(0, 0.42) == doctest::Approx(std::sqrt(std::tgamma(d + 1.0))).epsilon(1e-13));
    }
  CHECK_THROWS_AS(b21.eval(0, -0.1), std::domain_error);
}

TEST_CASE("orthonormality against the marginal measure (d=3, i=2, k,l <= 8)") {
  const int d = 3, i = 2, kmax = 8;
  const BasisFamily fam(d, i, kmax);
  const auto [nodes, weights] = marginal_gauss_rule(d, i, kmax + 2);
  for (int k = 0; k <= kmax; ++k)
    for (int l = k; l <= kmax; ++l) {
      double acc = 0.0;
      for (int j = 0; j < nodes.size(); ++j)
        acc += weights[j] * fam.eval(k, nodes[j]) * fam.eval(l, nodes[j]);
      CHECK(std::abs(acc - (k == l ? 1.0 : 0.0)) < 1e-10);
    }
}

TEST_CASE("sup-norm bound holds on a dense point grid") {
  for (int d = 2; d <= 4; ++d)
    for (int i = 1; i <= d; ++i) {
      const BasisFamily fam(d, i, 12);
      for (int k = 0; k <= 12; ++k) {
        const double bound = fam.sup_norm_bound(k);
        double worst = 0.0;
        for (int j = 0; j <= 1000; ++j) worst = std::max(worst, std::abs(fam.eval(k, j / 1000.0)));
        CHECK(worst <= bound * (1.0 + 1e-12));
      }
    }
}

TEST_CASE("mixed scalar products: off-degree vanish, closed form, range") {
  CHECK(mixed_scalar_product(2, 1, 2, 1, 2) == 0.0);
  CHECK(mixed_scalar_product(2, 1, 2, 1, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(mixed_scalar_product(2, 2, 1, 1, 1), std::invalid_argument);
  for (int d = 2; d <= 5; ++d)
    for (int i = 1; i < d; ++i)
      for (int j = i + 1; j <= d; ++j)
        for (int k = 0; k <= 10; ++k) {
          const double v = mixed_scalar_product(d, i, j, k, k);
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
}

TEST_CASE("mixed scalar products match two-dimensional quadrature over the triangle") {
  // Oracle: int over {t <= s} of phi_{i,k}(t) phi_{j,k}(s) w_ij(t,s), with the
  // pair marginal w_ij of Lebesgue measure on the simplex.
  // The integrand must be its smooth extension (integer powers, no clamping
  // at the diagonal) or the rule's within-panel interpolation degrades.
  const QuadratureGrid grid(64, 10);
  const TriangleRule rule(grid);
  for (int d = 2; d <= 4; ++d)
    for (int i = 1; i < d; ++i)
      for (int j = i + 1; j <= d; ++j) {
        const BasisFamily fi(d, i, 8), fj(d, j, 8);
        const double scale = std::exp(-std::lgamma(static_cast<double>(i)) -
                                      std::lgamma(static_cast<double>(j - i)) -
                                      std::lgamma(d - j + 1.0));
        for (int k = 1; k <= 8; k += (d + k > 6 ? 3 : 1)) {
          auto integrand = [&](double t, double s) {
            return fi.eval(k, t) * fj.eval(k, s) * scale * std::pow(t, i - 1) *
                   std::pow(s - t, j - i - 1) * std::pow(1.0 - s, d - j);
          };
          const double byquad = rule.integrate(integrand);
          CHECK(std::abs(byquad - mixed_scalar_product(d, i, j, k, k)) < 1e-8);
        }
      }
}

TEST_CASE("correlation matrices: entries, spectrum, uniform lower bound") {
  const CorrelationMatrix r21 = correlation_matrix(2, 1);
  CHECK(r21.entries(0, 0) == 1.0);
  CHECK(r21.entries(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r21.entries);
  CHECK(es.eigenvalues()[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(es.eigenvalues()[1] == doctest::Approx(1.5).epsilon(1e-13));

  CHECK(correlation_matrix(3, 2).min_eigenvalue() == doctest::Approx(0.5).epsilon(1e-12));

  for (int d = 2; d <= 5; ++d)
    for (int k = 1; k <= 20; k += 4) {
      const double lam = correlation_matrix(d, k).min_eigenvalue();
      CHECK(std::abs(lam - double(k) / (k + d - 1)) < 1e-10);
      CHECK(lam >= 1.0 / d - 1e-12);
    }
}

TEST_CASE("exploratory: conjectured full spectrum (diagnostic only)") {
  // Not a contract; logged as a warning if it ever drifts.
  for (int d : {3, 4})
    for (int k : {1, 3, 7}) {
      const CorrelationMatrix R = correlation_matrix(d, k);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R.entries, Eigen::EigenvaluesOnly);
      for (int i = 1; i <= d; ++i) {
        const double conj = double(k) * (k + d) / (double(k + i) * (k + i - 1));
        WARN_MESSAGE(std::abs(es.eigenvalues()[d - i] - conj) < 1e-9,
                     "conjectured eigenvalue formula off for d=", d, " k=", k, " i=", i);
      }
    }
}

TEST_CASE("linear combinations satisfy the norm sandwich") {
  const QuadratureGrid grid(32, 10);
  std::mt19937_64 eng(7);
  std::normal_distribution<double> gauss;
  for (int d : {2, 3}) {
    const int mi = 3;
    std::vector<BasisFamily> fams;
    for (int i = 1; i <= d; ++i) fams.emplace_back(d, i, mi);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd theta(d * mi);
      for (int c = 0; c < theta.size(); ++c) theta[c] = gauss(eng);
      auto combo = [&](const double* x) {
        double acc = 0.0;
        for (int i = 0; i < d; ++i)
          for (int k = 1; k <= mi; ++k) acc += theta[i * mi + k - 1] * fams[i].eval(k, x[i]);
        return acc * acc;
      };
      const double l2 = std::sqrt(simplex_integrate(d, combo, grid));
      CHECK(l2 >= theta.norm() / std::sqrt(double(d)) * (1.0 - 1e-10));
      CHECK(l2 <= theta.norm() * std::sqrt(double(d)) * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("projection of log components") {
  const QuadratureGrid grid(32, 10);
  const int d = 3, i = 2;
  const BasisFamily fam(d, i, 8);

  SUBCASE("a basis member projects to a unit coefficient") {
    const auto beta = project_log_component([&](double t) { return fam.eval(3, t); }, fam, 6, grid);
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(beta[k - 1] - (k == 3 ? 1.0 : 0.0)) < 1e-10);
  }
  SUBCASE("constants are orthogonal to every member of positive degree") {
    const auto beta = project_log_component([](double) { return 4.2; }, fam, 6, grid);
    for (double b : beta) CHECK(std::abs(b) < 1e-12);
  }
  SUBCASE("smooth functions have tails controlled by the Sobolev factor") {
    // h = sin(2 pi t), r = 2 derivatives; tail bound
    //   2^{-2r} (m+1-r)! (m+d)! / ((m+1)! (m+d+r)!) * ||h''||^2.
    const MarginalMeasure mm{d, i};
    auto h = [](double t) { return std::sin(2.0 * std::numbers::pi * t); };
    auto hpp = [](double t) {
      const double w = 2.0 * std::numbers::pi;
      return -w * w * std::sin(w * t);
    };
    const double h2 = integrate_marginal([&](double t) { return h(t) * h(t); }, mm, grid);
    const double d2 = integrate_marginal([&](double t) { return hpp(t) * hpp(t); }, mm, grid);
    const int r = 2;
    for (int m = 2; m <= 8; ++m) {
      const auto beta = project_log_component(h, fam, m, grid);
      const double beta0 =
          integrate_marginal([&](double t) { return h(t) * fam.eval(0, t); }, mm, grid);
      double captured = beta0 * beta0;
      for (double b : beta) captured += b * b;
      const double tail2 = h2 - captured;
      const double factor =
          std::exp(-2.0 * r * std::log(2.0) + std::lgamma(m + 2.0 - r) + std::lgamma(m + d + 1.0) -
                   std::lgamma(m + 2.0) - std::lgamma(m + d + r + 1.0));
      CHECK(tail2 <= factor * d2 * (1.0 + 1e-9) + 1e-15);
    }
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aese/bench.hpp"
#include "aese/metrics.hpp"
#include "aese/truncmodel.hpp"

using namespace aese;

TEST_CASE("marginal densities match their formulas") {
  const MarginalSpec n01(NormalSpec{0.0, 1.0});
  CHECK(n01.pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));

  const MarginalSpec b(BetaSpec{1.0, 6.0, -1.0, 2.0});
  CHECK(b.pdf(2.0) == 0.0);
  CHECK(b.pdf(-1.0) == 0.0);
  // direct form 5 (2-t)^4 / 243 on (-1, 2)
  for (double t : {0.0, 0.3, 0.9}) {
    CHECK(b.pdf(t) == doctest::Approx(5.0 * std::pow(2.0 - t, 4) / 243.0).epsilon(1e-12));
  }

  const MarginalSpec mix1(NormalMixSpec{0.3, 0.2, -4.0, 9.0, 1.0});
  const MarginalSpec pure(NormalSpec{0.3, 0.2});
  for (double t : {-0.5, 0.0, 0.4, 1.2})
    CHECK(mix1.pdf(t) == doctest::Approx(pure.pdf(t)).epsilon(1e-14));

  const MarginalSpec gum(GumbelSpec{4.0, 0.3});
  const double z = 4.0 * (0.5 - 0.3);
  CHECK(gum.pdf(0.5) == doctest::Approx(4.0 * std::exp(-z - std::exp(-z))).epsilon(1e-14));

  CHECK(MarginalSpec(UniformSpec{}).pdf(0.4) == 1.0);
  CHECK(MarginalSpec(UniformSpec{}).pdf(1.4) == 0.0);
}

TEST_CASE("invalid marginal parameters are rejected at construction") {
  CHECK_THROWS_AS(MarginalSpec(NormalSpec{0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec(BetaSpec{3.0, 2.0, -1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec(BetaSpec{1.0, 2.0, 0.5, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec(NormalMixSpec{0, 1, 0, 1, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(MarginalSpec(NormalMixSpec{0, 1, 0, 1, 1.0}));
  CHECK_THROWS_AS(MarginalSpec(GumbelSpec{0.0, 0.3}), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec::parse("beta:1,6"), std::invalid_argument);
  CHECK_THROWS_AS(MarginalSpec::parse("cauchy:0,1"), std::invalid_argument);
}

TEST_CASE("marginal text forms round-trip") {
  for (const char* text : {"uniform", "normal:0.8,0.2", "normalmix:0.2,0.1,0.6,0.1,0.5",
                           "beta:1,6,-1,2", "gumbel:4,0.3"}) {
    const MarginalSpec m = MarginalSpec::parse(text);
    const MarginalSpec back = MarginalSpec::parse(m.to_string());
    for (double t : {0.1, 0.5, 0.9}) CHECK(back.pdf(t) == m.pdf(t));
  }
}

TEST_CASE("acceptance mass: uniform volumes and normalized truth densities") {
  const QuadratureGrid grid(32, 10);
  const TruncationModel u2 =
      build_model({MarginalSpec(UniformSpec{}), MarginalSpec(UniformSpec{})}, grid);
  CHECK(u2.alpha == doctest::Approx(0.5).epsilon(1e-12));
  const TruncationModel u3 = build_model(std::vector<MarginalSpec>(3, MarginalSpec(UniformSpec{})), grid);
  CHECK(u3.alpha == doctest::Approx(1.0 / 6.0).epsilon(1e-12));

  const TriangleRule rule(grid);
  for (const char* name : {"beta", "gumbel", "normal_mix"}) {
    const TruncationModel model = build_model(builtin_model(name), grid);
    CHECK(model.alpha > 0.0);
    CHECK(simplex_mass(as_density(model), rule) == doctest::Approx(1.0).epsilon(1e-8));
  }

  // negligible truncation mass is a model error
  CHECK_THROWS_AS(build_model({MarginalSpec(NormalSpec{-80.0, 0.01}), MarginalSpec(UniformSpec{})}, grid),
                  std::runtime_error);
}

TEST_CASE("true log density: uniform values, off-simplex, additivity exchange") {
  const QuadratureGrid grid(32, 10);
  const TruncationModel u2 =
      build_model({MarginalSpec(UniformSpec{}), MarginalSpec(UniformSpec{})}, grid);
  const double on[2] = {0.2, 0.7}, off[2] = {0.7, 0.2};
  CHECK(u2.true_log_density(std::span<const double>(on, 2)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(u2.true_log_density(std::span<const double>(off, 2)) ==
        -std::numeric_limits<double>::infinity());

  const TruncationModel beta = build_model(builtin_model("beta"), grid);
  const double x[2] = {0.1, 0.5}, y[2] = {0.3, 0.9}, xp[2] = {0.1, 0.9}, yp[2] = {0.3, 0.5};
  const double lhs = beta.true_log_density(std::span<const double>(x, 2)) +
                     beta.true_log_density(std::span<const double>(y, 2));
  const double rhs = beta.true_log_density(std::span<const double>(xp, 2)) +
                     beta.true_log_density(std::span<const double>(yp, 2));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("sampling: determinism, ordering, acceptance band") {
  const QuadratureGrid grid(32, 10);
  const TruncationModel u2 =
      build_model({MarginalSpec(UniformSpec{}), MarginalSpec(UniformSpec{})}, grid);

  SampleStats st1, st2;
  const SimplexSample a = sample(u2, 2000, 123, &st1);
  const SimplexSample b = sample(u2, 2000, 123, &st2);
  CHECK((a.points - b.points).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(st1.proposals == st2.proposals);

  for (int j = 0; j < a.size(); ++j) {
    CHECK(a.points(j, 0) >= 0.0);
    CHECK(a.points(j, 0) <= a.points(j, 1));
    CHECK(a.points(j, 1) <= 1.0);
  }

  // acceptance rate within four binomial standard deviations of alpha = 1/2
  const double rate = st1.acceptance_rate();
  const double sigma = std::sqrt(0.25 / st1.proposals);
  CHECK(std::abs(rate - 0.5) <= 4.0 * sigma);

  const SimplexSample c = sample(u2, 2000, 124);
  CHECK((a.points - c.points).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("starved rejection sampling raises a sampling error") {
  const QuadratureGrid grid(64, 10);
  // first coordinate has ~1e-7 of its mass below 1, so accepts are vanishingly rare
  const TruncationModel starved =
      build_model({MarginalSpec(NormalSpec{1.53, 0.01}), MarginalSpec(UniformSpec{})}, grid);
  CHECK_THROWS_WITH_AS(sample(starved, 200, 5), doctest::Contains("proposals"),
                       std::runtime_error);
}

TEST_CASE("first-coordinate margin passes a Kolmogorov-Smirnov test at the 1% level") {
  const QuadratureGrid grid(64, 10);
  const TruncationModel beta = build_model(builtin_model("beta"), grid);
  const int n = 10000;
  const SimplexSample s = sample(beta, n, 777);

  // quadrature CDF of the first margin: F(t) = int_0^t p1(u) S2(u) du / alpha
  const Eigen::VectorXd p1v = grid.tabulate([&](double t) { return beta.marginals[0].pdf(t); });
  const Eigen::VectorXd p2v = grid.tabulate([&](double t) { return beta.marginals[1].pdf(t); });
  const Eigen::VectorXd s2 = grid.suffix(p2v);
  const Eigen::VectorXd integrand = p1v.cwiseProduct(s2);

  const int q = grid.nodes_per_panel();
  std::vector<double> panel_prefix(grid.panels() + 1, 0.0);
  for (int p = 0; p < grid.panels(); ++p) {
    double acc = 0.0;
    for (int l = 0; l < q; ++l) acc += grid.weights()[p * q + l] * integrand[p * q + l];
    panel_prefix[p + 1] = panel_prefix[p] + acc;
  }
  auto cdf = [&](double t) {
    const int p = grid.panel_of(t);
    const double partial =
        grid.partial_from_panel_start(p, t, integrand.segment(p * q, q));
    return (panel_prefix[p] + partial) / beta.alpha;
  };

  std::vector<double> x1(n);
  for (int j = 0; j < n; ++j) x1[j] = s.points(j, 0);
  std::sort(x1.begin(), x1.end());
  double ks = 0.0;
  for (int j = 0; j < n; ++j) {
    const double F = cdf(x1[j]);
    ks = std::max(ks, std::max(std::abs(F - double(j) / n), std::abs(F - double(j + 1) / n)));
  }
  CHECK(ks < 1.63 / std::sqrt(double(n)));
}

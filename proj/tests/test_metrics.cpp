#include <doctest.h>

#include <cmath>
#include <random>

#include "aese/bench.hpp"
#include "aese/metrics.hpp"
#include "aese/mle.hpp"

using namespace aese;

namespace {

Eigen::VectorXd random_theta(int size, double scale, uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd t(size);
  for (int c = 0; c < size; ++c) t[c] = gauss(eng);
  if (t.norm() > scale) t *= scale / t.norm();
  return t;
}

}  // namespace

TEST_CASE("kl divergence: identity, Gibbs, closed-form against the uniform") {
  const QuadratureGrid grid(64, 10);
  const TriangleRule rule(grid);
  const TruncationModel beta = build_model(builtin_model("beta"), grid);
  CHECK(std::abs(kl_divergence(as_density(beta), as_density(beta), rule)) < 1e-10);

  const ModelIndex m({3, 3});
  const SeriesDensity uniform = make_series_density(m, Eigen::VectorXd::Zero(6), grid);
  const SeriesDensity ftheta = make_series_density(m, random_theta(6, 2.0, 5), grid);
  CHECK(kl_divergence(as_density(uniform), as_density(ftheta), rule) ==
        doctest::Approx(ftheta.log_norm() + std::log(2.0)).epsilon(1e-7));

  for (uint64_t seed = 0; seed < 4; ++seed) {
    const SeriesDensity a = make_series_density(m, random_theta(6, 2.0, 10 + 2 * seed), grid);
    const SeriesDensity b = make_series_density(m, random_theta(6, 2.0, 11 + 2 * seed), grid);
    CHECK(kl_divergence(as_density(a), as_density(b), rule) >= 0.0);
  }
}

namespace {

// A density vanishing on the upper half of the simplex, for the infinite-KL path.
struct HalfDensity final : Density {
  int dim() const override { return 2; }
  double log_unconstrained(std::span<const double> x) const override {
    return x[1] > 0.5 ? -std::numeric_limits<double>::infinity() : std::log(8.0 / 3.0);
  }
  double log_density(std::span<const double> x) const override {
    return on_simplex(x) ? log_unconstrained(x) : -std::numeric_limits<double>::infinity();
  }
};

}  // namespace

TEST_CASE("vanishing estimators on supported regions give infinite KL") {
  const QuadratureGrid grid(32, 8);
  const TriangleRule rule(grid);
  const TruncationModel uni =
      build_model({MarginalSpec(UniformSpec{}), MarginalSpec(UniformSpec{})}, grid);
  const HalfDensity half;
  CHECK(kl_divergence(as_density(uni), half, rule) ==
        std::numeric_limits<double>::infinity());
  // the reverse direction stays finite
  CHECK(std::isfinite(kl_divergence(half, as_density(uni), rule)));
}

TEST_CASE("l2 distance: identity, symmetry, triangle inequality") {
  const QuadratureGrid grid(48, 10);
  const TriangleRule rule(grid);
  const ModelIndex m({3, 3});
  const SeriesDensity p = make_series_density(m, random_theta(6, 2.0, 21), grid);
  const SeriesDensity q = make_series_density(m, random_theta(6, 2.0, 22), grid);
  const SeriesDensity r = make_series_density(m, random_theta(6, 2.0, 23), grid);

  CHECK(l2_distance(as_density(p), as_density(p), rule) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(l2_distance(as_density(p), as_density(q), rule) ==
        doctest::Approx(l2_distance(as_density(q), as_density(p), rule)).epsilon(1e-13));
  CHECK(l2_distance(as_density(p), as_density(r), rule) <=
        l2_distance(as_density(p), as_density(q), rule) +
            l2_distance(as_density(q), as_density(r), rule) + 1e-12);
}

TEST_CASE("kernel baseline: Scott bandwidths, renormalization, support") {
  const QuadratureGrid grid(64, 10);
  const TriangleRule rule(grid);
  const TruncationModel beta = build_model(builtin_model("beta"), grid);
  const SimplexSample s = sample(beta, 300, 31);

  const KernelEstimate kde = kernel_fit(s, grid);
  // h_i = sigma_i n^{-1/6} for d = 2, with the unbiased sample deviation
  for (int i = 0; i < 2; ++i) {
    const double mean = s.points.col(i).mean();
    const double sd = std::sqrt((s.points.col(i).array() - mean).square().sum() / (s.size() - 1));
    CHECK(kde.bandwidths()[i] ==
          doctest::Approx(sd * std::pow(300.0, -1.0 / 6.0)).epsilon(1e-13));
  }
  CHECK(simplex_mass(kde, rule) == doctest::Approx(1.0).epsilon(1e-6));

  const double off[2] = {0.9, 0.1};
  CHECK(kde.log_density(std::span<const double>(off, 2)) ==
        -std::numeric_limits<double>::infinity());
  const double on[2] = {0.2, 0.6};
  CHECK(std::isfinite(kde.log_density(std::span<const double>(on, 2))));

  // two identical points still give a normalized estimate
  RowMatrixXd dup(2, 2);
  dup << 0.3, 0.5, 0.3, 0.5;
  CHECK_THROWS_AS(kernel_fit(SimplexSample::from_matrix(dup), grid), std::invalid_argument);
  RowMatrixXd two(2, 2);
  two << 0.3, 0.5, 0.4, 0.7;
  const KernelEstimate small = kernel_fit(SimplexSample::from_matrix(two), grid);
  CHECK(simplex_mass(small, rule) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("kernel bandwidth halves from n to 64n at fixed dispersion") {
  const QuadratureGrid grid(32, 8);
  const TruncationModel uni =
      build_model({MarginalSpec(UniformSpec{}), MarginalSpec(UniformSpec{})}, grid);
  const SimplexSample base = sample(uni, 100, 41);
  RowMatrixXd rep(base.size() * 64, 2);
  for (int r = 0; r < 64; ++r) rep.middleRows(r * base.size(), base.size()) = base.points;
  const KernelEstimate h1 = kernel_fit(base, grid);
  const KernelEstimate h64 = kernel_fit(SimplexSample::from_matrix(std::move(rep)), grid);
  for (int i = 0; i < 2; ++i)
    CHECK(h64.bandwidths()[i] / h1.bandwidths()[i] == doctest::Approx(0.5).epsilon(5e-3));
}

TEST_CASE("grid-fast kernel evaluation agrees with the pointwise path") {
  const QuadratureGrid grid(32, 8);
  const TriangleRule rule(grid);
  const TruncationModel beta = build_model(builtin_model("beta"), grid);
  const SimplexSample s = sample(beta, 200, 51);
  const KernelEstimate kde = kernel_fit(s, grid);

  const Eigen::MatrixXd fast = kde.log_on_grid(rule);
  const Eigen::MatrixXd slow = kde.Density::log_on_grid(rule);
  const int q = grid.nodes_per_panel();
  double worst = 0.0;
  for (int b = 0; b < grid.size(); ++b)
    for (int a = 0; a < (b / q + 1) * q; ++a) worst = std::max(worst, std::abs(fast(a, b) - slow(a, b)));
  CHECK(worst < 1e-10);
}

TEST_CASE("quadrature KL of series densities matches the exponential-family closed form") {
  const QuadratureGrid grid(64, 10);
  const TriangleRule rule(grid);
  const ModelIndex m({3, 3});
  for (uint64_t seed : {61u, 62u}) {
    const SeriesDensity a = make_series_density(m, random_theta(6, 2.0, 2 * seed), grid);
    const SeriesDensity b = make_series_density(m, random_theta(6, 2.0, 2 * seed + 1), grid);
    const double closed = kl_between_series(a, b, grid);
    CHECK(std::abs(kl_divergence(as_density(a), as_density(b), rule) - closed) < 1e-7);
  }
}

TEST_CASE("reported scores are stable under scoring-grid refinement") {
  const QuadratureGrid grid(64, 10);
  const TruncationModel beta = build_model(builtin_model("beta"), grid);
  const SimplexSample s = sample(beta, 500, 71);
  const FitResult fr = fit(s, ModelIndex({3, 3}), grid);
  REQUIRE(fr.converged);
  const KernelEstimate kde = kernel_fit(s, grid);

  const TriangleRule coarse(grid);
  const QuadratureGrid grid2(128, 10);
  const TriangleRule fine(grid2);
  for (const Density* est :
       {static_cast<const Density*>(&kde), static_cast<const Density*>(nullptr)}) {
    const DensityRef<SeriesDensity> series_ref(fr.density);
    const Density& e = est ? *est : static_cast<const Density&>(series_ref);
    const double kl_c = kl_divergence(as_density(beta), e, coarse);
    const double kl_f = kl_divergence(as_density(beta), e, fine);
    CHECK(std::abs(kl_f - kl_c) < 0.01 * std::max(kl_f, 1e-12));
  }
}

TEST_CASE("three-dimensional scoring through the recursive rule") {
  const QuadratureGrid grid(24, 8);
  const TruncationModel u3 =
      build_model(std::vector<MarginalSpec>(3, MarginalSpec(UniformSpec{})), grid);
  const ModelIndex m({1, 1, 1});
  const SeriesDensity uniform = make_series_density(m, Eigen::VectorXd::Zero(3), grid);
  CHECK(std::abs(kl_divergence(as_density(u3), as_density(uniform), grid, 3)) < 1e-9);
  CHECK(l2_distance(as_density(u3), as_density(uniform), grid, 3) < 1e-9);

  const SeriesDensity tilted = make_series_density(m, random_theta(3, 1.5, 81), grid);
  CHECK(kl_divergence(as_density(u3), as_density(tilted), grid, 3) ==
        doctest::Approx(tilted.log_norm() + std::log(6.0)).epsilon(1e-6));
}

TEST_CASE("scorer matches the single metrics") {
  const QuadratureGrid grid(48, 10);
  const TriangleRule rule(grid);
  const TruncationModel beta = build_model(builtin_model("beta"), grid);
  const SimplexSample s = sample(beta, 300, 91);
  const FitResult fr = fit(s, ModelIndex({2, 2}), grid);
  const TriangleScorer scorer(as_density(beta), rule);
  const auto sc = scorer.score(as_density(fr.density));
  CHECK(sc.kl == doctest::Approx(kl_divergence(as_density(beta), as_density(fr.density), rule))
                     .epsilon(1e-12));
  const double l2 = l2_distance(as_density(beta), as_density(fr.density), rule);
  CHECK(sc.ise == doctest::Approx(l2 * l2).epsilon(1e-12));
}

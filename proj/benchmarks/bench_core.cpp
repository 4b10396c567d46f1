// Microbenchmarks for the numerical hot paths: basis evaluation, nested
// simplex integration, moment/covariance assembly, the full Newton fit, the
// weight selection, and kernel scoring on the triangle grid.

#include <benchmark/benchmark.h>

#include "aese/aggregate.hpp"
#include "aese/bench.hpp"
#include "aese/metrics.hpp"
#include "aese/mle.hpp"
#include "aese/truncmodel.hpp"

using namespace aese;

namespace {

const QuadratureGrid& grid() {
  static const QuadratureGrid g(64, 10);
  return g;
}

const TruncationModel& beta_model() {
  static const TruncationModel m = build_model(builtin_model("beta"), grid());
  return m;
}

const SimplexSample& beta_sample() {
  static const SimplexSample s = sample(beta_model(), 1000, 42);
  return s;
}

}  // namespace

static void BM_BasisEvalAll(benchmark::State& state) {
  const BasisFamily fam(2, 1, static_cast<int>(state.range(0)));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fam.eval_all(0.37 + 1e-9 * t));
    t += 1.0;
  }
}
BENCHMARK(BM_BasisEvalAll)->Arg(4)->Arg(12);

static void BM_NestedExpIntegral(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::vector<Eigen::VectorXd> g;
  for (int i = 0; i < d; ++i)
    g.push_back(grid().tabulate([i](double t) { return 0.3 * (i + 1) * t * (1.0 - t); }));
  for (auto _ : state) benchmark::DoNotOptimize(log_nested_exp(g, grid()));
}
BENCHMARK(BM_NestedExpIntegral)->Arg(2)->Arg(4);

static void BM_MomentMap(benchmark::State& state) {
  const ModelIndex m = ModelIndex::uniform(2, 4);
  const ModelWorkspace ws(m, grid());
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(m.total(), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(ws.moment_map(theta));
}
BENCHMARK(BM_MomentMap);

static void BM_Covariance(benchmark::State& state) {
  const ModelIndex m = ModelIndex::uniform(2, 4);
  const ModelWorkspace ws(m, grid());
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(m.total(), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(ws.covariance(theta));
}
BENCHMARK(BM_Covariance);

static void BM_NewtonFit(benchmark::State& state) {
  const ModelIndex m = ModelIndex::uniform(2, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(beta_sample(), m, grid()));
}
BENCHMARK(BM_NewtonFit)->Arg(2)->Arg(4);

static void BM_SelectWeights(benchmark::State& state) {
  auto [p1, p2] = split_sample(beta_sample(), 0.8, 7);
  std::vector<SeriesDensity> cands;
  for (int v : {1, 2, 3, 4}) cands.push_back(fit(p1, ModelIndex::uniform(2, v), grid()).density);
  for (auto _ : state) benchmark::DoNotOptimize(select_weights(cands, p2, grid()));
}
BENCHMARK(BM_SelectWeights);

static void BM_KernelFit(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernel_fit(beta_sample(), grid()));
}
BENCHMARK(BM_KernelFit);

static void BM_KernelScore(benchmark::State& state) {
  static const TriangleRule rule(grid());
  static const TriangleScorer scorer(as_density(beta_model()), rule);
  const KernelEstimate kde = kernel_fit(beta_sample(), grid());
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score(kde));
}
BENCHMARK(BM_KernelScore);

BENCHMARK_MAIN();

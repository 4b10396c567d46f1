#include "aese/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "aese/mle.hpp"
#include "aese/rng.hpp"

namespace aese {

std::vector<ModelIndex> CandidateGrid::indices() const {
  std::vector<ModelIndex> out;
  out.reserve(degrees.size());
  for (int v : degrees) out.push_back(ModelIndex::uniform(d, v));
  return out;
}

CandidateGrid build_candidates(int n, int d, int N_n) {
  if (n < 1) throw std::invalid_argument("build_candidates: need n >= 1");
  if (d < 2) throw std::invalid_argument("build_candidates: need d >= 2");
  if (N_n < 1) throw std::invalid_argument("build_candidates: need N_n >= 1");
  std::set<int> vs;
  for (int j = 1; j <= N_n; ++j) {
    const double expo = 1.0 / (2.0 * (d + j) + 1.0);
    const int v = static_cast<int>(std::floor(std::pow(static_cast<double>(n), expo)));
    vs.insert(std::max(v, 1));
  }
  CandidateGrid g;
  g.d = d;
  g.degrees.assign(vs.begin(), vs.end());
  return g;
}

std::pair<SimplexSample, SimplexSample> split_sample(const SimplexSample& s, double ce,
                                                     uint64_t seed) {
  if (!(ce > 0.0 && ce < 1.0)) throw std::invalid_argument("split_sample: need 0 < ce < 1");
  const int n = s.size();
  const int n1 = static_cast<int>(std::floor(ce * n));
  const int n2 = n - n1;
  if (n1 < 2 || n2 < 2)
    throw std::invalid_argument("split_sample: both parts need at least two points");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (int j = n - 1; j > 0; --j)
    std::swap(perm[j], perm[static_cast<size_t>(rng.bounded(static_cast<uint64_t>(j) + 1))]);

  RowMatrixXd p1(n1, s.dim()), p2(n2, s.dim());
  for (int j = 0; j < n1; ++j) p1.row(j) = s.points.row(perm[j]);
  for (int j = 0; j < n2; ++j) p2.row(j) = s.points.row(perm[n1 + j]);
  return {SimplexSample{std::move(p1)}, SimplexSample{std::move(p2)}};
}

ModelIndex union_index(const std::vector<SeriesDensity>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("union_index: need at least one candidate");
  const int d = candidates.front().dim();
  std::vector<int> degrees(d, 1);
  for (const auto& c : candidates) {
    if (c.dim() != d) throw std::invalid_argument("union_index: mixed dimensions");
    for (int i = 0; i < d; ++i) degrees[i] = std::max(degrees[i], c.index().degrees[i]);
  }
  return ModelIndex(degrees);
}

Eigen::VectorXd embed_theta(const SeriesDensity& f, const ModelIndex& ext) {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(ext.total());
  for (int i = 1; i <= f.dim(); ++i)
    t.segment(ext.offset(i), f.index().degrees[i - 1]) =
        f.theta().segment(f.index().offset(i), f.index().degrees[i - 1]);
  return t;
}

namespace {

void check_lambda(const Eigen::VectorXd& lambda, size_t n_candidates) {
  if (static_cast<size_t>(lambda.size()) != n_candidates)
    throw std::invalid_argument("lambda length does not match the candidate count");
  if ((lambda.array() < -1e-12).any())
    throw std::invalid_argument("lambda has negative entries");
  if (std::abs(lambda.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("lambda does not sum to one");
}

Eigen::MatrixXd embed_all(const std::vector<SeriesDensity>& candidates, const ModelIndex& u) {
  Eigen::MatrixXd T(u.total(), candidates.size());
  for (size_t c = 0; c < candidates.size(); ++c) T.col(c) = embed_theta(candidates[c], u);
  return T;
}

}  // namespace

double aggregate_log_norm(const std::vector<SeriesDensity>& candidates,
                          const Eigen::VectorXd& lambda, const QuadratureGrid& grid) {
  check_lambda(lambda, candidates.size());
  const ModelIndex u = union_index(candidates);
  const Eigen::VectorXd theta = embed_all(candidates, u) * lambda;
  return log_normalizer(u, theta, grid);
}

double penalty(const std::vector<SeriesDensity>& candidates, const Eigen::VectorXd& lambda,
               const QuadratureGrid& grid) {
  check_lambda(lambda, candidates.size());
  double avg_psi = 0.0;
  for (size_t c = 0; c < candidates.size(); ++c) avg_psi += lambda[c] * candidates[c].log_norm();
  const double pen = avg_psi - aggregate_log_norm(candidates, lambda, grid);
  if (pen < -1e-10)
    throw std::runtime_error("penalty: negative value beyond tolerance (quadrature failure?)");
  return std::max(pen, 0.0);
}

double criterion_H(const std::vector<SeriesDensity>& candidates, const Eigen::VectorXd& lambda,
                   const SimplexSample& part2, const QuadratureGrid& grid) {
  check_lambda(lambda, candidates.size());
  if (part2.size() < 1) throw std::invalid_argument("criterion_H: empty held-out part");
  // H = sum_m lambda_m (s_m - psi_m/2) - psi_lambda/2, with s_m the sample
  // mean of theta_m . phi over part2.
  double linear = 0.0;
  for (size_t c = 0; c < candidates.size(); ++c) {
    const Eigen::VectorXd mu2 = empirical_moments(part2, candidates[c].index());
    const double s_m = candidates[c].theta().dot(mu2);
    linear += lambda[c] * (s_m - 0.5 * candidates[c].log_norm());
  }
  return linear - 0.5 * aggregate_log_norm(candidates, lambda, grid);
}

AggregateDensity::AggregateDensity(std::vector<SeriesDensity> candidates, Eigen::VectorXd lambda,
                                   const QuadratureGrid& grid)
    : candidates_(std::move(candidates)),
      lambda_(std::move(lambda)),
      blended_([&]() -> SeriesDensity {
        check_lambda(lambda_, candidates_.size());
        const ModelIndex u = union_index(candidates_);
        Eigen::VectorXd theta = embed_all(candidates_, u) * lambda_;
        return make_series_density(u, std::move(theta), grid);
      }()) {}

void AggregateDensity::save(std::ostream& os) const {
  os << "aese-agg v1\n" << candidates_.size() << '\n';
  for (const auto& c : candidates_) c.save(os);
  os << "lambda";
  char buf[40];
  for (int c = 0; c < lambda_.size(); ++c) {
    std::snprintf(buf, sizeof(buf), "%.17g", lambda_[c]);
    os << ' ' << buf;
  }
  os << '\n';
}

AggregateDensity AggregateDensity::load(std::istream& is, const QuadratureGrid& grid) {
  std::string line;
  if (!std::getline(is, line) || line != "aese-agg v1")
    throw std::runtime_error("AggregateDensity::load: bad header (expected 'aese-agg v1')");
  if (!std::getline(is, line)) throw std::runtime_error("AggregateDensity::load: missing count");
  const int n = std::stoi(line);
  if (n < 1) throw std::runtime_error("AggregateDensity::load: bad candidate count");
  std::vector<SeriesDensity> candidates;
  candidates.reserve(n);
  for (int c = 0; c < n; ++c) candidates.push_back(SeriesDensity::load(is));
  if (!std::getline(is, line)) throw std::runtime_error("AggregateDensity::load: missing lambda");
  std::istringstream ls(line);
  std::string tag;
  if (!(ls >> tag) || tag != "lambda")
    throw std::runtime_error("AggregateDensity::load: bad lambda line");
  Eigen::VectorXd lambda(n);
  for (int c = 0; c < n; ++c)
    if (!(ls >> lambda[c])) throw std::runtime_error("AggregateDensity::load: short lambda line");
  return AggregateDensity(std::move(candidates), std::move(lambda), grid);
}

WeightSelection select_weights(const std::vector<SeriesDensity>& candidates,
                               const SimplexSample& part2, const QuadratureGrid& grid,
                               const AggregateOptions& opts) {
  if (candidates.empty()) throw std::invalid_argument("select_weights: need at least one candidate");
  const int N = static_cast<int>(candidates.size());
  const ModelIndex u = union_index(candidates);
  const ModelWorkspace ws(u, grid);
  const Eigen::MatrixXd T = embed_all(candidates, u);

  // Per-candidate constants: c_m = s_m - psi_m/2.
  Eigen::VectorXd cvec(N), psi_m(N);
  for (int c = 0; c < N; ++c) {
    const Eigen::VectorXd mu2 = empirical_moments(part2, candidates[c].index());
    psi_m[c] = candidates[c].log_norm();
    cvec[c] = candidates[c].theta().dot(mu2) - 0.5 * psi_m[c];
  }

  auto H_of = [&](const Eigen::VectorXd& lambda, double* psi_out = nullptr) {
    const Eigen::VectorXd theta = T * lambda;
    const double psi = ws.log_normalizer(theta);
    if (psi_out) *psi_out = psi;
    return cvec.dot(lambda) - 0.5 * psi;
  };
  auto grad_of = [&](const Eigen::VectorXd& lambda) -> Eigen::VectorXd {
    const Eigen::VectorXd A = ws.moment_map(T * lambda);
    return cvec - 0.5 * (T.transpose() * A);
  };

  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(N, 1.0 / N);
  double H = H_of(lambda);
  Eigen::VectorXd best_lambda = lambda;
  double best_H = H;

  double eta = opts.step;
  int iter = 0;
  bool converged = (N == 1);
  while (!converged && iter < opts.max_iterations) {
    ++iter;
    const Eigen::VectorXd g = grad_of(lambda);
    const Eigen::ArrayXd scaled = eta * (g.array() - g.maxCoeff());
    Eigen::VectorXd next = (lambda.array() * scaled.exp()).matrix();
    const double z = next.sum();
    if (!(z > 0.0)) break;  // degenerate update
    next /= z;

    const double H_next = H_of(next);
    if (H_next < H) {
      eta *= 0.5;
      if (eta < 1e-12) break;
      continue;
    }
    const double change = (next - lambda).lpNorm<Eigen::Infinity>();
    lambda = next;
    H = H_next;
    if (H > best_H) {
      best_H = H;
      best_lambda = lambda;
    }
    if (change < opts.tol) converged = true;
  }

  // Never trail the best single candidate: H at the indicator of m is the
  // mean held-out log-likelihood s_m - psi_m.
  for (int c = 0; c < N; ++c) {
    const double H_ind = cvec[c] - 0.5 * psi_m[c];
    if (H_ind > best_H) {
      best_H = H_ind;
      best_lambda = Eigen::VectorXd::Unit(N, c);
    }
  }

  WeightSelection out{AggregateDensity(candidates, best_lambda, grid), best_H, iter, converged};
  return out;
}

}  // namespace aese

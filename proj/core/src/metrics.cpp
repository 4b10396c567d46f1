#include "aese/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace aese {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();
constexpr double kTinyDensity = 1e-300;  // contributions below this are dropped

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Applies f(a, b, weight) over every tensor entry the triangle rule can touch
// (inner panel <= outer panel).
template <class F>
void for_each_used(const TriangleRule& rule, F&& f) {
  const int n = rule.size();
  const int q = rule.axis().nodes_per_panel();
  const Eigen::MatrixXd& W = rule.weight_matrix();
  for (int b = 0; b < n; ++b) {
    const int amax = (b / q + 1) * q;
    for (int a = 0; a < amax; ++a) f(a, b, W(a, b));
  }
}

}  // namespace

Eigen::MatrixXd Density::log_on_grid(const TriangleRule& rule) const {
  if (dim() != 2) throw std::invalid_argument("log_on_grid: rule is two-dimensional");
  const Eigen::VectorXd& t = rule.axis().nodes();
  const int n = rule.size();
  const int q = rule.axis().nodes_per_panel();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    const int amax = (b / q + 1) * q;
    for (int a = 0; a < amax; ++a) {
      const double x[2] = {t[a], t[b]};
      out(a, b) = log_unconstrained(std::span<const double>(x, 2));
    }
  }
  return out;
}

double kl_divergence(const Density& p, const Density& q, const TriangleRule& rule) {
  if (p.dim() != 2 || q.dim() != 2) throw std::invalid_argument("kl_divergence: need d = 2 densities");
  const Eigen::MatrixXd lp = p.log_on_grid(rule);
  const Eigen::MatrixXd lq = q.log_on_grid(rule);
  double acc = 0.0;
  bool infinite = false;
  for_each_used(rule, [&](int a, int b, double w) {
    const double f0 = std::exp(lp(a, b));
    if (f0 < kTinyDensity) return;
    if (lq(a, b) == kNegInf) {
      infinite = true;
      return;
    }
    acc += w * f0 * (lp(a, b) - lq(a, b));
  });
  if (infinite) return kPosInf;
  if (acc < 0.0 && acc > -1e-10) return 0.0;
  return acc;
}

double l2_distance(const Density& p, const Density& q, const TriangleRule& rule) {
  if (p.dim() != 2 || q.dim() != 2) throw std::invalid_argument("l2_distance: need d = 2 densities");
  const Eigen::MatrixXd lp = p.log_on_grid(rule);
  const Eigen::MatrixXd lq = q.log_on_grid(rule);
  double acc = 0.0;
  for_each_used(rule, [&](int a, int b, double w) {
    const double diff = std::exp(lp(a, b)) - std::exp(lq(a, b));
    acc += w * diff * diff;
  });
  return std::sqrt(std::max(acc, 0.0));
}

double simplex_mass(const Density& q, const TriangleRule& rule) {
  const Eigen::MatrixXd lq = q.log_on_grid(rule);
  double acc = 0.0;
  for_each_used(rule, [&](int a, int b, double w) { acc += w * std::exp(lq(a, b)); });
  return acc;
}

double kl_divergence(const Density& p, const Density& q, const QuadratureGrid& grid, int d) {
  if (p.dim() != d || q.dim() != d) throw std::invalid_argument("kl_divergence: dimension mismatch");
  bool infinite = false;
  const double acc = simplex_integrate(
      d,
      [&](const double* x) {
        std::span<const double> pt(x, static_cast<size_t>(d));
        const double lp = p.log_unconstrained(pt);
        const double f0 = std::exp(lp);
        if (f0 < kTinyDensity) return 0.0;
        const double lq = q.log_unconstrained(pt);
        if (lq == kNegInf) {
          infinite = true;
          return 0.0;
        }
        return f0 * (lp - lq);
      },
      grid);
  if (infinite) return kPosInf;
  if (acc < 0.0 && acc > -1e-10) return 0.0;
  return acc;
}

double l2_distance(const Density& p, const Density& q, const QuadratureGrid& grid, int d) {
  if (p.dim() != d || q.dim() != d) throw std::invalid_argument("l2_distance: dimension mismatch");
  const double acc = simplex_integrate(
      d,
      [&](const double* x) {
        std::span<const double> pt(x, static_cast<size_t>(d));
        const double diff = std::exp(p.log_unconstrained(pt)) - std::exp(q.log_unconstrained(pt));
        return diff * diff;
      },
      grid);
  return std::sqrt(std::max(acc, 0.0));
}

KernelEstimate::KernelEstimate(const SimplexSample& s, const QuadratureGrid& grid)
    : pts_(s.points) {
  const int n = s.size();
  const int d = s.dim();
  if (n < 2) throw std::invalid_argument("kernel_fit: need n >= 2");

  h_.resize(d);
  for (int i = 0; i < d; ++i) {
    const double mean = pts_.col(i).mean();
    const double ss = (pts_.col(i).array() - mean).square().sum();
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0)) throw std::invalid_argument("kernel_fit: zero variance in coordinate " + std::to_string(i + 1));
    h_[i] = sd * std::pow(static_cast<double>(n), -1.0 / (d + 4.0));
  }

  // truncation constant: mean over samples of the per-sample Gaussian product
  // mass on the simplex; the first coordinate's running integral is an erf.
  double c = 0.0;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd F = grid.tabulate([&](double t) {
      return normal_cdf((t - pts_(j, 0)) / h_[0]) - normal_cdf((0.0 - pts_(j, 0)) / h_[0]);
    });
    for (int i = 1; i < d - 1; ++i) {
      const Eigen::VectorXd ni = grid.tabulate([&](double t) {
        const double z = (t - pts_(j, i)) / h_[i];
        return std::exp(-0.5 * z * z) / (h_[i] * std::sqrt(2.0 * std::numbers::pi));
      });
      F = grid.cumulative(ni.cwiseProduct(F));
    }
    const Eigen::VectorXd nd = grid.tabulate([&](double t) {
      const double z = (t - pts_(j, d - 1)) / h_[d - 1];
      return std::exp(-0.5 * z * z) / (h_[d - 1] * std::sqrt(2.0 * std::numbers::pi));
    });
    c += grid.integrate(nd.cwiseProduct(F));
  }
  c_ = c / n;
  if (!(c_ > 0.0)) throw std::runtime_error("kernel_fit: kernel mixture carries no mass on the simplex");
  log_c_ = std::log(c_);
}

double KernelEstimate::log_raw(std::span<const double> x) const {
  const int n = static_cast<int>(pts_.rows());
  const int d = dim();
  double norm = 0.0;
  for (int i = 0; i < d; ++i) norm += std::log(h_[i] * std::sqrt(2.0 * std::numbers::pi));
  double best = kNegInf;
  Eigen::VectorXd expo(n);
  for (int j = 0; j < n; ++j) {
    double e = 0.0;
    for (int i = 0; i < d; ++i) {
      const double z = (x[i] - pts_(j, i)) / h_[i];
      e -= 0.5 * z * z;
    }
    expo[j] = e;
    best = std::max(best, e);
  }
  if (best == kNegInf) return kNegInf;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += std::exp(expo[j] - best);
  return best + std::log(sum / n) - norm;
}

double KernelEstimate::log_unconstrained(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("KernelEstimate: point dimension mismatch");
  return log_raw(x) - log_c_;
}

double KernelEstimate::log_density(std::span<const double> x) const {
  if (!on_simplex(x)) return kNegInf;
  return log_unconstrained(x);
}

Eigen::MatrixXd KernelEstimate::log_on_grid(const TriangleRule& rule) const {
  if (dim() != 2) return Density::log_on_grid(rule);
  const Eigen::VectorXd& t = rule.axis().nodes();
  const int N = rule.size();
  const int n = static_cast<int>(pts_.rows());

  Eigen::MatrixXd k1(n, N), k2(n, N);
  for (int a = 0; a < N; ++a) {
    k1.col(a) = (-0.5 * ((t[a] - pts_.col(0).array()) / h_[0]).square()).exp().matrix();
    k2.col(a) = (-0.5 * ((t[a] - pts_.col(1).array()) / h_[1]).square()).exp().matrix();
  }
  const double lognorm = std::log(2.0 * std::numbers::pi * h_[0] * h_[1]);
  Eigen::MatrixXd raw = (k1.transpose() * k2) / n;

  Eigen::MatrixXd out(N, N);
  const int q = rule.axis().nodes_per_panel();
  for (int b = 0; b < N; ++b) {
    const int amax = (b / q + 1) * q;
    for (int a = 0; a < amax; ++a) {
      const double r = raw(a, b);
      if (r > 1e-290) {
        out(a, b) = std::log(r) - lognorm - log_c_;
      } else {
        // products underflowed; recompute this entry in log space
        const double x[2] = {t[a], t[b]};
        out(a, b) = log_unconstrained(std::span<const double>(x, 2));
      }
    }
    if (amax < N) out.col(b).tail(N - amax).setConstant(kNegInf);
  }
  return out;
}

KernelEstimate kernel_fit(const SimplexSample& s, const QuadratureGrid& grid) {
  return KernelEstimate(s, grid);
}

TriangleScorer::TriangleScorer(const Density& truth, const TriangleRule& rule)
    : rule_(&rule), truth_log_(truth.log_on_grid(rule)) {
  truth_ = truth_log_.array().exp().matrix();
}

TriangleScorer::Scores TriangleScorer::score(const Density& estimator) const {
  const Eigen::MatrixXd lq = estimator.log_on_grid(*rule_);
  double kl = 0.0, l2 = 0.0;
  bool infinite = false;
  for_each_used(*rule_, [&](int a, int b, double w) {
    const double f0 = truth_(a, b);
    const double est = std::exp(lq(a, b));
    const double diff = f0 - est;
    l2 += w * diff * diff;
    if (f0 < kTinyDensity) return;
    if (lq(a, b) == kNegInf) {
      infinite = true;
      return;
    }
    kl += w * f0 * (truth_log_(a, b) - lq(a, b));
  });
  Scores out;
  out.kl = infinite ? kPosInf : (kl < 0.0 && kl > -1e-10 ? 0.0 : kl);
  out.ise = std::max(l2, 0.0);
  return out;
}

}  // namespace aese

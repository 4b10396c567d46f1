#include "aese/expmodel.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace aese {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

ModelIndex::ModelIndex(std::vector<int> m) : degrees(std::move(m)) {
  if (degrees.size() < 2) throw std::invalid_argument("ModelIndex: need d >= 2");
  for (int v : degrees)
    if (v < 1) throw std::invalid_argument("ModelIndex: all degrees must be >= 1");
}

ModelIndex ModelIndex::uniform(int d, int v) { return ModelIndex(std::vector<int>(d, v)); }

int ModelIndex::total() const {
  int t = 0;
  for (int v : degrees) t += v;
  return t;
}

int ModelIndex::offset(int i) const {
  int t = 0;
  for (int c = 1; c < i; ++c) t += degrees[c - 1];
  return t;
}

ModelWorkspace::ModelWorkspace(ModelIndex index, const QuadratureGrid& grid)
    : index_(std::move(index)), grid_(&grid) {
  const int d = index_.dim();
  phi_.reserve(d);
  for (int i = 1; i <= d; ++i) {
    BasisFamily fam(d, i, index_.degrees[i - 1]);
    Eigen::MatrixXd all = fam.values_on_grid(grid);
    phi_.push_back(all.bottomRows(index_.degrees[i - 1]));  // rows k = 1..m_i
  }
}

void ModelWorkspace::check_theta(const Eigen::VectorXd& theta) const {
  if (theta.size() != index_.total())
    throw std::invalid_argument("theta length does not match |m|");
  if (!theta.allFinite()) throw std::invalid_argument("theta has non-finite entries");
}

std::vector<Eigen::VectorXd> ModelWorkspace::log_components(const Eigen::VectorXd& theta) const {
  check_theta(theta);
  const int d = index_.dim();
  std::vector<Eigen::VectorXd> g;
  g.reserve(d);
  for (int i = 1; i <= d; ++i) {
    const auto theta_i = theta.segment(index_.offset(i), index_.degrees[i - 1]);
    g.push_back(phi_[i - 1].transpose() * theta_i);
  }
  return g;
}

double ModelWorkspace::log_normalizer(const Eigen::VectorXd& theta) const {
  return log_nested_exp(log_components(theta), *grid_);
}

Eigen::VectorXd ModelWorkspace::moment_map(const Eigen::VectorXd& theta) const {
  return moment_map_extended(theta, index_);
}

Eigen::VectorXd ModelWorkspace::moment_map_extended(const Eigen::VectorXd& theta,
                                                    const ModelIndex& ext) const {
  const int d = index_.dim();
  if (ext.dim() != d) throw std::invalid_argument("moment_map_extended: dimension mismatch");
  NestedExpWorkspace ws(log_components(theta), *grid_);
  Eigen::VectorXd out(ext.total());
  for (int i = 1; i <= d; ++i) {
    const int mi = ext.degrees[i - 1];
    if (mi < index_.degrees[i - 1])
      throw std::invalid_argument("moment_map_extended: ext must enclose the model index");
    const Eigen::VectorXd mw = ws.marginal_weights(i);
    BasisFamily fam(d, i, mi);
    const Eigen::MatrixXd phi_ext =
        (mi == index_.degrees[i - 1]) ? phi_[i - 1] : Eigen::MatrixXd(fam.values_on_grid(*grid_).bottomRows(mi));
    out.segment(ext.offset(i), mi) = phi_ext * mw;
  }
  return out;
}

Eigen::MatrixXd ModelWorkspace::covariance(const Eigen::VectorXd& theta) const {
  const int d = index_.dim();
  NestedExpWorkspace ws(log_components(theta), *grid_);
  const int M = index_.total();
  Eigen::MatrixXd second(M, M);
  Eigen::VectorXd first(M);

  // same-coordinate blocks from the 1-D marginals
  for (int i = 1; i <= d; ++i) {
    const int mi = index_.degrees[i - 1];
    const int oi = index_.offset(i);
    const Eigen::VectorXd mw = ws.marginal_weights(i);
    first.segment(oi, mi) = phi_[i - 1] * mw;
    for (int k = 0; k < mi; ++k)
      for (int l = k; l < mi; ++l) {
        const double v = mw.cwiseProduct(phi_[i - 1].row(k).transpose()).dot(phi_[i - 1].row(l).transpose());
        second(oi + k, oi + l) = v;
        second(oi + l, oi + k) = v;
      }
  }
  // cross-coordinate blocks
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j) {
      const int mi = index_.degrees[i - 1], mj = index_.degrees[j - 1];
      const int oi = index_.offset(i), oj = index_.offset(j);
      for (int k = 0; k < mi; ++k)
        for (int l = 0; l < mj; ++l) {
          const double v = ws.cross_moment(i, j, phi_[i - 1].row(k).transpose(),
                                           phi_[j - 1].row(l).transpose());
          second(oi + k, oj + l) = v;
          second(oj + l, oi + k) = v;
        }
    }

  return second - first * first.transpose();
}

SeriesDensity::SeriesDensity(ModelIndex index, Eigen::VectorXd theta, double log_norm)
    : index_(std::move(index)), theta_(std::move(theta)), log_norm_(log_norm) {
  if (theta_.size() != index_.total())
    throw std::invalid_argument("SeriesDensity: theta length does not match |m|");
  const int d = index_.dim();
  families_.reserve(d);
  for (int i = 1; i <= d; ++i) families_.emplace_back(d, i, index_.degrees[i - 1]);
}

bool on_simplex(std::span<const double> x) {
  double prev = 0.0;
  for (double xi : x) {
    if (xi < prev || xi > 1.0) return false;
    prev = xi;
  }
  return true;
}

double SeriesDensity::log_component(int i, double t) const {
  const Eigen::VectorXd all = families_[i - 1].eval_all(t);
  const auto theta_i = theta_.segment(index_.offset(i), index_.degrees[i - 1]);
  return all.tail(index_.degrees[i - 1]).dot(theta_i);
}

double SeriesDensity::log_unconstrained(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("SeriesDensity: point dimension mismatch");
  double s = -log_norm_;
  for (int i = 1; i <= dim(); ++i) s += log_component(i, x[i - 1]);
  return s;
}

double SeriesDensity::log_density(std::span<const double> x) const {
  if (!on_simplex(x)) return kNegInf;
  return log_unconstrained(x);
}

void SeriesDensity::save(std::ostream& os) const {
  os << "aese v1\n";
  os << dim();
  for (int v : index_.degrees) os << ' ' << v;
  os << '\n';
  for (int i = 1; i <= dim(); ++i)
    for (int k = 1; k <= index_.degrees[i - 1]; ++k)
      os << i << ' ' << k << ' ' << fmt17(theta_[index_.offset(i) + k - 1]) << '\n';
  os << "psi " << fmt17(log_norm_) << '\n';
}

SeriesDensity SeriesDensity::load(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "aese v1")
    throw std::runtime_error("SeriesDensity::load: bad header (expected 'aese v1')");
  if (!std::getline(is, line)) throw std::runtime_error("SeriesDensity::load: missing index line");
  std::istringstream hdr(line);
  int d = 0;
  if (!(hdr >> d) || d < 2) throw std::runtime_error("SeriesDensity::load: bad dimension");
  std::vector<int> degrees(d);
  for (int i = 0; i < d; ++i)
    if (!(hdr >> degrees[i])) throw std::runtime_error("SeriesDensity::load: bad degree list");
  ModelIndex index(degrees);
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(index.total(), std::nan(""));
  double psi = std::nan("");
  for (int r = 0; r < index.total(); ++r) {
    if (!std::getline(is, line)) throw std::runtime_error("SeriesDensity::load: truncated record");
    std::istringstream row(line);
    int i = 0, k = 0;
    double v = 0.0;
    if (!(row >> i >> k >> v) || i < 1 || i > d || k < 1 || k > degrees[i - 1])
      throw std::runtime_error("SeriesDensity::load: bad coefficient line: " + line);
    theta[index.offset(i) + k - 1] = v;
  }
  if (!std::getline(is, line)) throw std::runtime_error("SeriesDensity::load: missing psi line");
  std::istringstream tail(line);
  std::string tag;
  if (!(tail >> tag >> psi) || tag != "psi")
    throw std::runtime_error("SeriesDensity::load: bad psi line: " + line);
  if (!theta.allFinite()) throw std::runtime_error("SeriesDensity::load: missing coefficients");
  return SeriesDensity(std::move(index), std::move(theta), psi);
}

double log_normalizer(const ModelIndex& index, const Eigen::VectorXd& theta,
                      const QuadratureGrid& grid) {
  return ModelWorkspace(index, grid).log_normalizer(theta);
}

Eigen::VectorXd moment_map(const ModelIndex& index, const Eigen::VectorXd& theta,
                           const QuadratureGrid& grid) {
  return ModelWorkspace(index, grid).moment_map(theta);
}

Eigen::MatrixXd covariance_matrix(const ModelIndex& index, const Eigen::VectorXd& theta,
                                  const QuadratureGrid& grid) {
  return ModelWorkspace(index, grid).covariance(theta);
}

SeriesDensity make_series_density(const ModelIndex& index, Eigen::VectorXd theta,
                                  const QuadratureGrid& grid) {
  const double psi = log_normalizer(index, theta, grid);
  return SeriesDensity(index, std::move(theta), psi);
}

double kappa_m(const ModelIndex& index) {
  const int d = index.dim();
  double s = 0.0;
  for (int v : index.degrees) s += std::pow(v + d, 2.0 * d);
  return std::sqrt(2.0 * std::tgamma(d + 1.0)) * std::sqrt(s);
}

}  // namespace aese

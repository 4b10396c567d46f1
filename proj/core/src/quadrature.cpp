#include "aese/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aese {

namespace {

// Nodes and weights from the symmetric tridiagonal Jacobi matrix of the monic
// three-term recurrence (Golub-Welsch): eigenvalues are the nodes, weights are
// mu0 * (first eigenvector component)^2.
GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& subdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw std::runtime_error("Gauss rule: eigen solve failed");
  GaussRule r;
  r.nodes = es.eigenvalues();
  r.weights = mu0 * es.eigenvectors().row(0).array().square();
  return r;
}

}  // namespace

GaussRule GaussRule::legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre: need n >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1 > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(diag, sub, 2.0);
}

GaussRule GaussRule::jacobi(int n, double alpha, double beta) {
  if (n < 1) throw std::invalid_argument("Gauss-Jacobi: need n >= 1");
  if (alpha <= -1.0 || beta <= -1.0) throw std::invalid_argument("Gauss-Jacobi: need alpha, beta > -1");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n);
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
    diag[k] = (beta * beta - alpha * alpha) / den;
  }
  Eigen::VectorXd sub(n - 1 > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) {
    double b2;
    if (k == 1) {
      // (k + ab) cancels against the (2k + ab - 1) factor at k = 1
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
           ((2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0));
    }
    sub[k - 1] = std::sqrt(b2);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  return golub_welsch(diag, sub, mu0);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> marginal_gauss_rule(int d, int i, int n) {
  if (d < 2 || i < 1 || i > d) throw std::invalid_argument("marginal_gauss_rule: need d >= 2, 1 <= i <= d");
  GaussRule r = GaussRule::jacobi(n, static_cast<double>(d - i), static_cast<double>(i - 1));
  Eigen::VectorXd nodes = (r.nodes.array() + 1.0) / 2.0;
  const double scale =
      std::exp(-d * std::log(2.0) - std::lgamma(d - i + 1.0) - std::lgamma(static_cast<double>(i)));
  Eigen::VectorXd weights = scale * r.weights;
  return {nodes, weights};
}

QuadratureGrid::QuadratureGrid(int panels, int nodes_per_panel)
    : panels_(panels), order_(nodes_per_panel) {
  if (panels < 1 || nodes_per_panel < 2)
    throw std::invalid_argument("QuadratureGrid: need panels >= 1 and nodes_per_panel >= 2");

  GaussRule gl = GaussRule::legendre(order_);
  ref_nodes_ = (gl.nodes.array() + 1.0) / 2.0;   // map [-1,1] -> [0,1]
  ref_weights_ = gl.weights / 2.0;

  const int n = panels_ * order_;
  nodes_.resize(n);
  weights_.resize(n);
  const double h = 1.0 / panels_;
  for (int p = 0; p < panels_; ++p)
    for (int l = 0; l < order_; ++l) {
      nodes_[p * order_ + l] = (p + ref_nodes_[l]) * h;
      weights_[p * order_ + l] = ref_weights_[l] * h;
    }

  // Cumulative matrix via shifted-Legendre interpolation: V(a,c) = P~_c(xi_a),
  // and int_0^x P~_c has the closed-form antiderivative used below.
  const int q = order_;
  Eigen::MatrixXd V(q, q);
  for (int a = 0; a < q; ++a) {
    const double s = 2.0 * ref_nodes_[a] - 1.0;
    double pm1 = 1.0, p0 = s;
    V(a, 0) = 1.0;
    if (q > 1) V(a, 1) = s;
    for (int c = 2; c < q; ++c) {
      const double pc = ((2.0 * c - 1.0) * s * p0 - (c - 1.0) * pm1) / c;
      V(a, c) = pc;
      pm1 = p0;
      p0 = pc;
    }
  }
  legendre_vandermonde_inv_ = V.partialPivLu().inverse();

  Eigen::MatrixXd W(q, q);
  for (int a = 0; a < q; ++a) {
    const double x = ref_nodes_[a];
    const double s = 2.0 * x - 1.0;
    // Legendre values P_0..P_q at s (one degree beyond the basis)
    Eigen::VectorXd P(q + 1);
    P[0] = 1.0;
    if (q >= 1) P[1] = s;
    for (int c = 2; c <= q; ++c) P[c] = ((2.0 * c - 1.0) * s * P[c - 1] - (c - 1.0) * P[c - 2]) / c;
    W(a, 0) = x;
    for (int c = 1; c < q; ++c) W(a, c) = (P[c + 1] - P[c - 1]) / (2.0 * (2.0 * c + 1.0));
  }
  cum_ = W * legendre_vandermonde_inv_;
}

int QuadratureGrid::panel_of(double t) const {
  int p = static_cast<int>(std::floor(t * panels_));
  if (p < 0) p = 0;
  if (p >= panels_) p = panels_ - 1;
  return p;
}

Eigen::VectorXd QuadratureGrid::cumulative(const Eigen::VectorXd& u, double* total) const {
  if (u.size() != nodes_.size()) throw std::invalid_argument("cumulative: size mismatch");
  Eigen::VectorXd F(u.size());
  const double h = 1.0 / panels_;
  double acc = 0.0;
  for (int p = 0; p < panels_; ++p) {
    const auto up = u.segment(p * order_, order_);
    F.segment(p * order_, order_) = ((h * (cum_ * up)).array() + acc).matrix();
    acc += h * ref_weights_.dot(up);
  }
  if (total) *total = acc;
  return F;
}

Eigen::VectorXd QuadratureGrid::suffix(const Eigen::VectorXd& u, double* total) const {
  if (u.size() != nodes_.size()) throw std::invalid_argument("suffix: size mismatch");
  Eigen::VectorXd S(u.size());
  const double h = 1.0 / panels_;
  double acc = 0.0;  // integral over panels to the right
  for (int p = panels_ - 1; p >= 0; --p) {
    const auto up = u.segment(p * order_, order_);
    const double panel_total = h * ref_weights_.dot(up);
    S.segment(p * order_, order_) = ((acc + panel_total) - (h * (cum_ * up)).array()).matrix();
    acc += panel_total;
  }
  if (total) *total = acc;
  return S;
}

Eigen::RowVectorXd QuadratureGrid::cumulative_row(double x) const {
  const int q = order_;
  Eigen::RowVectorXd W(q);
  const double s = 2.0 * x - 1.0;
  Eigen::VectorXd P(q + 1);
  P[0] = 1.0;
  if (q >= 1) P[1] = s;
  for (int c = 2; c <= q; ++c) P[c] = ((2.0 * c - 1.0) * s * P[c - 1] - (c - 1.0) * P[c - 2]) / c;
  W[0] = x;
  for (int c = 1; c < q; ++c) W[c] = (P[c + 1] - P[c - 1]) / (2.0 * (2.0 * c + 1.0));
  return W * legendre_vandermonde_inv_;
}

double QuadratureGrid::partial_from_panel_start(int panel, double t, const Eigen::VectorXd& u_panel) const {
  if (panel < 0 || panel >= panels_) throw std::invalid_argument("partial_from_panel_start: bad panel");
  if (u_panel.size() != order_) throw std::invalid_argument("partial_from_panel_start: size mismatch");
  const double h = 1.0 / panels_;
  const double x = (t - panel * h) / h;  // position within reference panel
  return h * cumulative_row(x).dot(u_panel);
}

double MarginalMeasure::density(double t) const {
  // Integer exponents, so 0^0 = 1 at the endpoints is the right limit.
  const double scale = std::exp(-std::lgamma(d - i + 1.0) - std::lgamma(static_cast<double>(i)));
  return scale * std::pow(1.0 - t, d - i) * std::pow(t, i - 1);
}

double integrate_marginal(const Eigen::VectorXd& h, const MarginalMeasure& mm,
                          const QuadratureGrid& grid) {
  if (h.size() != grid.nodes().size()) throw std::invalid_argument("integrate_marginal: size mismatch");
  double acc = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double term = h[j] * mm.density(grid.nodes()[j]);
    if (!std::isfinite(term)) {
      std::ostringstream os;
      os << "integrate_marginal: non-finite integrand at node t = " << grid.nodes()[j];
      throw std::runtime_error(os.str());
    }
    acc += grid.weights()[j] * term;
  }
  return acc;
}

double integrate_marginal(const std::function<double(double)>& h, const MarginalMeasure& mm,
                          const QuadratureGrid& grid) {
  return integrate_marginal(grid.tabulate(h), mm, grid);
}

NestedExpWorkspace::NestedExpWorkspace(const std::vector<Eigen::VectorXd>& g,
                                       const QuadratureGrid& grid)
    : grid_(&grid), d_(static_cast<int>(g.size())) {
  if (d_ < 2) throw std::invalid_argument("NestedExpWorkspace: need d >= 2 components");
  const int n = grid.size();
  shift_.resize(d_);
  expg_.resize(d_);
  for (int i = 0; i < d_; ++i) {
    if (g[i].size() != n) throw std::invalid_argument("NestedExpWorkspace: component size mismatch");
    shift_[i] = g[i].maxCoeff();
    if (!std::isfinite(shift_[i])) {
      // All-(-inf) component: zero mass. Keep exp values at zero.
      shift_[i] = 0.0;
    }
    expg_[i] = (g[i].array() - shift_[i]).exp();
  }

  prefix_.resize(d_ + 1);
  prefix_[0] = Eigen::VectorXd::Ones(n);
  double total = 0.0;
  for (int i = 1; i <= d_; ++i)
    prefix_[i] = grid.cumulative(expg_[i - 1].cwiseProduct(prefix_[i - 1]), &total);
  mass_shifted_ = total;

  suffix_.assign(d_ + 2, Eigen::VectorXd());
  suffix_[d_ + 1] = Eigen::VectorXd::Ones(n);
  for (int i = d_; i >= 1; --i)
    suffix_[i] = grid.suffix(expg_[i - 1].cwiseProduct(suffix_[i + 1]));

  double sum_shift = 0.0;
  for (double s : shift_) sum_shift += s;
  log_mass_ = sum_shift + std::log(mass_shifted_);
}

Eigen::VectorXd NestedExpWorkspace::marginal_weights(int i) const {
  if (i < 1 || i > d_) throw std::invalid_argument("marginal_weights: coordinate out of range");
  return grid_->weights()
      .cwiseProduct(expg_[i - 1])
      .cwiseProduct(prefix_[i - 1])
      .cwiseProduct(suffix_[i + 1]) /
      mass_shifted_;
}

double NestedExpWorkspace::cross_moment(int i, int j, const Eigen::VectorXd& a,
                                        const Eigen::VectorXd& b) const {
  if (!(1 <= i && i < j && j <= d_)) throw std::invalid_argument("cross_moment: need 1 <= i < j <= d");
  Eigen::VectorXd u = grid_->cumulative(a.cwiseProduct(expg_[i - 1]).cwiseProduct(prefix_[i - 1]));
  for (int c = i + 1; c < j; ++c) u = grid_->cumulative(expg_[c - 1].cwiseProduct(u));
  return grid_->weights()
             .cwiseProduct(b)
             .cwiseProduct(expg_[j - 1])
             .cwiseProduct(suffix_[j + 1])
             .dot(u) /
         mass_shifted_;
}

double log_nested_exp(const std::vector<Eigen::VectorXd>& g, const QuadratureGrid& grid) {
  return NestedExpWorkspace(g, grid).log_mass();
}

double nested_exp_integral(const std::vector<Eigen::VectorXd>& g, const QuadratureGrid& grid) {
  return std::exp(log_nested_exp(g, grid));
}

double pair_moment(const std::vector<Eigen::VectorXd>& g, int i, int j,
                   const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const QuadratureGrid& grid) {
  if (i >= j) throw std::invalid_argument("pair_moment: need i < j");
  NestedExpWorkspace ws(g, grid);
  return ws.cross_moment(i, j, a, b) * std::exp(ws.log_mass());
}

TriangleRule::TriangleRule(QuadratureGrid grid) : grid_(std::move(grid)) {
  const int n = grid_.size();
  const int q = grid_.nodes_per_panel();
  const int P = grid_.panels();
  const double h = 1.0 / P;
  const Eigen::VectorXd& w = grid_.weights();
  const Eigen::MatrixXd& C = grid_.cumulative_matrix();

  w_ = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    const int pb = b / q, lb = b % q;
    const double wb = w[b];
    for (int a = 0; a < pb * q; ++a) w_(a, b) = wb * w[a];
    for (int l = 0; l < q; ++l) w_(pb * q + l, b) = wb * h * C(lb, l);
  }
}

double TriangleRule::integrate(const std::function<double(double, double)>& G) const {
  const int n = size();
  const int q = grid_.nodes_per_panel();
  const Eigen::VectorXd& t = grid_.nodes();
  double acc = 0.0;
  for (int b = 0; b < n; ++b) {
    const int amax = (b / q + 1) * q;  // inner panels up to and including the outer's
    double inner = 0.0;
    for (int a = 0; a < amax; ++a) inner += w_(a, b) * G(t[a], t[b]);
    acc += inner;
  }
  return acc;
}

double TriangleRule::integrate_values(const Eigen::MatrixXd& G) const {
  if (G.rows() != w_.rows() || G.cols() != w_.cols())
    throw std::invalid_argument("TriangleRule::integrate_values: shape mismatch");
  const int n = size();
  const int q = grid_.nodes_per_panel();
  double acc = 0.0;
  for (int b = 0; b < n; ++b) {
    const int amax = (b / q + 1) * q;
    acc += w_.col(b).head(amax).dot(G.col(b).head(amax));
  }
  return acc;
}

namespace {

double simplex_integrate_rec(int level, int upper_panel, int upper_local, bool to_end,
                             const QuadratureGrid& grid,
                             const std::function<double(const double*)>& G, double* point) {
  const int q = grid.nodes_per_panel();
  const double h = 1.0 / grid.panels();
  const Eigen::MatrixXd& C = grid.cumulative_matrix();

  auto value_at = [&](int node) -> double {
    point[level - 1] = grid.nodes()[node];
    if (level == 1) return G(point);
    return simplex_integrate_rec(level - 1, node / q, node % q, false, grid, G, point);
  };

  double acc = 0.0;
  const int full_panels = to_end ? grid.panels() : upper_panel;
  for (int p = 0; p < full_panels; ++p)
    for (int l = 0; l < q; ++l) acc += grid.weights()[p * q + l] * value_at(p * q + l);
  if (!to_end) {
    for (int l = 0; l < q; ++l)
      acc += h * C(upper_local, l) * value_at(upper_panel * q + l);
  }
  return acc;
}

}  // namespace

double simplex_integrate(int d, const std::function<double(const double*)>& G,
                         const QuadratureGrid& grid) {
  if (d < 1) throw std::invalid_argument("simplex_integrate: need d >= 1");
  std::vector<double> point(d);
  return simplex_integrate_rec(d, 0, 0, true, grid, G, point.data());
}

}  // namespace aese

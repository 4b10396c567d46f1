#pragma once

/// \file quadrature.hpp
/// Quadrature over the ordered simplex {0 <= x_1 <= ... <= x_d <= 1} and the
/// one-dimensional marginal measures q_i of Lebesgue measure on it.
///
/// The workhorse is a composite Gauss-Legendre grid on [0,1] (uniform panels,
/// fixed nodes per panel) equipped with a per-panel cumulative integration
/// matrix, so that running integrals F(t) = int_0^t u can be evaluated at
/// every grid node with spectral accuracy. Nested simplex integrals of the
/// form int exp(sum_i g_i(x_i)) reduce to d cumulative sweeps.

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace aese {

/// Gauss rule on [-1, 1]: nodes ascending, weights positive.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  /// n-point Gauss-Legendre rule (weight function 1).
  static GaussRule legendre(int n);
  /// n-point Gauss-Jacobi rule for the weight (1-t)^alpha (1+t)^beta,
  /// alpha, beta > -1. Computed by the Golub-Welsch algorithm.
  static GaussRule jacobi(int n, double alpha, double beta);
};

/// n-point rule on [0,1] integrating h against the marginal measure
/// q_i(dt) = (1-t)^{d-i} t^{i-1} / ((d-i)!(i-1)!) dt; exact for polynomial h
/// of degree <= 2n-1. Returns (nodes, weights) with sum(weights) = 1/d!.
std::pair<Eigen::VectorXd, Eigen::VectorXd> marginal_gauss_rule(int d, int i, int n);

/// Composite Gauss-Legendre grid on [0,1]: `panels` uniform subintervals with
/// `nodes_per_panel` Gauss nodes each. Immutable after construction.
class QuadratureGrid {
 public:
  QuadratureGrid(int panels, int nodes_per_panel);

  int panels() const { return panels_; }
  int nodes_per_panel() const { return order_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Index of the panel containing t (clamped to [0, panels-1]).
  int panel_of(double t) const;

  /// int_0^1 u for u sampled at the grid nodes.
  double integrate(const Eigen::VectorXd& u) const { return weights_.dot(u); }

  /// Running integral F(t_j) = int_0^{t_j} u at every node; if `total` is
  /// non-null it receives int_0^1 u.
  Eigen::VectorXd cumulative(const Eigen::VectorXd& u, double* total = nullptr) const;

  /// Reverse running integral S(t_j) = int_{t_j}^1 u at every node.
  Eigen::VectorXd suffix(const Eigen::VectorXd& u, double* total = nullptr) const;

  /// int_{a_p}^{t} u where a_p is the left edge of panel p, t lies in panel p,
  /// and u_panel holds u at this panel's nodes. Integrates the interpolant of
  /// u through the panel nodes, so it is meaningful for arbitrary t in the
  /// panel (used for pointwise CDF evaluation).
  double partial_from_panel_start(int panel, double t, const Eigen::VectorXd& u_panel) const;

  /// Sample a callable at every node.
  template <class F>
  Eigen::VectorXd tabulate(F&& f) const {
    Eigen::VectorXd v(size());
    for (int j = 0; j < size(); ++j) v[j] = f(nodes_[j]);
    return v;
  }

  /// Per-panel cumulative matrix C on the reference panel [0,1]:
  /// C(a,l) = int_0^{xi_a} L_l, with L_l the Lagrange basis of the panel nodes.
  const Eigen::MatrixXd& cumulative_matrix() const { return cum_; }
  /// Reference-panel nodes in (0,1) and weights (summing to 1).
  const Eigen::VectorXd& reference_nodes() const { return ref_nodes_; }
  const Eigen::VectorXd& reference_weights() const { return ref_weights_; }

  /// Row of the cumulative matrix for an arbitrary cut point t in [0,1]
  /// relative to panel p: coefficients c_l such that
  /// int_{a_p}^{t} u ~ (width) * sum_l c_l u(node_{p,l}).
  Eigen::RowVectorXd cumulative_row(double t_in_reference) const;

 private:
  int panels_, order_;
  Eigen::VectorXd nodes_, weights_;
  Eigen::VectorXd ref_nodes_, ref_weights_;
  Eigen::MatrixXd cum_;
  Eigen::MatrixXd legendre_vandermonde_inv_;  // q x q, for cumulative_row
};

/// Marginal measure q_i of Lebesgue measure on the ordered simplex:
/// q_i(t) = (1-t)^{d-i} t^{i-1} / ((d-i)!(i-1)!), total mass 1/d!.
struct MarginalMeasure {
  int d = 2;
  int i = 1;
  double density(double t) const;
};

/// int_I h q_i with h sampled at grid nodes.
double integrate_marginal(const Eigen::VectorXd& h, const MarginalMeasure& mm,
                          const QuadratureGrid& grid);
double integrate_marginal(const std::function<double(double)>& h, const MarginalMeasure& mm,
                          const QuadratureGrid& grid);

/// log( int over the ordered simplex of exp(sum_i g_i(x_i)) dx ).
/// Each g_i is sampled at the grid nodes. Exponentials are taken after
/// subtracting the per-coordinate maximum, so the result is finite whenever
/// the g_i are.
double log_nested_exp(const std::vector<Eigen::VectorXd>& g, const QuadratureGrid& grid);

/// int over the ordered simplex of exp(sum_i g_i(x_i)) dx.
double nested_exp_integral(const std::vector<Eigen::VectorXd>& g, const QuadratureGrid& grid);

/// int over the ordered simplex of a(x_i) b(x_j) exp(sum_c g_c(x_c)) dx,
/// 1 <= i < j <= d, a and b sampled at grid nodes.
double pair_moment(const std::vector<Eigen::VectorXd>& g, int i, int j,
                   const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const QuadratureGrid& grid);

/// Prefix/suffix sweeps against the unnormalized density exp(sum g_i(x_i))
/// on the simplex, cached for repeated moment queries (moment map, covariance).
class NestedExpWorkspace {
 public:
  NestedExpWorkspace(const std::vector<Eigen::VectorXd>& g, const QuadratureGrid& grid);
  // the workspace keeps a reference to the grid
  NestedExpWorkspace(const std::vector<Eigen::VectorXd>&, QuadratureGrid&&) = delete;

  int dim() const { return d_; }
  const QuadratureGrid& grid() const { return *grid_; }
  /// log int exp(sum g).
  double log_mass() const { return log_mass_; }

  /// Node weights of the i-th marginal of the normalized density
  /// (1-based i); dotting with f at nodes gives E[f(X_i)]. Sums to 1.
  Eigen::VectorXd marginal_weights(int i) const;

  /// E[a(X_i) b(X_j)] under the normalized density, i < j (1-based).
  double cross_moment(int i, int j, const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

 private:
  const QuadratureGrid* grid_;
  int d_;
  std::vector<double> shift_;                // per-coordinate max of g_i
  std::vector<Eigen::VectorXd> expg_;        // exp(g_i - shift_i) at nodes
  std::vector<Eigen::VectorXd> prefix_;      // P_i at nodes, i = 0..d (P_0 = 1)
  std::vector<Eigen::VectorXd> suffix_;      // S_i at nodes, i = 1..d+1 (S_{d+1} = 1)
  double mass_shifted_;                      // int exp(sum (g_i - shift_i))
  double log_mass_;
};

/// Quadrature over the triangle {0 <= t <= s <= 1} for pointwise integrands
/// (d = 2 scoring grid). Reduces to a weight matrix W over the tensor grid of
/// the 1-D panels: integral = sum_{a,b} W(a,b) G(t_a, t_b). Within the panel
/// that the outer node cuts, the inner integrand is interpolated through the
/// panel nodes, so G must be evaluable slightly above the diagonal too
/// (smooth extensions of densities; see Density::log_unconstrained).
class TriangleRule {
 public:
  /// Keeps its own copy of the 1-D grid, so temporaries are fine.
  explicit TriangleRule(QuadratureGrid grid);

  const QuadratureGrid& axis() const { return grid_; }
  int size() const { return grid_.size(); }
  const Eigen::MatrixXd& weight_matrix() const { return w_; }

  /// Integrates G(t, s) over the triangle; evaluates G only where the weight
  /// can be nonzero (inner panel <= outer panel).
  double integrate(const std::function<double(double, double)>& G) const;
  /// Same, for G pre-evaluated on the full tensor grid.
  double integrate_values(const Eigen::MatrixXd& G) const;

 private:
  QuadratureGrid grid_;
  Eigen::MatrixXd w_;
};

/// Integral of a pointwise integrand over the ordered simplex in dimension d
/// by recursive nested quadrature; cost grows like size()^d / d!, so pass a
/// coarse grid for d >= 3. The point buffer handed to G has length d.
double simplex_integrate(int d, const std::function<double(const double*)>& G,
                         const QuadratureGrid& grid);

}  // namespace aese

#include "aese/truncmodel.hpp"

#include "aese/expmodel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace aese {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double normal_pdf(double t, double mu, double var) {
  return std::exp(-0.5 * (t - mu) * (t - mu) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

void validate(const NormalSpec& s) {
  if (!(s.var > 0.0)) throw std::invalid_argument("Normal: need variance > 0");
}
void validate(const NormalMixSpec& s) {
  if (!(s.var1 > 0.0) || !(s.var2 > 0.0)) throw std::invalid_argument("NormalMix: need variances > 0");
  if (!(s.w > 0.0 && s.w <= 1.0)) throw std::invalid_argument("NormalMix: need weight in (0, 1]");
}
void validate(const BetaSpec& s) {
  if (!(s.alpha > 0.0 && s.alpha < s.beta)) throw std::invalid_argument("Beta: need 0 < alpha < beta");
  if (!(s.a < 0.0)) throw std::invalid_argument("Beta: need a < 0");
  if (!(s.b > 1.0)) throw std::invalid_argument("Beta: need b > 1");
}
void validate(const GumbelSpec& s) {
  if (!(s.alpha > 0.0)) throw std::invalid_argument("Gumbel: need alpha > 0");
}
void validate(const UniformSpec&) {}

std::vector<double> parse_params(const std::string& text, size_t expected, const char* family) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("bad parameter '") + cell + "' for " + family);
    }
  }
  if (out.size() != expected)
    throw std::invalid_argument(std::string(family) + ": expected " + std::to_string(expected) +
                                " parameters, got " + std::to_string(out.size()));
  return out;
}

}  // namespace

MarginalSpec::MarginalSpec(Variant v) : v_(std::move(v)) {
  std::visit([](const auto& s) { validate(s); }, v_);
}

double MarginalSpec::pdf(double t) const {
  return std::visit(
      [t](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NormalSpec>) {
          return normal_pdf(t, s.mu, s.var);
        } else if constexpr (std::is_same_v<T, NormalMixSpec>) {
          return s.w * normal_pdf(t, s.mu1, s.var1) + (1.0 - s.w) * normal_pdf(t, s.mu2, s.var2);
        } else if constexpr (std::is_same_v<T, BetaSpec>) {
          if (t <= s.a || t >= s.b) return 0.0;
          const double lognorm = (s.beta - 1.0) * std::log(s.b - s.a) + std::lgamma(s.alpha) +
                                 std::lgamma(s.beta - s.alpha) - std::lgamma(s.beta);
          return std::exp((s.alpha - 1.0) * std::log(t - s.a) +
                          (s.beta - s.alpha - 1.0) * std::log(s.b - t) - lognorm);
        } else if constexpr (std::is_same_v<T, GumbelSpec>) {
          const double z = s.alpha * (t - s.beta);
          return s.alpha * std::exp(-z - std::exp(-z));
        } else {
          return (t >= 0.0 && t <= 1.0) ? 1.0 : 0.0;
        }
      },
      v_);
}

double MarginalSpec::log_pdf(double t) const {
  const double p = pdf(t);
  return p > 0.0 ? std::log(p) : kNegInf;
}

double MarginalSpec::sample(Rng& rng) const {
  return std::visit(
      [&rng](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NormalSpec>) {
          return s.mu + std::sqrt(s.var) * rng.normal();
        } else if constexpr (std::is_same_v<T, NormalMixSpec>) {
          if (rng.uniform() < s.w) return s.mu1 + std::sqrt(s.var1) * rng.normal();
          return s.mu2 + std::sqrt(s.var2) * rng.normal();
        } else if constexpr (std::is_same_v<T, BetaSpec>) {
          const double g1 = rng.gamma(s.alpha);
          const double g2 = rng.gamma(s.beta - s.alpha);
          return s.a + (s.b - s.a) * g1 / (g1 + g2);
        } else if constexpr (std::is_same_v<T, GumbelSpec>) {
          return s.beta - std::log(-std::log(rng.uniform_pos())) / s.alpha;
        } else {
          return rng.uniform();
        }
      },
      v_);
}

MarginalSpec MarginalSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  const std::string params = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (family == "uniform") {
    if (!params.empty()) throw std::invalid_argument("uniform takes no parameters");
    return MarginalSpec(UniformSpec{});
  }
  if (family == "normal") {
    auto p = parse_params(params, 2, "normal");
    return MarginalSpec(NormalSpec{p[0], p[1]});
  }
  if (family == "normalmix") {
    auto p = parse_params(params, 5, "normalmix");
    return MarginalSpec(NormalMixSpec{p[0], p[1], p[2], p[3], p[4]});
  }
  if (family == "beta") {
    auto p = parse_params(params, 4, "beta");
    return MarginalSpec(BetaSpec{p[0], p[1], p[2], p[3]});
  }
  if (family == "gumbel") {
    auto p = parse_params(params, 2, "gumbel");
    return MarginalSpec(GumbelSpec{p[0], p[1]});
  }
  throw std::invalid_argument("unknown marginal family: " + family);
}

std::string MarginalSpec::to_string() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NormalSpec>) {
          os << "normal:" << s.mu << ',' << s.var;
        } else if constexpr (std::is_same_v<T, NormalMixSpec>) {
          os << "normalmix:" << s.mu1 << ',' << s.var1 << ',' << s.mu2 << ',' << s.var2 << ',' << s.w;
        } else if constexpr (std::is_same_v<T, BetaSpec>) {
          os << "beta:" << s.alpha << ',' << s.beta << ',' << s.a << ',' << s.b;
        } else if constexpr (std::is_same_v<T, GumbelSpec>) {
          os << "gumbel:" << s.alpha << ',' << s.beta;
        } else {
          os << "uniform";
        }
      },
      v_);
  return os.str();
}

double TruncationModel::log_unconstrained(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("TruncationModel: point dimension mismatch");
  double s = -log_alpha;
  for (int i = 0; i < dim(); ++i) {
    const double lp = marginals[i].log_pdf(x[i]);
    if (lp == kNegInf) return kNegInf;
    s += lp;
  }
  return s;
}

double TruncationModel::true_log_density(std::span<const double> x) const {
  if (!on_simplex(x)) return kNegInf;
  return log_unconstrained(x);
}

TruncationModel build_model(std::vector<MarginalSpec> specs, const QuadratureGrid& grid) {
  if (specs.size() < 2) throw std::invalid_argument("build_model: need d >= 2 marginals");
  std::vector<Eigen::VectorXd> g;
  g.reserve(specs.size());
  for (const auto& m : specs) g.push_back(grid.tabulate([&m](double t) { return m.log_pdf(t); }));
  const double log_alpha = log_nested_exp(g, grid);
  const double alpha = std::exp(log_alpha);
  if (!(alpha > 1e-12))
    throw std::runtime_error("build_model: truncation region has negligible mass");
  return TruncationModel{std::move(specs), alpha, log_alpha};
}

SimplexSample sample(const TruncationModel& model, int n, uint64_t seed, SampleStats* stats) {
  if (n < 1) throw std::invalid_argument("sample: need n >= 1");
  const int d = model.dim();
  Rng rng(seed);
  RowMatrixXd pts(n, d);
  std::vector<double> z(d);
  long proposals = 0;
  const long cap = 10'000'000;
  int accepted = 0;
  while (accepted < n) {
    if (++proposals > cap) {
      std::ostringstream os;
      os << "sample: only " << accepted << " of " << n << " points accepted after " << cap
         << " proposals (acceptance mass alpha = " << model.alpha << ")";
      throw std::runtime_error(os.str());
    }
    bool ok = true;
    for (int i = 0; i < d; ++i) z[i] = model.marginals[i].sample(rng);
    double prev = 0.0;
    for (int i = 0; i < d; ++i) {
      if (z[i] < prev || z[i] > 1.0) {
        ok = false;
        break;
      }
      prev = z[i];
    }
    if (!ok) continue;
    for (int i = 0; i < d; ++i) pts(accepted, i) = z[i];
    ++accepted;
  }
  if (stats) *stats = SampleStats{proposals, accepted};
  return SimplexSample{std::move(pts)};
}

}  // namespace aese

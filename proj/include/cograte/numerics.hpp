#ifndef COGRATE_NUMERICS_HPP
#define COGRATE_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cograte {

/// Distribution of the fading power |h|^2. Only the exponential law
/// (Rayleigh amplitude) is provided; `mean_power` is E{|h|^2}.
struct FadingDist {
  enum class Kind { exponential };

  double mean_power = 1.0;
  Kind kind = Kind::exponential;

  void validate() const {
    if (!(mean_power > 0.0) || !std::isfinite(mean_power))
      throw std::invalid_argument("mean_power must be positive and finite");
  }
};

/// Quadrature against the unit-mean fading density. Nodes are expressed in
/// units of the mean power and are scaled by FadingDist::mean_power at use.
class QuadratureRule {
 public:
  QuadratureRule() = default;
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
      : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.empty() || nodes_.size() != weights_.size())
      throw std::invalid_argument("quadrature nodes and weights must be non-empty and equal length");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!(nodes_[i] >= 0.0) || !(weights_[i] > 0.0))
        throw std::invalid_argument("quadrature nodes must be >= 0 and weights > 0");
    }
  }

  /// Gauss-Laguerre rule of the given order (weight function e^{-x}).
  static QuadratureRule gauss_laguerre(int order);

  /// All mass at one point (x = 1 in mean-power units). Turns the expectation
  /// into an evaluation at `mean_power`, i.e. a non-fading channel.
  static QuadratureRule point_mass() { return QuadratureRule({1.0}, {1.0}); }

  std::size_t order() const { return nodes_.size(); }
  /// True for Gauss-Laguerre rules, which integrate against e^{-x} on [0, inf).
  bool laguerre() const { return laguerre_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  bool laguerre_ = false;
};

inline constexpr int kDefaultQuadratureOrder = 96;
/// Beyond this order the smallest Gauss-Laguerre weights underflow.
inline constexpr int kMaxQuadratureOrder = 160;

/// Nodes smaller than this (in |h|^2) are lifted to it before evaluation.
inline constexpr double kMinFadingNode = 1e-12;

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series for x < a + 1, Lentz continued fraction for Q = 1 - P otherwise.
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("regularized_gamma_p: a must be > 0");
  if (!(x >= 0.0)) throw std::domain_error("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  constexpr double kEps = 1e-16;
  const int max_iter = 100000 + static_cast<int>(10.0 * std::sqrt(a));
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);

  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < max_iter; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::min(1.0, sum * std::exp(log_prefactor));
  }

  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_prefactor) * h);
}

/// Gaussian tail Q(x) = P(Z > x).
inline double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace detail {

// Wichura, AS241 (PPND16): inverse of the standard normal CDF.
inline double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

}  // namespace detail

/// Inverse of gaussian_q on (0, 1).
inline double gaussian_q_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gaussian_q_inv: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  double x = -detail::normal_quantile(p);
  // One Newton step on Q cleans up the last few ulps of the rational fit.
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (pdf > 0.0) x += (gaussian_q(x) - p) / pdf;
  return x;
}

inline QuadratureRule QuadratureRule::gauss_laguerre(int order) {
  if (order < 1 || order > kMaxQuadratureOrder)
    throw std::invalid_argument("quadrature order must lie in [1, " + std::to_string(kMaxQuadratureOrder) + "]");
  const int n = order;
  std::vector<double> x(n), w(n);
  std::vector<long double> roots(n);
  // Newton iteration on L_n (extended precision) seeded with the asymptotic
  // root guesses used by Numerical Recipes' gaulag (alpha = 0).
  long double z = 0.0L;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0L / (1.0L + 2.4L * n);
    } else if (i == 1) {
      z += 15.0L / (1.0L + 2.5L * n);
    } else {
      const long double ai = i - 1;
      z += ((1.0L + 2.55L * ai) / (1.9L * ai)) * (z - roots[i - 2]);
    }
    long double pp = 0.0L;
    long double p2 = 0.0L;
    for (int it = 0; it < 100; ++it) {
      long double p1 = 1.0L;
      p2 = 0.0L;
      for (int j = 0; j < n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2 * j + 1 - z) * p2 - j * p3) / (j + 1);
      }
      pp = (n * p1 - n * p2) / z;
      const long double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-18L * std::abs(z)) break;
    }
    roots[i] = z;
    x[i] = static_cast<double>(z);
    // w_i = x_i / ((n+1)^2 L_{n+1}(x_i)^2) rewritten with L_n' and L_{n-1}.
    w[i] = static_cast<double>(-1.0L / (pp * n * p2));
  }
  QuadratureRule rule(std::move(x), std::move(w));
  rule.laguerre_ = true;
  return rule;
}

/// Raised by expect_over_fading when the integrand fails at a node.
class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(std::size_t node_index, const std::string& what)
      : std::runtime_error("integrand failed at quadrature node " + std::to_string(node_index) + ": " + what),
        node_index_(node_index) {}
  std::size_t node_index() const { return node_index_; }

 private:
  std::size_t node_index_;
};

/// E_{|h|^2}{ f(|h|^2) } as a weighted sum over the rule's scaled nodes.
template <typename F>
double expect_over_fading(F&& f, const FadingDist& dist, const QuadratureRule& rule) {
  const auto& nodes = rule.nodes();
  const auto& weights = rule.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double h2 = std::max(kMinFadingNode, nodes[i] * dist.mean_power);
    double v;
    try {
      v = f(h2);
    } catch (const std::exception& e) {
      throw quadrature_error(i, e.what());
    }
    if (!std::isfinite(v)) throw quadrature_error(i, "non-finite value");
    sum += weights[i] * v;
  }
  return sum;
}

/// E_{|h|^2}{ f(|h|^2) } for an f equal to `below` on [0, knee). A Laguerre
/// rule is restarted at the knee (the exponential law is memoryless), so the
/// kink there never falls between nodes. Other rules use the plain sum.
template <typename F>
double expect_over_fading_above(F&& f, double knee, double below, const FadingDist& dist,
                                const QuadratureRule& rule) {
  if (!rule.laguerre() || !(knee > 0.0)) return expect_over_fading(f, dist, rule);
  const double tail = std::exp(-knee / dist.mean_power);
  const double head = -std::expm1(-knee / dist.mean_power);
  if (!(tail > 0.0)) return below;
  const auto shifted = [&](double h2) { return f(knee + h2); };
  return below * head + tail * expect_over_fading(shifted, dist, rule);
}

}  // namespace cograte

#endif  // COGRATE_NUMERICS_HPP

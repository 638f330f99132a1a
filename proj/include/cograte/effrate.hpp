#ifndef COGRATE_EFFRATE_HPP
#define COGRATE_EFFRATE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cograte/fbcode.hpp"
#include "cograte/markov8.hpp"
#include "cograte/numerics.hpp"
#include "cograte/optimize.hpp"
#include "cograte/sensing.hpp"

namespace cograte {

/// Constant rates (bits/channel use) after busy and idle sensing decisions.
struct FixedRates {
  double r1;
  double r2;
};

/// Variable-rate transmission at a target decoding error probability.
struct TargetError {
  double eps;
};

using TransmissionMode = std::variant<FixedRates, TargetError>;

/// Everything needed to evaluate the secondary link's effective rate.
struct LinkPolicy {
  ActivityChain chain;
  SensingConfig sensing;
  FrameConfig frame;
  double p1 = 1.0;   ///< Linear power after a busy decision.
  double p2 = 10.0;  ///< Linear power after an idle decision.
  TransmissionMode mode = FixedRates{0.002, 0.025};
  FadingDist dist;
  QuadratureRule rule = QuadratureRule::gauss_laguerre(kDefaultQuadratureOrder);
  /// Replaces the energy-detector P_d/P_f (e.g. to model perfect sensing).
  std::optional<SensingPerf> perf_override;

  SensingPerf perf() const { return perf_override ? *perf_override : sensing_perf(sensing); }
  ScenarioSnrs snrs() const {
    return scenario_snrs(p1, p2, sensing.noise_var, sensing.interference_var, frame);
  }

  /// Sets the sensing duration consistently in both the detector and frame.
  void set_sense_duration(double seconds) {
    sensing.sense_duration = seconds;
    frame.sense_duration = seconds;
  }
  void set_bandwidth(double hz) {
    sensing.bandwidth = hz;
    frame.bandwidth = hz;
  }

  void validate() const {
    chain.validate();
    sensing.validate();
    frame.validate();
    dist.validate();
    const auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
    if (!same(sensing.sense_duration, frame.sense_duration))
      throw std::invalid_argument("sense_duration differs between sensing and frame");
    if (!same(sensing.bandwidth, frame.bandwidth)) throw std::invalid_argument("bandwidth differs between sensing and frame");
    if (!(p1 > 0.0)) throw std::invalid_argument("p1 must be > 0");
    if (!(p2 > 0.0)) throw std::invalid_argument("p2 must be > 0");
    if (p1 > p2) throw std::invalid_argument("p1 must not exceed p2");
    if (const auto* f = std::get_if<FixedRates>(&mode)) {
      if (!(f->r1 >= 0.0) || !(f->r2 >= 0.0)) throw std::invalid_argument("r1 and r2 must be >= 0");
    } else {
      const double eps = std::get<TargetError>(mode).eps;
      if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    }
    if (perf_override) {
      const auto& p = *perf_override;
      if (!(p.p_detect >= 0.0 && p.p_detect <= 1.0) || !(p.p_false_alarm >= 0.0 && p.p_false_alarm <= 1.0))
        throw std::invalid_argument("perf_override probabilities must lie in [0, 1]");
    }
  }
};

struct EffRateDiagnostics {
  /// Fading mass where the variable rate after busy / idle decisions clamps to 0.
  double clamp_fraction_busy = 0.0;
  double clamp_fraction_idle = 0.0;
  std::size_t quadrature_order = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = true;
  /// Spread of the values reached by the multi-start refinements.
  double multistart_spread = 0.0;
};

struct EffRateResult {
  double value;  ///< bits/s/Hz
  double theta;
  TransmissionMode argmax;
  EffRateDiagnostics diagnostics;
};

/// How the buffer-free (theta = 0) closed forms weight the busy and idle
/// scenarios.
enum class ZeroThetaWeights {
  /// Stationary probabilities q/(q+s), s/(q+s): the theta -> 0 limit of the
  /// theta > 0 expressions.
  stationary,
  /// ((1-s)(3q-s)+4sq)/(2(s+q)) and ((1-s)(3s-q)+4sq)/(2(s+q)) as the
  /// closed form is commonly printed. Differs from the limit except on a
  /// thin set of chains (e.g. s = 1/2, q = 1/6).
  as_printed,
};

namespace detail {

// Quantities shared by every evaluation for one policy.
struct LinkModel {
  ActivityChain chain;
  SensingPerf perf;
  ScenarioSnrs snrs;
  FrameConfig frame;
  FadingDist dist;
  const QuadratureRule* rule;
  double n;

  explicit LinkModel(const LinkPolicy& p)
      : chain(p.chain), perf(p.perf()), snrs(p.snrs()), frame(p.frame), dist(p.dist), rule(&p.rule),
        n(static_cast<double>(p.frame.blocklength())) {}

  double frame_bandwidth_product() const { return frame.frame_duration * frame.bandwidth; }
};

inline std::array<double, 2> zero_theta_weights(const ActivityChain& c, ZeroThetaWeights w) {
  if (w == ZeroThetaWeights::stationary) {
    const auto pr = priors(c);
    return {pr.busy, pr.idle};
  }
  const double s = c.s;
  const double q = c.q;
  return {((1.0 - s) * (3.0 * q - s) + 4.0 * s * q) / (2.0 * (s + q)),
          ((1.0 - s) * (3.0 * s - q) + 4.0 * s * q) / (2.0 * (s + q))};
}

inline double effective_rate_fixed(const LinkModel& m, double theta, double r1, double r2) {
  const PhiDiag phi = phi_fixed(theta, m.frame, r1, r2);
  const double mean_gap = expect_over_fading(
      [&](double h2) {
        return spectral_gap_rank2(phi, transition_rows_fixed(h2, m.chain, m.perf, m.snrs, m.frame, r1, r2));
      },
      m.dist, *m.rule);
  return std::max(0.0, -std::log1p(-mean_gap) / (theta * m.frame_bandwidth_product()));
}

inline double zero_theta_fixed(const LinkModel& m, double r1, double r2, ZeroThetaWeights weights) {
  const auto w = zero_theta_weights(m.chain, weights);
  std::array<double, 4> mean_err{};
  for (int sc = 1; sc <= 4; ++sc) {
    mean_err[sc - 1] = expect_over_fading(
        [&](double h2) { return scenario_error_fixed(sc, h2, m.snrs, m.frame, r1, r2); }, m.dist, *m.rule);
  }
  const double pd = m.perf.p_detect;
  const double pf = m.perf.p_false_alarm;
  const double bits = w[0] * pd * r1 * (1.0 - mean_err[0]) + w[0] * (1.0 - pd) * r2 * (1.0 - mean_err[1]) +
                      w[1] * pf * r1 * (1.0 - mean_err[2]) + w[1] * (1.0 - pf) * r2 * (1.0 - mean_err[3]);
  return m.frame.data_fraction() * bits;
}

inline double effective_rate_variable(const LinkModel& m, double theta, double eps) {
  const PhiDiag phi = phi_variable(theta, m.frame, m.snrs, eps, m.dist, *m.rule);
  const double mean_gap = expect_over_fading(
      [&](double h2) {
        return spectral_gap_rank2(phi, transition_rows_variable(h2, m.chain, m.perf, m.snrs, m.frame, eps));
      },
      m.dist, *m.rule);
  return std::max(0.0, -std::log1p(-mean_gap) / (theta * m.frame_bandwidth_product()));
}

inline double zero_theta_variable(const LinkModel& m, double eps, ZeroThetaWeights weights) {
  const auto w = zero_theta_weights(m.chain, weights);
  const auto expect = [&](auto&& f) { return expect_over_fading(f, m.dist, *m.rule); };
  const auto mean_rate = [&](bool busy) {
    const double knee = rate_clamp_point(busy ? m.snrs.snr1 : m.snrs.snr4, m.frame.blocklength(), eps);
    return expect_over_fading_above([&](double h2) { return variable_rate(busy, h2, m.snrs, m.frame, eps); }, knee,
                                    0.0, m.dist, *m.rule);
  };
  const double mean_r1 = mean_rate(true);
  const double mean_r2 = mean_rate(false);
  const double miss = expect([&](double h2) { return mismatch_error_missdetect(h2, m.snrs, m.frame, eps); });
  const double false_alarm = expect([&](double h2) { return mismatch_error_falsealarm(h2, m.snrs, m.frame, eps); });
  const double pd = m.perf.p_detect;
  const double pf = m.perf.p_false_alarm;
  const double bits = w[0] * pd * mean_r1 * (1.0 - eps) + w[0] * (1.0 - pd) * mean_r2 * (1.0 - miss) +
                      w[1] * pf * mean_r1 * (1.0 - false_alarm) + w[1] * (1.0 - pf) * mean_r2 * (1.0 - eps);
  return m.frame.data_fraction() * bits;
}

inline std::array<double, 2> clamp_fractions(const LinkModel& m, double eps) {
  const auto mass = [&](bool busy) {
    const double snr = busy ? m.snrs.snr1 : m.snrs.snr4;
    const long n = m.frame.blocklength();
    return expect_over_fading_above([&](double h2) { return fb_rate_unclamped(snr, h2, n, eps) < 0.0 ? 1.0 : 0.0; },
                                    rate_clamp_point(snr, n, eps), 1.0, m.dist, *m.rule);
  };
  return {mass(true), mass(false)};
}

inline const FixedRates& fixed_rates(const LinkPolicy& p) {
  if (const auto* f = std::get_if<FixedRates>(&p.mode)) return *f;
  throw std::invalid_argument("policy is not in fixed-rate mode");
}

inline double target_eps(const LinkPolicy& p) {
  if (const auto* t = std::get_if<TargetError>(&p.mode)) return t->eps;
  throw std::invalid_argument("policy is not in variable-rate mode");
}

inline void require_positive_theta(double theta) {
  if (!(theta > 0.0)) throw std::domain_error("theta must be > 0; use the zero-theta closed form at theta = 0");
}

}  // namespace detail

/// Effective rate (bits/s/Hz) of fixed-rate transmission:
/// -1/(theta T B) ln E_{|h|^2}{ sp(phi(-theta) R(|h|^2)) }.
inline double effective_rate_fixed(double theta, const LinkPolicy& policy) {
  detail::require_positive_theta(theta);
  const auto& rates = detail::fixed_rates(policy);
  return detail::effective_rate_fixed(detail::LinkModel(policy), theta, rates.r1, rates.r2);
}

/// Effective rate of variable-rate transmission. The ON-state MGFs are fading
/// averages computed once and held fixed inside the outer fading average of
/// the spectral radius.
inline double effective_rate_variable(double theta, const LinkPolicy& policy) {
  detail::require_positive_theta(theta);
  return detail::effective_rate_variable(detail::LinkModel(policy), theta, detail::target_eps(policy));
}

/// Throughput without buffer constraints, fixed rates.
inline double zero_theta_fixed(const LinkPolicy& policy, ZeroThetaWeights weights = ZeroThetaWeights::stationary) {
  const auto& rates = detail::fixed_rates(policy);
  return detail::zero_theta_fixed(detail::LinkModel(policy), rates.r1, rates.r2, weights);
}

/// Throughput without buffer constraints, variable rates.
inline double zero_theta_variable(const LinkPolicy& policy,
                                  ZeroThetaWeights weights = ZeroThetaWeights::stationary) {
  return detail::zero_theta_variable(detail::LinkModel(policy), detail::target_eps(policy), weights);
}

/// Upper end of the fixed-rate search box: capacity at the 99th percentile of
/// the fading power with the best-case SNR4.
inline double fixed_rate_search_max(const LinkPolicy& policy) {
  const double h2_q99 = -policy.dist.mean_power * std::log(0.01);
  return std::log2(1.0 + policy.snrs().snr4 * h2_q99);
}

struct OptimizerOptions {
  int grid_points = 25;         ///< Per axis for (r1, r2); total for eps.
  double rel_tolerance = 1e-9;  ///< Final step relative to the search width.
  double eps_min = 1e-12;
  double eps_max = 1.0 - 1e-9;
};

/// Maximizes the fixed-rate effective rate over (r1, r2) in [0, r_max]^2:
/// coarse grid, then compass search from the four corners of the best cell.
inline EffRateResult optimize_fixed(double theta, const LinkPolicy& policy, const OptimizerOptions& opts = {}) {
  if (!(theta >= 0.0)) throw std::domain_error("theta must be >= 0");
  const detail::LinkModel model(policy);
  int evaluations = 0;
  const auto objective = [&](double r1, double r2) {
    ++evaluations;
    return theta > 0.0 ? detail::effective_rate_fixed(model, theta, r1, r2)
                       : detail::zero_theta_fixed(model, r1, r2, ZeroThetaWeights::stationary);
  };

  const double r_max = fixed_rate_search_max(policy);
  const int g = std::max(3, opts.grid_points);
  const double cell = r_max / (g - 1);
  std::vector<double> grid(static_cast<std::size_t>(g) * g);
  int bi = 0, bj = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      grid[i * g + j] = objective(i * cell, j * cell);
      if (grid[i * g + j] > grid[bi * g + bj]) {
        bi = i;
        bj = j;
      }
    }
  }
  // Cell adjacent to the best vertex, leaning towards the better neighbours.
  const auto at = [&](int i, int j) {
    return (i < 0 || j < 0 || i >= g || j >= g) ? -std::numeric_limits<double>::infinity() : grid[i * g + j];
  };
  int ci = (at(bi + 1, bj) >= at(bi - 1, bj)) ? bi : bi - 1;
  int cj = (at(bi, bj + 1) >= at(bi, bj - 1)) ? bj : bj - 1;
  ci = std::clamp(ci, 0, g - 2);
  cj = std::clamp(cj, 0, g - 2);

  EffRateResult result{-1.0, theta, FixedRates{0.0, 0.0}, {}};
  double worst = std::numeric_limits<double>::infinity();
  bool converged = true;
  int iterations = 0;
  for (int di = 0; di <= 1; ++di) {
    for (int dj = 0; dj <= 1; ++dj) {
      const std::array<double, 2> start{(ci + di) * cell, (cj + dj) * cell};
      const auto r = opt::compass_search_max([&](const std::array<double, 2>& x) { return objective(x[0], x[1]); },
                                             start, {0.0, 0.0}, {r_max, r_max}, cell,
                                             opts.rel_tolerance * r_max);
      iterations += r.iterations;
      converged = converged && r.converged;
      worst = std::min(worst, r.value);
      if (r.value > result.value) {
        result.value = r.value;
        result.argmax = FixedRates{r.x[0], r.x[1]};
      }
    }
  }
  result.diagnostics.quadrature_order = policy.rule.order();
  result.diagnostics.iterations = iterations;
  result.diagnostics.evaluations = evaluations;
  result.diagnostics.converged = converged;
  result.diagnostics.multistart_spread = result.value - worst;
  return result;
}

/// Maximizes the variable-rate effective rate over the target error eps.
/// Grid and golden-section search run in log-odds u = ln(eps/(1-eps)), which
/// matches a log-eps grid for small eps and stays resolved near eps -> 1.
inline EffRateResult optimize_variable(double theta, const LinkPolicy& policy, const OptimizerOptions& opts = {}) {
  if (!(theta >= 0.0)) throw std::domain_error("theta must be >= 0");
  const detail::LinkModel model(policy);
  int evaluations = 0;
  const auto to_eps = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };
  const auto objective = [&](double u) {
    ++evaluations;
    const double eps = to_eps(u);
    return theta > 0.0 ? detail::effective_rate_variable(model, theta, eps)
                       : detail::zero_theta_variable(model, eps, ZeroThetaWeights::stationary);
  };

  const double u_lo = std::log(opts.eps_min / (1.0 - opts.eps_min));
  const double u_hi = std::log(opts.eps_max / (1.0 - opts.eps_max));
  const int g = std::max(3, 2 * opts.grid_points);
  const double du = (u_hi - u_lo) / (g - 1);
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < g; ++k) {
    const double v = objective(u_lo + k * du);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double a = u_lo + std::max(0, best - 1) * du;
  const double b = u_lo + std::min(g - 1, best + 1) * du;
  const auto r = opt::golden_section_max(objective, a, b, opts.rel_tolerance * (u_hi - u_lo));

  EffRateResult result{r.value, theta, TargetError{to_eps(r.x)}, {}};
  if (best_value > r.value) {
    result.value = best_value;
    result.argmax = TargetError{to_eps(u_lo + best * du)};
  }
  const auto clamps = detail::clamp_fractions(model, std::get<TargetError>(result.argmax).eps);
  result.diagnostics.clamp_fraction_busy = clamps[0];
  result.diagnostics.clamp_fraction_idle = clamps[1];
  result.diagnostics.quadrature_order = policy.rule.order();
  result.diagnostics.iterations = r.iterations;
  result.diagnostics.evaluations = evaluations;
  result.diagnostics.converged = r.converged;
  return result;
}

/// Average decoding error for the policy's variable-rate target.
inline double average_error_prob(const LinkPolicy& policy) {
  return average_error_prob(policy.chain, policy.perf(), policy.snrs(), policy.frame, detail::target_eps(policy),
                            policy.dist, policy.rule);
}

}  // namespace cograte

#endif  // COGRATE_EFFRATE_HPP

#ifndef COGRATE_SENSING_HPP
#define COGRATE_SENSING_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "cograte/numerics.hpp"
#include "cograte/rng.hpp"

namespace cograte {

/// Two-state primary-activity chain. `s` = P(busy -> idle), `q` = P(idle -> busy).
struct ActivityChain {
  double s = 0.6;
  double q = 0.2;

  void validate() const {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("s must lie in (0, 1)");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
  }
};

struct Priors {
  double busy;
  double idle;
};

/// Stationary busy/idle probabilities q/(q+s) and s/(s+q).
inline Priors priors(const ActivityChain& chain) {
  const double busy = chain.q / (chain.q + chain.s);
  return {busy, 1.0 - busy};
}

/// Energy-detector configuration. Durations in seconds, bandwidth in Hz,
/// threshold and variances in per-sample power units.
struct SensingConfig {
  double sense_duration = 1e-3;
  double bandwidth = 1e4;
  double threshold = 0.1;
  double noise_var = 0.05;
  double interference_var = 0.12;

  /// NB rounded to the nearest integer.
  long sample_count() const { return std::lround(sense_duration * bandwidth); }
  /// True when N*B was not already an integer (to within 1e-9).
  bool sample_count_rounded() const {
    const double nb = sense_duration * bandwidth;
    return std::abs(nb - std::round(nb)) > 1e-9 * std::max(1.0, nb);
  }

  void validate() const {
    if (!(sense_duration > 0.0)) throw std::invalid_argument("sense_duration must be > 0");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
    if (sample_count() < 1) throw std::invalid_argument("sense_duration*bandwidth must round to at least 1 sample");
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
    if (!(noise_var > 0.0)) throw std::invalid_argument("noise_var must be > 0");
    // Zero interference is allowed: it is the identical-hypotheses limit.
    if (!(interference_var >= 0.0)) throw std::invalid_argument("interference_var must be >= 0");
  }
};

struct SensingPerf {
  double p_detect;
  double p_false_alarm;
};

inline double false_alarm_prob(const SensingConfig& cfg) {
  const auto nb = static_cast<double>(cfg.sample_count());
  return 1.0 - regularized_gamma_p(nb, nb * cfg.threshold / cfg.noise_var);
}

inline double detection_prob(const SensingConfig& cfg) {
  const auto nb = static_cast<double>(cfg.sample_count());
  return 1.0 - regularized_gamma_p(nb, nb * cfg.threshold / (cfg.noise_var + cfg.interference_var));
}

inline SensingPerf sensing_perf(const SensingConfig& cfg) { return {detection_prob(cfg), false_alarm_prob(cfg)}; }

struct SensedProbs {
  double busy;
  double idle;
};

/// Probabilities that the channel is sensed busy / idle.
inline SensedProbs sensed_state_probs(const ActivityChain& chain, const SensingPerf& perf) {
  const double busy = (chain.q * perf.p_detect + chain.s * perf.p_false_alarm) / (chain.q + chain.s);
  return {busy, 1.0 - busy};
}

struct TestStatistic {
  double energy;
  bool decided_busy;
};

/// One draw of the energy detector statistic (1/NB) sum |y_i|^2 with complex
/// Gaussian noise and, when `busy`, an independent complex Gaussian primary
/// signal of variance interference_var. `trial` selects an independent
/// replication under the same seed.
inline TestStatistic simulate_test_statistic(const SensingConfig& cfg, bool busy, std::uint64_t seed,
                                             std::uint64_t trial = 0) {
  const CounterStream stream(seed);
  const long nb = cfg.sample_count();
  const double var = cfg.noise_var + (busy ? cfg.interference_var : 0.0);
  // Real and imaginary parts each carry half the complex variance.
  const double scale = std::sqrt(0.5 * var);
  double energy = 0.0;
  for (long i = 0; i < nb; ++i) {
    const auto z = stream.normals(trial, static_cast<std::uint32_t>(i));
    const double re = scale * z[0];
    const double im = scale * z[1];
    energy += re * re + im * im;
  }
  energy /= static_cast<double>(nb);
  return {energy, energy > cfg.threshold};
}

/// Right-hand side of the interference constraints: I0 / max_j E{|g_sp,j|^2},
/// plus optional peak power caps.
struct InterferenceBudget {
  double i0_over_gain;
  double peak_p1 = std::numeric_limits<double>::infinity();
  double peak_p2 = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(i0_over_gain > 0.0)) throw std::invalid_argument("i0_over_gain must be > 0");
    if (!(peak_p1 > 0.0)) throw std::invalid_argument("peak_p1 must be > 0");
    if (!(peak_p2 > 0.0)) throw std::invalid_argument("peak_p2 must be > 0");
  }
};

enum class InterferenceMode {
  bound_p1,          ///< p1 <= I0/g only.
  avg_interference,  ///< Pd*p1 + (1-Pd)*p2 <= I0/g, plus peak caps.
};

enum class BindingConstraint { none, interference, peak_p1, peak_p2 };

inline const char* to_string(BindingConstraint b) {
  switch (b) {
    case BindingConstraint::none: return "none";
    case BindingConstraint::interference: return "interference";
    case BindingConstraint::peak_p1: return "peak_p1";
    case BindingConstraint::peak_p2: return "peak_p2";
  }
  return "?";
}

struct FeasibilityReport {
  bool feasible;
  /// Constraint that is tight (met with equality) or violated; `none` if slack.
  BindingConstraint binding;
  /// Interference-side quantity compared against i0_over_gain.
  double interference_level;
  /// Largest p2 keeping the configuration feasible for the given p1 (0 if none).
  double max_feasible_p2;
};

inline FeasibilityReport check_power_feasibility(double p1, double p2, const SensingPerf& perf,
                                                 const InterferenceBudget& budget, InterferenceMode mode) {
  if (!(p1 > 0.0) || !(p2 > 0.0)) throw std::invalid_argument("powers must be positive");
  budget.validate();
  const double limit = budget.i0_over_gain;
  const auto tight = [](double lhs, double rhs) {
    return std::isfinite(rhs) && std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs);
  };

  FeasibilityReport report{true, BindingConstraint::none, 0.0, 0.0};
  if (mode == InterferenceMode::bound_p1) {
    report.interference_level = p1;
    report.feasible = p1 <= limit || tight(p1, limit);
    if (!report.feasible || tight(p1, limit)) report.binding = BindingConstraint::interference;
    report.max_feasible_p2 = report.feasible ? budget.peak_p2 : 0.0;
    return report;
  }

  const double pd = perf.p_detect;
  const double level = pd * p1 + (1.0 - pd) * p2;
  report.interference_level = level;

  const bool interference_ok = level <= limit || tight(level, limit);
  const bool peak1_ok = p1 <= budget.peak_p1 || tight(p1, budget.peak_p1);
  const bool peak2_ok = p2 <= budget.peak_p2 || tight(p2, budget.peak_p2);
  report.feasible = interference_ok && peak1_ok && peak2_ok;

  if (!interference_ok || tight(level, limit)) {
    report.binding = BindingConstraint::interference;
  } else if (!peak1_ok || tight(p1, budget.peak_p1)) {
    report.binding = BindingConstraint::peak_p1;
  } else if (!peak2_ok || tight(p2, budget.peak_p2)) {
    report.binding = BindingConstraint::peak_p2;
  }

  const bool p1_ok = peak1_ok && (pd * p1 <= limit || tight(pd * p1, limit));
  if (!p1_ok) {
    report.max_feasible_p2 = 0.0;
  } else if (pd >= 1.0) {
    report.max_feasible_p2 = budget.peak_p2;
  } else {
    report.max_feasible_p2 = std::min(budget.peak_p2, std::max(0.0, (limit - pd * p1) / (1.0 - pd)));
  }
  return report;
}

}  // namespace cograte

#endif  // COGRATE_SENSING_HPP

#ifndef COGRATE_QUEUESIM_HPP
#define COGRATE_QUEUESIM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cograte/effrate.hpp"
#include "cograte/fbcode.hpp"
#include "cograte/markov8.hpp"
#include "cograte/rng.hpp"

namespace cograte {

struct SimConfig {
  LinkPolicy policy;
  double arrival_rate = 0.0;  ///< Constant arrivals, bits per frame.
  std::uint64_t horizon_frames = 1'000'000;
  std::uint64_t seed = 1;
  std::vector<double> q_levels;  ///< Buffer thresholds in bits, strictly increasing.

  void validate() const {
    policy.validate();
    if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate)) throw std::invalid_argument("arrival_rate must be >= 0");
    if (horizon_frames < 10'000) throw std::invalid_argument("horizon_frames must be >= 10000");
    if (q_levels.empty()) throw std::invalid_argument("q_levels must not be empty");
    for (std::size_t i = 0; i < q_levels.size(); ++i) {
      if (!(q_levels[i] > 0.0)) throw std::invalid_argument("q_levels must be positive");
      if (i > 0 && !(q_levels[i] > q_levels[i - 1])) throw std::invalid_argument("q_levels must be strictly increasing");
    }
  }
};

struct OverflowPoint {
  double q;
  double prob;  ///< Fraction of post-burn-in frames with queue >= q.
  double ci_low;
  double ci_high;
  std::uint64_t hits;
  /// Separate excursions of the queue to q or above (upcrossings).
  std::uint64_t episodes;
};

struct DecayFit {
  bool ok = false;
  bool linear = false;  ///< Window reached the R^2 threshold.
  double rate = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  double q_first = std::numeric_limits<double>::quiet_NaN();  ///< Fit window in bits.
  double q_last = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
  std::string message;
};

struct DecayFitOptions {
  std::size_t min_points = 3;
  double min_r_squared = 0.98;
};

/// Slope of -ln P(Q >= q) against q. Among contiguous runs of positive
/// probabilities, the longest window whose fit reaches `min_r_squared` is
/// used (ties broken by R^2); failing that, all positive points.
/// `weights` (optional, same length) weight the least-squares fit, e.g. by
/// the inverse variance of each log-probability.
inline DecayFit estimate_decay_rate(std::span<const double> q, std::span<const double> prob,
                                    std::span<const double> weights, const DecayFitOptions& opts = {}) {
  if (q.size() != prob.size()) throw std::invalid_argument("q and prob must have equal length");
  if (!weights.empty() && weights.size() != q.size()) throw std::invalid_argument("weights must match q in length");
  std::vector<double> xs, ys, ws;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (prob[i] > 0.0) {
      xs.push_back(q[i]);
      ys.push_back(-std::log(prob[i]));
      ws.push_back(weights.empty() ? 1.0 : weights[i]);
      if (!(ws.back() > 0.0)) throw std::invalid_argument("weights must be positive");
    }
  }
  DecayFit fit;
  if (xs.size() < std::max<std::size_t>(2, opts.min_points)) {
    fit.message = xs.empty() ? "tail is identically zero; decay rate undefined"
                             : "fewer nonzero tail points than required for a fit";
    return fit;
  }

  const auto ls = [&](std::size_t lo, std::size_t hi, double& slope, double& icpt, double& r2) {
    double m = 0, sx = 0, sy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
      m += ws[i];
      sx += ws[i] * xs[i];
      sy += ws[i] * ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
      sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
      sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
      syy += ws[i] * (ys[i] - my) * (ys[i] - my);
    }
    slope = sxy / sxx;
    icpt = my - slope * mx;
    r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  };

  const std::size_t n = xs.size();
  const std::size_t min_len = std::max<std::size_t>(2, opts.min_points);
  bool found = false;
  for (std::size_t len = n; len >= min_len && !found; --len) {
    double best_r2 = -1.0;
    for (std::size_t lo = 0; lo + len <= n; ++lo) {
      double slope, icpt, r2;
      ls(lo, lo + len - 1, slope, icpt, r2);
      if (r2 >= opts.min_r_squared && r2 > best_r2) {
        best_r2 = r2;
        fit.rate = slope;
        fit.intercept = icpt;
        fit.r_squared = r2;
        fit.q_first = xs[lo];
        fit.q_last = xs[lo + len - 1];
        fit.points = len;
        found = true;
      }
    }
  }
  if (!found) {
    ls(0, n - 1, fit.rate, fit.intercept, fit.r_squared);
    fit.q_first = xs.front();
    fit.q_last = xs.back();
    fit.points = n;
    fit.message = "no window reached the linearity threshold; fitted all nonzero points";
  }
  fit.ok = true;
  fit.linear = found;
  return fit;
}

inline DecayFit estimate_decay_rate(std::span<const double> q, std::span<const double> prob,
                                    const DecayFitOptions& opts = {}) {
  return estimate_decay_rate(q, prob, {}, opts);
}

struct FrameRecord {
  std::uint64_t frame;
  int state;  ///< 0..7, see markov8.hpp
  double h2;
  double rate;     ///< bits per channel use attempted
  double service;  ///< bits delivered this frame
  double queue;    ///< backlog after the frame
};

struct SimResult {
  std::vector<OverflowPoint> overflow;
  DecayFit decay;
  StateVector state_occupancy{};
  double mean_service = 0.0;  ///< bits per frame
  std::uint64_t frames_used = 0;
  std::uint64_t burn_in = 0;
  /// Deepest q level saw too few overflow episodes; intervals were widened.
  bool horizon_warning = false;
};

namespace detail {

// Wilson score interval.
inline std::pair<double, double> wilson(std::uint64_t hits, std::uint64_t n, double z) {
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace detail

inline constexpr double kBurnInFraction = 0.1;
/// Levels enter the decay fit only after this many separate excursions;
/// frames within one excursion are strongly correlated.
inline constexpr std::uint64_t kMinTailEpisodes = 20;

/// Frame-level simulation of the secondary queue: primary activity, sensing
/// decision, block fading, decode success as a Bernoulli draw with the frame's
/// analytical error probability, then Q <- max(0, Q + a - service).
/// Every frame's randomness is keyed by (seed, frame index).
inline SimResult run_sim(const SimConfig& cfg, const std::function<void(const FrameRecord&)>& trace = {}) {
  cfg.validate();
  const auto& policy = cfg.policy;
  const SensingPerf perf = policy.perf();
  const ScenarioSnrs snrs = policy.snrs();
  const long n = policy.frame.blocklength();
  const double nd = static_cast<double>(n);
  const auto pr = priors(policy.chain);
  const CounterStream stream(cfg.seed);
  const bool fixed = std::holds_alternative<FixedRates>(policy.mode);
  const FixedRates rates = fixed ? std::get<FixedRates>(policy.mode) : FixedRates{0.0, 0.0};
  const double eps = fixed ? 0.0 : std::get<TargetError>(policy.mode).eps;

  const std::uint64_t burn_in = static_cast<std::uint64_t>(kBurnInFraction * static_cast<double>(cfg.horizon_frames));
  const auto& levels = cfg.q_levels;
  // hist[k] counts frames whose queue reached exactly levels[k-1] but not levels[k].
  std::vector<std::uint64_t> hist(levels.size() + 1, 0);
  std::vector<std::uint64_t> upcrossings(levels.size(), 0);
  SimResult res;
  double service_sum = 0.0;
  double queue = 0.0;
  bool busy = false;

  for (std::uint64_t t = 0; t < cfg.horizon_frames; ++t) {
    const auto u = stream.uniforms4(t, 0);
    if (t == 0) {
      busy = u[0] <= pr.busy;
    } else {
      busy = busy ? (u[0] > policy.chain.s) : (u[0] <= policy.chain.q);
    }
    const bool sensed_busy = u[1] <= (busy ? perf.p_detect : perf.p_false_alarm);
    const double h2 = -policy.dist.mean_power * std::log(u[2]);
    const int scenario = busy ? (sensed_busy ? 1 : 2) : (sensed_busy ? 3 : 4);

    double rate;
    double err;
    if (fixed) {
      rate = sensed_busy ? rates.r1 : rates.r2;
      err = fb_error_prob(snrs[scenario], h2, n, rate);
    } else {
      rate = variable_rate(sensed_busy, h2, snrs, policy.frame, eps);
      switch (scenario) {
        case 2: err = mismatch_error_missdetect(h2, snrs, policy.frame, eps); break;
        case 3: err = mismatch_error_falsealarm(h2, snrs, policy.frame, eps); break;
        default: err = eps; break;
      }
    }
    const bool on = u[3] > err;
    const double service = on ? nd * rate : 0.0;
    const auto below = [&](double x) {
      return static_cast<std::size_t>(std::upper_bound(levels.begin(), levels.end(), x) - levels.begin());
    };
    const std::size_t k_before = below(queue);
    queue = std::max(0.0, queue + cfg.arrival_rate - service);
    const int state = ChannelState{scenario, !on}.index();

    if (t >= burn_in) {
      const std::size_t k = below(queue);
      ++hist[k];
      // An excursion already under way when burn-in ends counts once.
      for (std::size_t j = (t == burn_in ? 0 : k_before); j < k; ++j) ++upcrossings[j];
      res.state_occupancy[state] += 1.0;
      service_sum += service;
    }
    if (trace) trace(FrameRecord{t, state, h2, rate, service, queue});
  }

  const std::uint64_t used = cfg.horizon_frames - burn_in;
  res.frames_used = used;
  res.burn_in = burn_in;
  res.mean_service = service_sum / static_cast<double>(used);
  for (double& f : res.state_occupancy) f /= static_cast<double>(used);

  std::vector<std::uint64_t> at_least(levels.size(), 0);
  std::uint64_t tail = 0;
  for (std::size_t k = levels.size(); k-- > 0;) {
    tail += hist[k + 1];
    at_least[k] = tail;
  }
  res.horizon_warning = upcrossings.back() < kMinTailEpisodes && cfg.arrival_rate > 0.0;
  const double z = res.horizon_warning ? 3.29 : 1.96;
  // Excursions, not frames, are the roughly independent samples: the variance
  // of ln P-hat at a level scales like 1/episodes.
  std::vector<double> fit_q, fit_p, fit_w;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto ci = detail::wilson(at_least[k], used, z);
    const double p = static_cast<double>(at_least[k]) / static_cast<double>(used);
    res.overflow.push_back({levels[k], p, ci.first, ci.second, at_least[k], upcrossings[k]});
    if (upcrossings[k] >= kMinTailEpisodes) {
      fit_q.push_back(levels[k]);
      fit_p.push_back(p);
      fit_w.push_back(static_cast<double>(upcrossings[k]));
    }
  }
  res.decay = estimate_decay_rate(fit_q, fit_p, fit_w);
  return res;
}

/// Constant arrival rate (bits/frame) equal to T*B times an effective rate.
inline double arrival_for_effective_rate(const LinkPolicy& policy, double effective_rate) {
  return policy.frame.frame_duration * policy.frame.bandwidth * effective_rate;
}

}  // namespace cograte

#endif  // COGRATE_QUEUESIM_HPP

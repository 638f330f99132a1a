#ifndef COGRATE_FBCODE_HPP
#define COGRATE_FBCODE_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cograte/numerics.hpp"
#include "cograte/sensing.hpp"

namespace cograte {

enum class SnrScaling {
  none,                ///< Per-symbol energy P/B.
  energy_constrained,  ///< Frame energy P*T spread over (T-N)B symbols: factor T/(T-N).
};

/// Frame timing. Sensing occupies the first `sense_duration` seconds of each
/// `frame_duration`-second frame; the rest carries (T-N)B channel uses.
struct FrameConfig {
  double frame_duration = 0.1;
  double sense_duration = 1e-3;
  double bandwidth = 1e4;
  SnrScaling snr_scaling = SnrScaling::none;

  long blocklength() const { return std::lround((frame_duration - sense_duration) * bandwidth); }
  double snr_factor() const {
    return snr_scaling == SnrScaling::energy_constrained ? frame_duration / (frame_duration - sense_duration) : 1.0;
  }
  /// Fraction of the frame used for data, (T-N)/T.
  double data_fraction() const { return (frame_duration - sense_duration) / frame_duration; }

  void validate() const {
    if (!(sense_duration > 0.0)) throw std::invalid_argument("sense_duration must be > 0");
    if (!(frame_duration > sense_duration)) throw std::invalid_argument("frame_duration must exceed sense_duration");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
    if (blocklength() < 2) throw std::invalid_argument("(frame_duration - sense_duration)*bandwidth must be >= 2");
  }
};

/// SNRs of the four (true state, sensed state) scenarios:
/// 1 busy/sensed busy, 2 busy/sensed idle, 3 idle/sensed busy, 4 idle/sensed idle.
struct ScenarioSnrs {
  double snr1;
  double snr2;
  double snr3;
  double snr4;

  double operator[](int scenario) const {
    switch (scenario) {
      case 1: return snr1;
      case 2: return snr2;
      case 3: return snr3;
      case 4: return snr4;
    }
    throw std::out_of_range("scenario must be 1..4");
  }
};

/// SNR_i = P_i / (B * noise) with the primary interference added to the noise
/// when the channel is truly busy. `p1`, `p2` are linear powers.
inline ScenarioSnrs scenario_snrs(double p1, double p2, double noise_var, double interference_var,
                                  const FrameConfig& frame) {
  const double k = frame.snr_factor() / frame.bandwidth;
  const double busy_noise = noise_var + interference_var;
  return {k * p1 / busy_noise, k * p2 / busy_noise, k * p1 / noise_var, k * p2 / noise_var};
}

namespace detail {

inline constexpr double kLog2e = std::numbers::log2e;

// 1 - (1+x)^-2 without cancellation for small x.
inline double dispersion(double x) { return x * (2.0 + x) / ((1.0 + x) * (1.0 + x)); }

inline double capacity_bits(double x) { return std::log1p(x) * kLog2e; }

}  // namespace detail

/// Normal-approximation rate before clamping; may be negative.
inline double fb_rate_unclamped(double snr, double h2, long n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("fb_rate: eps must lie in (0, 1)");
  const double x = snr * h2;
  return detail::capacity_bits(x) -
         std::sqrt(detail::dispersion(x) / static_cast<double>(n)) * gaussian_q_inv(eps) * detail::kLog2e;
}

/// Fading power below which fb_rate_unclamped is negative (0 when eps >= 1/2).
inline double rate_clamp_point(double snr, long n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("rate_clamp_point: eps must lie in (0, 1)");
  if (!(snr > 0.0)) throw std::domain_error("rate_clamp_point: snr must be > 0");
  const double qinv = gaussian_q_inv(eps);
  if (!(qinv > 0.0)) return 0.0;
  const double nn = static_cast<double>(n);
  const auto g = [&](double x) { return std::log1p(x) - std::sqrt(detail::dispersion(x) / nn) * qinv; };
  double lo = 0.0;
  double hi = qinv * qinv / nn;
  while (g(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi / snr;
}

/// Rate (bits/channel use) achieving error probability `eps` with blocklength
/// `n` at instantaneous SNR snr*h2. Negative values are clamped to 0.
inline double fb_rate(double snr, double h2, long n, double eps) {
  return std::max(0.0, fb_rate_unclamped(snr, h2, n, eps));
}

/// Error probability of rate `r` at blocklength `n`. At snr*h2 = 0 the
/// dispersion vanishes and the analytic limit is used (1 if r > 0, else 0).
inline double fb_error_prob(double snr, double h2, long n, double r) {
  const double x = snr * h2;
  const double v = detail::dispersion(x);
  if (!(v > 0.0)) return r > 0.0 ? 1.0 : 0.0;
  const double spread = std::sqrt(v / static_cast<double>(n)) * detail::kLog2e;
  return gaussian_q((detail::capacity_bits(x) - r) / spread);
}

/// Scenario error with fixed rates: r1 in scenarios 1 and 3, r2 in 2 and 4.
inline double scenario_error_fixed(int scenario, double h2, const ScenarioSnrs& snrs, const FrameConfig& frame,
                                   double r1, double r2) {
  const double r = (scenario == 1 || scenario == 3) ? r1 : r2;
  return fb_error_prob(snrs[scenario], h2, frame.blocklength(), r);
}

/// Variable rate chosen for target `eps`: SNR1 when sensed busy, SNR4 when
/// sensed idle.
inline double variable_rate(bool sensed_busy, double h2, const ScenarioSnrs& snrs, const FrameConfig& frame,
                            double eps) {
  return fb_rate(sensed_busy ? snrs.snr1 : snrs.snr4, h2, frame.blocklength(), eps);
}

/// Actual error probability when the rate was computed for `snr_assumed` but
/// the channel delivers `snr_true`.
inline double mismatch_error(double snr_true, double snr_assumed, double h2, long n, double eps) {
  const double xt = snr_true * h2;
  const double xa = snr_assumed * h2;
  const double qinv = gaussian_q_inv(eps);
  const double vt = detail::dispersion(xt);
  const double va = detail::dispersion(xa);
  if (!(vt > 0.0) || !(va > 0.0)) {
    // h2 -> 0: both dispersions scale with h2, leaving sqrt(snr_a/snr_t) * Q^-1(eps).
    return gaussian_q(std::sqrt(snr_assumed / snr_true) * qinv);
  }
  const double nn = static_cast<double>(n);
  const double num = (std::log1p(xt) - std::log1p(xa)) * detail::kLog2e + std::sqrt(va / nn) * qinv * detail::kLog2e;
  return gaussian_q(num / (std::sqrt(vt / nn) * detail::kLog2e));
}

/// Miss detection: channel busy (SNR2) but rate chosen for SNR4.
inline double mismatch_error_missdetect(double h2, const ScenarioSnrs& snrs, const FrameConfig& frame, double eps) {
  return mismatch_error(snrs.snr2, snrs.snr4, h2, frame.blocklength(), eps);
}

/// False alarm: channel idle (SNR3) but rate chosen for SNR1.
inline double mismatch_error_falsealarm(double h2, const ScenarioSnrs& snrs, const FrameConfig& frame, double eps) {
  return mismatch_error(snrs.snr3, snrs.snr1, h2, frame.blocklength(), eps);
}

/// Average decoding error of variable-rate transmission over sensing outcomes
/// and fading.
inline double average_error_prob(const ActivityChain& chain, const SensingPerf& perf, const ScenarioSnrs& snrs,
                                 const FrameConfig& frame, double eps, const FadingDist& dist,
                                 const QuadratureRule& rule) {
  const auto pr = priors(chain);
  const double miss = expect_over_fading(
      [&](double h2) { return mismatch_error_missdetect(h2, snrs, frame, eps); }, dist, rule);
  const double false_alarm = expect_over_fading(
      [&](double h2) { return mismatch_error_falsealarm(h2, snrs, frame, eps); }, dist, rule);
  return pr.busy * perf.p_detect * eps + pr.busy * (1.0 - perf.p_detect) * miss +
         pr.idle * perf.p_false_alarm * false_alarm + pr.idle * (1.0 - perf.p_false_alarm) * eps;
}

}  // namespace cograte

#endif  // COGRATE_FBCODE_HPP

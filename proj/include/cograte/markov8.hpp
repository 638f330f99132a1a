#ifndef COGRATE_MARKOV8_HPP
#define COGRATE_MARKOV8_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "cograte/fbcode.hpp"
#include "cograte/numerics.hpp"
#include "cograte/sensing.hpp"

namespace cograte {

// State layout (0-based index = 2*(scenario-1) + (off ? 1 : 0)):
//   0: S1 ON  1: S1 OFF  2: S2 ON  3: S2 OFF   <- channel truly busy
//   4: S3 ON  5: S3 OFF  6: S4 ON  7: S4 OFF   <- channel truly idle
// Scenarios: 1 busy/sensed busy, 2 busy/sensed idle (miss),
//            3 idle/sensed busy (false alarm), 4 idle/sensed idle.

inline constexpr int kNumStates = 8;

struct ChannelState {
  int scenario;  // 1..4
  bool off;

  int index() const { return 2 * (scenario - 1) + (off ? 1 : 0); }
  static ChannelState from_index(int i) { return {i / 2 + 1, (i % 2) == 1}; }
  bool truly_busy() const { return scenario <= 2; }
  bool sensed_busy() const { return scenario == 1 || scenario == 3; }
};

using StateVector = std::array<double, kNumStates>;

/// The two distinct rows of the rank-2 transition matrix: every truly-busy
/// state (0..3) transitions with `busy`, every truly-idle state (4..7) with `idle`.
struct TransitionRows {
  StateVector busy{};
  StateVector idle{};

  const StateVector& row(int from_state) const { return from_state < 4 ? busy : idle; }
};

/// Per-state MGF values phi_m evaluated at -theta; OFF states are always 1.
using PhiDiag = StateVector;

/// Decoding error probability in each scenario (index 0 = scenario 1).
using ScenarioErrors = std::array<double, 4>;

/// Builds both rows from the chain, sensing performance and per-scenario
/// error probabilities. Each row is a product of three pairs that each sum to
/// one: (stay, leave) x (sensed busy, sensed idle) x (ON, OFF).
inline TransitionRows transition_rows(const ActivityChain& chain, const SensingPerf& perf,
                                      const ScenarioErrors& err) {
  const double pd = perf.p_detect;
  const double pf = perf.p_false_alarm;
  const std::array<double, 4> given_busy{pd * (1.0 - err[0]), pd * err[0], (1.0 - pd) * (1.0 - err[1]),
                                         (1.0 - pd) * err[1]};
  const std::array<double, 4> given_idle{pf * (1.0 - err[2]), pf * err[2], (1.0 - pf) * (1.0 - err[3]),
                                         (1.0 - pf) * err[3]};
  TransitionRows rows;
  for (int m = 0; m < 4; ++m) {
    rows.busy[m] = (1.0 - chain.s) * given_busy[m];
    rows.idle[m] = chain.q * given_busy[m];
    rows.busy[m + 4] = chain.s * given_idle[m];
    rows.idle[m + 4] = (1.0 - chain.q) * given_idle[m];
  }
  return rows;
}

inline TransitionRows transition_rows_fixed(double h2, const ActivityChain& chain, const SensingPerf& perf,
                                            const ScenarioSnrs& snrs, const FrameConfig& frame, double r1,
                                            double r2) {
  ScenarioErrors err;
  for (int sc = 1; sc <= 4; ++sc) err[sc - 1] = scenario_error_fixed(sc, h2, snrs, frame, r1, r2);
  return transition_rows(chain, perf, err);
}

inline TransitionRows transition_rows_variable(double h2, const ActivityChain& chain, const SensingPerf& perf,
                                               const ScenarioSnrs& snrs, const FrameConfig& frame, double eps) {
  const ScenarioErrors err{eps, mismatch_error_missdetect(h2, snrs, frame, eps),
                           mismatch_error_falsealarm(h2, snrs, frame, eps), eps};
  return transition_rows(chain, perf, err);
}

/// MGF diagonal for fixed rates: exp(-theta * n * r) in ON states.
inline PhiDiag phi_fixed(double theta, const FrameConfig& frame, double r1, double r2) {
  if (!(theta >= 0.0)) throw std::domain_error("phi_fixed: theta must be >= 0");
  const double n = static_cast<double>(frame.blocklength());
  const double a = std::exp(-theta * n * r1);
  const double b = std::exp(-theta * n * r2);
  return {a, 1.0, b, 1.0, a, 1.0, b, 1.0};
}

/// MGF diagonal for variable rates: ON entries average exp(-theta * n * r(h2))
/// over fading, with r1(SNR1) after a busy decision and r2(SNR4) after idle.
inline PhiDiag phi_variable(double theta, const FrameConfig& frame, const ScenarioSnrs& snrs, double eps,
                            const FadingDist& dist, const QuadratureRule& rule) {
  if (!(theta >= 0.0)) throw std::domain_error("phi_variable: theta must be >= 0");
  if (theta == 0.0) return {1, 1, 1, 1, 1, 1, 1, 1};
  const long n = frame.blocklength();
  const auto mgf = [&](bool busy) {
    const double snr = busy ? snrs.snr1 : snrs.snr4;
    return expect_over_fading_above(
        [&](double h2) { return std::exp(-theta * static_cast<double>(n) * variable_rate(busy, h2, snrs, frame, eps)); },
        rate_clamp_point(snr, n, eps), 1.0, dist, rule);
  };
  const double a = mgf(true);
  const double b = mgf(false);
  return {a, 1.0, b, 1.0, a, 1.0, b, 1.0};
}

/// Largest eigenvalue of diag(phi) * R for the rank-2 R. The nonzero spectrum
/// is that of the 2x2 matrix [[a, c], [b, d]] with
///   a = sum_{m<4} phi_m busy_m,  c = sum_{m>=4} phi_m busy_m,
///   b = sum_{m<4} phi_m idle_m,  d = sum_{m>=4} phi_m idle_m.
inline double spectral_radius_rank2(const PhiDiag& phi, const TransitionRows& rows) {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  for (int m = 0; m < 4; ++m) {
    a += phi[m] * rows.busy[m];
    b += phi[m] * rows.idle[m];
    c += phi[m + 4] * rows.busy[m + 4];
    d += phi[m + 4] * rows.idle[m + 4];
  }
  return 0.5 * (a + d) + 0.5 * std::hypot(a - d, 2.0 * std::sqrt(b * c));
}

/// 1 - spectral radius of diag(phi) * R for a row-stochastic rank-2 R,
/// computed without cancellation when every phi_m is close to 1.
inline double spectral_gap_rank2(const PhiDiag& phi, const TransitionRows& rows) {
  double ap = 0.0, dp = 0.0, b = 0.0, c = 0.0;  // ap = 1 - a, dp = 1 - d
  for (int m = 0; m < 4; ++m) {
    ap += rows.busy[m + 4] + (1.0 - phi[m]) * rows.busy[m];
    dp += rows.idle[m] + (1.0 - phi[m + 4]) * rows.idle[m + 4];
    b += phi[m] * rows.idle[m];
    c += phi[m + 4] * rows.busy[m + 4];
  }
  const double det = ap * dp - b * c;
  const double denom = (ap + dp) + std::hypot(ap - dp, 2.0 * std::sqrt(b * c));
  return denom > 0.0 ? std::max(0.0, 2.0 * det / denom) : 0.0;
}

/// Stationary distribution of the 8-state chain.
inline StateVector stationary_distribution(const TransitionRows& rows) {
  double into_idle_from_busy = 0.0;  // P(busy -> idle class)
  double into_busy_from_idle = 0.0;  // P(idle -> busy class)
  for (int m = 0; m < 4; ++m) into_busy_from_idle += rows.idle[m];
  for (int m = 4; m < 8; ++m) into_idle_from_busy += rows.busy[m];
  const double pi_busy = into_busy_from_idle / (into_busy_from_idle + into_idle_from_busy);
  StateVector pi;
  for (int m = 0; m < kNumStates; ++m) pi[m] = pi_busy * rows.busy[m] + (1.0 - pi_busy) * rows.idle[m];
  return pi;
}

}  // namespace cograte

#endif  // COGRATE_MARKOV8_HPP

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <stdexcept>
#include "cograte/fbcode.hpp"
#include "cograte/sensing.hpp"
#include "oracle_constants.hpp"

using namespace cograte;

namespace {

ScenarioSnrs default_snrs(double interference = 0.12) {
  return scenario_snrs(1.0, 10.0, 0.05, interference, FrameConfig{});
}

}  // namespace

TEST(FrameConfig, DefaultsAndScaling) {
  FrameConfig f;
  EXPECT_EQ(f.blocklength(), 990);
  EXPECT_DOUBLE_EQ(f.snr_factor(), 1.0);
  EXPECT_NEAR(f.data_fraction(), 0.99, 1e-15);
  f.snr_scaling = SnrScaling::energy_constrained;
  EXPECT_NEAR(f.snr_factor(), 0.1 / 0.099, 1e-15);
  f.sense_duration = 0.1;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

TEST(ScenarioSnrs, OrderingAndValues) {
  const auto s = default_snrs();
  EXPECT_NEAR(s.snr1, 1.0 / (1e4 * 0.17), 1e-18);
  EXPECT_NEAR(s.snr4, 10.0 / (1e4 * 0.05), 1e-18);
  EXPECT_LE(s.snr1, s.snr3);
  EXPECT_LE(s.snr2, s.snr4);
  EXPECT_EQ(s[2], s.snr2);
  EXPECT_THROW(s[5], std::out_of_range);
}

TEST(FbRate, Examples) {
  EXPECT_NEAR(fb_rate(3.0, 1.0, 1L << 50, 1e-3), 2.0, 1e-6);
  EXPECT_NEAR(fb_rate(3.0, 1.0, 990, 0.5), 2.0, 1e-15);
  EXPECT_NEAR(fb_rate(0.7, 2.3, 77, 0.5), std::log2(1.0 + 0.7 * 2.3), 1e-15);
  EXPECT_NEAR(fb_rate(3.0, 1.0, 990, 1e-3), oracle::kFbRate_snr3_n990_eps1e3, 1e-12);
  EXPECT_NEAR(fb_rate(200.0, 1.0, 990, 1e-3), oracle::kVariableRate_snr200_n990_eps1e3, 1e-12);
  EXPECT_THROW(fb_rate(3.0, 1.0, 990, 0.0), std::domain_error);
  EXPECT_THROW(fb_rate(3.0, 1.0, 990, 1.0), std::domain_error);
}

TEST(FbRate, ClampsAtZero) {
  EXPECT_LT(fb_rate_unclamped(0.02, 1e-3, 990, 1e-3), 0.0);
  EXPECT_EQ(fb_rate(0.02, 1e-3, 990, 1e-3), 0.0);
  EXPECT_EQ(fb_rate(0.02, 0.0, 990, 1e-3), 0.0);
}

TEST(FbError, Examples) {
  EXPECT_EQ(fb_error_prob(3.0, 1.0, 990, 2.0), 0.5);
  EXPECT_NEAR(fb_error_prob(3.0, 1.0, 990, 1.8628), oracle::kFbError_snr3_n990_r1_8628, 1e-13);
  EXPECT_NEAR(fb_error_prob(3.0, 1.0, 1L << 40, 2.01), 1.0, 1e-12);
  EXPECT_NEAR(fb_error_prob(3.0, 1.0, 1L << 40, 1.99), 0.0, 1e-12);
  EXPECT_EQ(fb_error_prob(3.0, 0.0, 990, 0.1), 1.0);
  EXPECT_EQ(fb_error_prob(3.0, 0.0, 990, 0.0), 0.0);
}

TEST(FbError, RoundTripGrid) {
  double worst = 0.0;
  for (double x : {1e-4, 1e-3, 1e-2, 0.05, 0.2, 1.0, 3.0, 10.0, 100.0, 1e4}) {
    for (long n : {2L, 10L, 50L, 200L, 990L, 2000L, 5000L, 20000L, 100000L, 1000000L}) {
      for (double eps : {1e-9, 1e-5, 1e-3, 0.1, 0.7}) {
        const double r = fb_rate_unclamped(x, 1.0, n, eps);
        if (r <= 0.0) continue;
        worst = std::max(worst, std::abs(fb_error_prob(x, 1.0, n, r) - eps));
      }
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(FbError, Monotonicity) {
  for (double x : {0.01, 0.5, 3.0}) {
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double r = 3.0 * i / 200.0;
      const double e = fb_error_prob(x, 1.0, 990, r);
      EXPECT_GE(e, prev);
      prev = e;
    }
  }
  double prev = 1.0;
  for (int i = 1; i <= 200; ++i) {
    const double e = fb_error_prob(0.05 * i, 1.0, 500, 0.5);
    EXPECT_LE(e, prev);
    prev = e;
  }
  double prev_rate = 0.0;
  for (long n : {10L, 100L, 1000L, 10000L}) {
    const double r = fb_rate(3.0, 1.0, n, 1e-3);
    EXPECT_GE(r, prev_rate);
    prev_rate = r;
  }
}

TEST(ScenarioError, Examples) {
  const FrameConfig frame;
  const auto clean = default_snrs(0.0);
  EXPECT_EQ(scenario_error_fixed(1, 0.8, clean, frame, 0.01, 0.02), scenario_error_fixed(3, 0.8, clean, frame, 0.01, 0.02));
  const auto s = default_snrs();
  EXPECT_LT(scenario_error_fixed(1, 0.8, s, frame, 0.0, 0.02), 0.5);
  EXPECT_NEAR(scenario_error_fixed(2, 1.0, s, frame, 0.0, 2.0), oracle::kEps2_defaults_r2_2, 1e-15);
  EXPECT_NEAR(scenario_error_fixed(2, 1.0, s, frame, 0.0, 0.005), oracle::kEps2_defaults_r2_0_005, 1e-13);
}

TEST(VariableRate, Examples) {
  const FrameConfig frame;
  const auto s = default_snrs();
  EXPECT_NEAR(variable_rate(false, 1.3, s, frame, 0.5), std::log2(1.0 + s.snr4 * 1.3), 1e-15);
  EXPECT_NEAR(variable_rate(true, 1.3, s, frame, 0.5), std::log2(1.0 + s.snr1 * 1.3), 1e-15);
  EXPECT_EQ(variable_rate(false, 0.0, s, frame, 1e-3), 0.0);
  EXPECT_NEAR(variable_rate(false, 1.0, s, frame, 1e-3), oracle::kVariableRateIdle_defaults_eps1e3, 1e-15);
}

TEST(VariableRate, ClampPointSeparatesSigns) {
  const auto s = default_snrs();
  for (double eps : {1e-9, 1e-3, 0.2, 0.49}) {
    for (double snr : {s.snr1, s.snr4, 3.0}) {
      const double knee = rate_clamp_point(snr, 990, eps);
      ASSERT_GT(knee, 0.0);
      EXPECT_LT(fb_rate_unclamped(snr, knee * (1 - 1e-9), 990, eps), 0.0);
      EXPECT_GE(fb_rate_unclamped(snr, knee * (1 + 1e-9), 990, eps), 0.0);
    }
  }
  EXPECT_EQ(rate_clamp_point(s.snr1, 990, 0.5), 0.0);
  EXPECT_EQ(rate_clamp_point(s.snr1, 990, 0.7), 0.0);
  EXPECT_THROW(rate_clamp_point(0.0, 990, 1e-3), std::domain_error);
}

TEST(Mismatch, Examples) {
  const FrameConfig frame;
  const auto s = default_snrs();
  EXPECT_NEAR(mismatch_error_missdetect(1.0, s, frame, 1e-3), oracle::kEpsMiss_defaults_eps1e3, 1e-13);
  EXPECT_NEAR(mismatch_error_falsealarm(1.0, s, frame, 1e-3), oracle::kEpsFalseAlarm_defaults_eps1e3, 1e-14);
  const auto clean = default_snrs(0.0);
  EXPECT_NEAR(mismatch_error_missdetect(1.0, clean, frame, 1e-3), 1e-3, 1e-15);
  EXPECT_NEAR(mismatch_error_falsealarm(1.0, clean, frame, 1e-3), 1e-3, 1e-15);
  const auto loud = default_snrs(1e12);
  EXPECT_NEAR(mismatch_error_missdetect(1.0, loud, frame, 1e-3), 1.0, 1e-12);
  // SNR1 -> 0 leaves the rate-0 error of the false-alarm channel, not 0.
  EXPECT_NEAR(mismatch_error_falsealarm(1.0, loud, frame, 1e-3), fb_error_prob(loud.snr3, 1.0, 990, 0.0), 1e-6);
}

TEST(Mismatch, OrderingWhereTheAssumedRateIsPositive) {
  const FrameConfig frame;
  const long n = frame.blocklength();
  int checked = 0;
  for (double interference : {1e-3, 0.12, 1.0}) {
    const auto s = default_snrs(interference);
    for (double eps : {1e-6, 1e-3, 0.2}) {
      for (int i = 0; i <= 200; ++i) {
        const double h2 = 0.25 * i;
        if (fb_rate_unclamped(s.snr4, h2, n, eps) > 0.0) {
          EXPECT_GE(mismatch_error_missdetect(h2, s, frame, eps), eps * (1 - 1e-12)) << h2;
          ++checked;
        }
        if (fb_rate_unclamped(s.snr1, h2, n, eps) > 0.0) {
          EXPECT_LE(mismatch_error_falsealarm(h2, s, frame, eps), eps * (1 + 1e-12)) << h2;
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

// The error exceeds the target exactly when the rate computed for the assumed
// SNR exceeds the one the true SNR supports; the unclamped normal-approximation
// rate dips below zero before rising, so at small n*SNR*h2 the order flips.
TEST(Mismatch, ExceedsTargetIffAssumedRateIsHigher) {
  const FrameConfig frame;
  const long n = frame.blocklength();
  const auto s = default_snrs();
  int flipped = 0;
  for (double eps : {1e-6, 1e-3, 0.2}) {
    for (int i = 1; i <= 400; ++i) {
      const double h2 = 0.02 * i;
      const double r_true2 = fb_rate_unclamped(s.snr2, h2, n, eps), r_assumed4 = fb_rate_unclamped(s.snr4, h2, n, eps);
      const double r_true3 = fb_rate_unclamped(s.snr3, h2, n, eps), r_assumed1 = fb_rate_unclamped(s.snr1, h2, n, eps);
      if (std::abs(r_assumed4 - r_true2) > 1e-9) {
        EXPECT_EQ(mismatch_error_missdetect(h2, s, frame, eps) > eps, r_assumed4 > r_true2) << h2 << " " << eps;
      }
      if (std::abs(r_assumed1 - r_true3) > 1e-9) {
        const bool above = mismatch_error_falsealarm(h2, s, frame, eps) > eps;
        EXPECT_EQ(above, r_assumed1 > r_true3) << h2 << " " << eps;
        flipped += above;
      }
    }
  }
  EXPECT_GT(flipped, 0);
  // At the defaults and unit fading the false-alarm error is above target.
  EXPECT_GT(mismatch_error_falsealarm(1.0, s, frame, 1e-3), 1e-3);
  EXPECT_LT(fb_rate_unclamped(s.snr1, 1.0, n, 1e-3), 0.0);
}

TEST(Mismatch, ZeroFadingLimitIsContinuous) {
  const FrameConfig frame;
  const auto s = default_snrs();
  EXPECT_NEAR(mismatch_error_missdetect(0.0, s, frame, 1e-3), mismatch_error_missdetect(1e-14, s, frame, 1e-3), 1e-7);
  EXPECT_NEAR(mismatch_error_falsealarm(0.0, s, frame, 1e-3), mismatch_error_falsealarm(1e-14, s, frame, 1e-3), 1e-7);
}

TEST(AverageError, Collapses) {
  const FrameConfig frame;
  const auto rule = QuadratureRule::gauss_laguerre(kDefaultQuadratureOrder);
  const ActivityChain chain;
  EXPECT_NEAR(average_error_prob(chain, {1.0, 0.0}, default_snrs(), frame, 1e-3, FadingDist{}, rule), 1e-3, 1e-15);
  EXPECT_NEAR(average_error_prob(chain, {0.7, 0.2}, default_snrs(0.0), frame, 1e-3, FadingDist{}, rule), 1e-3, 1e-15);
}

TEST(AverageError, DefaultsAgainstMonteCarlo) {
  const FrameConfig frame;
  const SensingConfig sc;
  const auto perf = sensing_perf(sc);
  const ActivityChain chain;
  const auto snrs = default_snrs();
  const double eps = 1e-3;
  const double quad = average_error_prob(chain, perf, snrs, frame, eps, FadingDist{},
                                         QuadratureRule::gauss_laguerre(kDefaultQuadratureOrder));
  std::mt19937_64 gen(2024);
  std::exponential_distribution<double> expo(1.0);
  const int draws = 1'000'000;
  double miss = 0.0, fa = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double h2 = expo(gen);
    miss += mismatch_error_missdetect(h2, snrs, frame, eps);
    fa += mismatch_error_falsealarm(h2, snrs, frame, eps);
  }
  const auto pr = priors(chain);
  const double mc = pr.busy * perf.p_detect * eps + pr.busy * (1 - perf.p_detect) * miss / draws +
                    pr.idle * perf.p_false_alarm * fa / draws + pr.idle * (1 - perf.p_false_alarm) * eps;
  EXPECT_NEAR(quad / mc, 1.0, 0.01);
  // Bounded by the scenario extremes.
  EXPECT_GE(quad, std::min(eps, fa / draws));
  EXPECT_LE(quad, std::max(eps, miss / draws));
}

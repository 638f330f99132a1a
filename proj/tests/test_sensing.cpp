#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cograte/sensing.hpp"
#include "oracle_constants.hpp"

using namespace cograte;

TEST(Priors, Examples) {
  auto p = priors({0.6, 0.2});
  EXPECT_DOUBLE_EQ(p.busy, 0.25);
  EXPECT_DOUBLE_EQ(p.idle, 0.75);
  p = priors({0.3, 0.3});
  EXPECT_DOUBLE_EQ(p.busy, 0.5);
  p = priors({0.9, 0.1});
  EXPECT_NEAR(p.busy, 0.1, 1e-15);
  EXPECT_NEAR(p.idle, 0.9, 1e-15);
  EXPECT_EQ(p.busy + p.idle, 1.0);
}

TEST(Priors, RejectsNonErgodicChains) {
  EXPECT_THROW(ActivityChain({0.0, 0.2}).validate(), std::invalid_argument);
  EXPECT_THROW(ActivityChain({0.6, 1.0}).validate(), std::invalid_argument);
}

TEST(Detector, DefaultsMatchHighPrecisionOracle) {
  const SensingConfig cfg;
  EXPECT_EQ(cfg.sample_count(), 10);
  EXPECT_NEAR(false_alarm_prob(cfg), oracle::kDefaultPf, 1e-14);
  EXPECT_NEAR(detection_prob(cfg), oracle::kDefaultPd, 1e-14);
}

TEST(Detector, Limits) {
  SensingConfig cfg;
  cfg.threshold = 1e-12;
  EXPECT_NEAR(false_alarm_prob(cfg), 1.0, 1e-12);
  EXPECT_NEAR(detection_prob(cfg), 1.0, 1e-12);
  cfg.threshold = 1e3;
  EXPECT_NEAR(false_alarm_prob(cfg), 0.0, 1e-12);
  EXPECT_NEAR(detection_prob(cfg), 0.0, 1e-12);
  cfg.threshold = 0.1;
  cfg.interference_var = 0.0;
  EXPECT_EQ(detection_prob(cfg), false_alarm_prob(cfg));
}

TEST(Detector, MonotoneInThresholdAndOrdered) {
  SensingConfig cfg;
  double prev_pf = 1.0, prev_pd = 1.0;
  for (int i = 1; i <= 500; ++i) {
    cfg.threshold = 0.002 * i;
    const auto perf = sensing_perf(cfg);
    EXPECT_LE(perf.p_false_alarm, perf.p_detect);
    // Strict until the tails reach rounding level.
    if (prev_pf > 1e-14) EXPECT_LT(perf.p_false_alarm, prev_pf);
    if (prev_pd > 1e-14) EXPECT_LT(perf.p_detect, prev_pd);
    EXPECT_LE(perf.p_false_alarm, prev_pf);
    EXPECT_LE(perf.p_detect, prev_pd);
    prev_pf = perf.p_false_alarm;
    prev_pd = perf.p_detect;
  }
}

TEST(Detector, LongerSensingSeparatesHypotheses) {
  SensingConfig cfg;
  double prev_pd = 0.0, prev_pf = 1.0;
  for (double n : {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2}) {
    cfg.sense_duration = n;
    const auto perf = sensing_perf(cfg);
    EXPECT_GE(perf.p_detect, prev_pd);
    EXPECT_LE(perf.p_false_alarm, prev_pf);
    if (prev_pf > 1e-14) EXPECT_LT(perf.p_false_alarm, prev_pf);
    prev_pd = perf.p_detect;
    prev_pf = perf.p_false_alarm;
  }
  EXPECT_GT(prev_pd, 0.999999);
  EXPECT_LT(prev_pf, 1e-6);
}

TEST(Detector, NonIntegerSampleCountIsRounded) {
  SensingConfig cfg;
  cfg.sense_duration = 1.04e-3;
  EXPECT_EQ(cfg.sample_count(), 10);
  EXPECT_TRUE(cfg.sample_count_rounded());
  EXPECT_FALSE(SensingConfig{}.sample_count_rounded());
  cfg.sense_duration = 1e-5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SensedProbs, Examples) {
  const ActivityChain chain{0.6, 0.2};
  auto p = sensed_state_probs(chain, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(p.busy, priors(chain).busy);
  p = sensed_state_probs(chain, {0.863, 0.005});
  EXPECT_NEAR(p.busy, 0.2195, 5e-5);
  EXPECT_NEAR(p.idle, 0.7805, 5e-5);
  p = sensed_state_probs(chain, {0.37, 0.37});
  EXPECT_NEAR(p.busy, 0.37, 1e-15);
  EXPECT_EQ(p.busy + p.idle, 1.0);
}

namespace {

double empirical_rate(const SensingConfig& cfg, bool busy, int trials, std::uint64_t seed) {
  int hits = 0;
  for (int t = 0; t < trials; ++t) hits += simulate_test_statistic(cfg, busy, seed, t).decided_busy ? 1 : 0;
  return static_cast<double>(hits) / trials;
}

void expect_within_3se(double empirical, double p, int trials) {
  const double se = std::sqrt(p * (1.0 - p) / trials);
  EXPECT_NEAR(empirical, p, 3.0 * se) << "analytical " << p;
}

}  // namespace

TEST(TestStatistic, EmpiricalRatesMatchAnalytical) {
  const SensingConfig cfg;
  const int trials = 1'000'000;
  expect_within_3se(empirical_rate(cfg, false, trials, 11), false_alarm_prob(cfg), trials);
  expect_within_3se(empirical_rate(cfg, true, trials, 12), detection_prob(cfg), trials);
}

TEST(TestStatistic, NoPrimarySignalMakesHypothesesIdentical) {
  SensingConfig cfg;
  cfg.interference_var = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto a = simulate_test_statistic(cfg, true, 5, t);
    const auto b = simulate_test_statistic(cfg, false, 5, t);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.decided_busy, b.decided_busy);
  }
}

TEST(TestStatistic, MeanEnergy) {
  const SensingConfig cfg;
  double sum = 0.0;
  const int trials = 200'000;
  for (int t = 0; t < trials; ++t) sum += simulate_test_statistic(cfg, true, 99, t).energy;
  // E = sigma_n^2 + sigma_s^2, sd of one draw = E / sqrt(NB)
  const double mean = cfg.noise_var + cfg.interference_var;
  EXPECT_NEAR(sum / trials, mean, 5.0 * mean / std::sqrt(10.0 * trials));
}

TEST(Feasibility, Examples) {
  const InterferenceBudget budget{3.0};
  auto r = check_power_feasibility(1.0, 5.0, {0.5, 0.01}, budget, InterferenceMode::avg_interference);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.binding, BindingConstraint::interference);
  EXPECT_DOUBLE_EQ(r.interference_level, 3.0);
  EXPECT_DOUBLE_EQ(r.max_feasible_p2, 5.0);

  r = check_power_feasibility(2.5, 100.0, {1.0, 0.01}, budget, InterferenceMode::avg_interference);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.binding, BindingConstraint::none);
  r = check_power_feasibility(3.5, 100.0, {1.0, 0.01}, budget, InterferenceMode::avg_interference);
  EXPECT_FALSE(r.feasible);

  r = check_power_feasibility(4.0, 5.0, {0.9, 0.01}, budget, InterferenceMode::bound_p1);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.binding, BindingConstraint::interference);
  r = check_power_feasibility(2.0, 50.0, {0.9, 0.01}, budget, InterferenceMode::bound_p1);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.binding, BindingConstraint::none);
}

TEST(Feasibility, PeakCapsAndMaxP2) {
  InterferenceBudget budget{3.0, 2.0, 4.0};
  auto r = check_power_feasibility(1.0, 4.0, {0.5, 0.0}, budget, InterferenceMode::avg_interference);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.binding, BindingConstraint::peak_p2);
  EXPECT_DOUBLE_EQ(r.max_feasible_p2, 4.0);
  r = check_power_feasibility(2.5, 3.0, {0.5, 0.0}, budget, InterferenceMode::avg_interference);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.binding, BindingConstraint::peak_p1);
  EXPECT_EQ(r.max_feasible_p2, 0.0);
  budget.peak_p2 = std::numeric_limits<double>::infinity();
  r = check_power_feasibility(1.0, 12.0, {0.8, 0.0}, budget, InterferenceMode::avg_interference);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.binding, BindingConstraint::interference);
  EXPECT_NEAR(r.max_feasible_p2, (3.0 - 0.8) / 0.2, 1e-12);
  EXPECT_THROW(check_power_feasibility(0.0, 1.0, {0.5, 0.0}, budget, InterferenceMode::bound_p1),
               std::invalid_argument);
}

#ifndef COGRATE_CLI_HPP
#define COGRATE_CLI_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "cograte/config.hpp"
#include "cograte/effrate.hpp"
#include "cograte/fbcode.hpp"
#include "cograte/queuesim.hpp"
#include "cograte/sensing.hpp"

namespace cograte::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3 };

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  ///< key=value, applied after the file
  std::string out;                     ///< empty: stdout
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::optional<int> quad_order;
  std::string trace;  ///< simulate only
};

/// Formats with 9 significant digits.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline Settings load_settings(const CommonOptions& o) {
  Settings s = o.config_path.empty() ? Settings{} : Settings::load(o.config_path);
  for (const auto& kv : o.overrides) s.set_assignment(kv);
  if (o.quad_order) s.set("quad_order", std::to_string(*o.quad_order));
  if (o.seed) s.set("seed", std::to_string(*o.seed));
  return s;
}

/// Writes `text` to `path` in binary mode (LF preserved).
inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw io_error("cannot open '" + path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw io_error("write to '" + path + "' failed");
}

inline void emit(const CommonOptions& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_file(o.out, text);
  }
}

/// Runs `body`, mapping failures to exit codes with a message on `err`.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const io_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

// ---------------------------------------------------------------- sense

inline std::string sense_report(const Settings& cfg) {
  const LinkPolicy policy = build_policy(cfg);
  const SensingConfig& sc = policy.sensing;
  const SensingPerf perf = policy.perf();
  const Priors pr = priors(policy.chain);
  const SensedProbs sensed = sensed_state_probs(policy.chain, perf);

  std::ostringstream r;
  const double raw = sc.sense_duration * sc.bandwidth;
  r << "samples: " << sc.sample_count();
  if (sc.sample_count_rounded()) r << " (N*B = " << num(raw) << " rounded)";
  r << "\n";
  r << "threshold: " << num(sc.threshold) << "\n";
  r << "p_detect: " << num(perf.p_detect) << "\n";
  r << "p_false_alarm: " << num(perf.p_false_alarm) << "\n";
  if (perf.p_detect == perf.p_false_alarm) r << "note: p_detect == p_false_alarm (no primary signal power at the detector)\n";
  if (policy.perf_override) r << "note: perfect sensing assumed\n";
  r << "prior_busy: " << num(pr.busy) << "\n";
  r << "prior_idle: " << num(pr.idle) << "\n";
  r << "sensed_busy: " << num(sensed.busy) << "\n";
  r << "sensed_idle: " << num(sensed.idle) << "\n";

  const auto budget = interference_budget(cfg);
  const auto mode = interference_mode(cfg);
  const auto feas = check_power_feasibility(policy.p1, policy.p2, perf, budget, mode);
  r << "interference_mode: " << (mode == InterferenceMode::bound_p1 ? "bound_p1" : "avg_interference") << "\n";
  r << "interference_limit: " << num(budget.i0_over_gain) << "\n";
  r << "interference_level: " << num(feas.interference_level) << "\n";
  r << "feasible: " << (feas.feasible ? "yes" : "no") << "\n";
  r << "binding: " << to_string(feas.binding) << "\n";
  r << "max_feasible_p2: " << num(feas.max_feasible_p2) << "\n";
  return r.str();
}

inline int cmd_sense(const CommonOptions& o, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    emit(o, sense_report(load_settings(o)), out);
    return kOk;
  });
}

// ---------------------------------------------------------------- rate

struct RateOptions {
  double snr = 3.0;
  double h2 = 1.0;
  std::optional<long> blocklength;  ///< default: the config's (T-N)B
  double r_lo = 0.0;
  std::optional<double> r_hi;  ///< default: 1.5 x capacity
  int steps = 301;
};

/// Error probability against coding rate for finite n and n -> infinity.
inline std::string rate_csv(const Settings& cfg, const RateOptions& ro) {
  if (!(ro.snr > 0.0)) throw config_error("snr", "must be > 0");
  if (!(ro.h2 > 0.0)) throw config_error("h2", "must be > 0");
  if (ro.steps < 2) throw config_error("steps", "must be >= 2");
  const long n = ro.blocklength ? *ro.blocklength : build_policy(cfg).frame.blocklength();
  if (n < 1) throw config_error("blocklength", "must be >= 1");
  const double cap = std::log2(1.0 + ro.snr * ro.h2);
  const double hi = ro.r_hi ? *ro.r_hi : 1.5 * cap;
  if (!(ro.r_lo >= 0.0 && ro.r_lo < hi)) throw config_error("rate range", "need 0 <= lo < hi");

  std::string csv = "rate,error_n" + std::to_string(n) + ",error_asymptotic\n";
  for (int i = 0; i < ro.steps; ++i) {
    const double r = ro.r_lo + (hi - ro.r_lo) * i / (ro.steps - 1);
    const double asym = r < cap ? 0.0 : (r > cap ? 1.0 : 0.5);
    csv += num(r) + "," + num(fb_error_prob(ro.snr, ro.h2, n, r)) + "," + num(asym) + "\n";
  }
  return csv;
}

inline int cmd_rate(const CommonOptions& o, const RateOptions& ro, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    emit(o, rate_csv(load_settings(o), ro), out);
    return kOk;
  });
}

// ---------------------------------------------------------------- effrate

inline std::string effrate_report(const Settings& cfg) {
  const LinkPolicy policy = build_policy(cfg);
  const double theta = cfg.number("theta", 0.01);
  if (!(theta >= 0.0)) throw config_error("theta", "must be >= 0");
  const bool optimize = cfg.flag("optimize", true);
  const bool fixed = std::holds_alternative<FixedRates>(policy.mode);

  std::ostringstream r;
  r << "mode: " << (fixed ? "fixed" : "variable") << "\n";
  r << "theta: " << num(theta) << "\n";
  r << "blocklength: " << policy.frame.blocklength() << "\n";
  const SensingPerf perf = policy.perf();
  r << "p_detect: " << num(perf.p_detect) << "\n";
  r << "p_false_alarm: " << num(perf.p_false_alarm) << "\n";

  LinkPolicy at = policy;
  if (optimize) {
    const EffRateResult res = fixed ? optimize_fixed(theta, policy) : optimize_variable(theta, policy);
    at.mode = res.argmax;
    r << "effective_rate: " << num(res.value) << "\n";
    if (fixed) {
      const auto& fr = std::get<FixedRates>(res.argmax);
      r << "opt_r1: " << num(fr.r1) << "\nopt_r2: " << num(fr.r2) << "\n";
    } else {
      r << "opt_eps: " << num(std::get<TargetError>(res.argmax).eps) << "\n";
      r << "clamp_fraction_busy: " << num(res.diagnostics.clamp_fraction_busy) << "\n";
      r << "clamp_fraction_idle: " << num(res.diagnostics.clamp_fraction_idle) << "\n";
    }
    r << "evaluations: " << res.diagnostics.evaluations << "\n";
    r << "converged: " << (res.diagnostics.converged ? "yes" : "no") << "\n";
  } else {
    const double v = theta > 0.0 ? (fixed ? effective_rate_fixed(theta, policy) : effective_rate_variable(theta, policy))
                                 : (fixed ? zero_theta_fixed(policy) : zero_theta_variable(policy));
    r << "effective_rate: " << num(v) << "\n";
    if (fixed) {
      const auto& fr = std::get<FixedRates>(policy.mode);
      r << "r1: " << num(fr.r1) << "\nr2: " << num(fr.r2) << "\n";
    } else {
      r << "eps: " << num(std::get<TargetError>(policy.mode).eps) << "\n";
    }
  }
  if (fixed) {
    r << "zero_theta_stationary: " << num(zero_theta_fixed(at, ZeroThetaWeights::stationary)) << "\n";
    r << "zero_theta_as_printed: " << num(zero_theta_fixed(at, ZeroThetaWeights::as_printed)) << "\n";
  } else {
    r << "zero_theta_stationary: " << num(zero_theta_variable(at, ZeroThetaWeights::stationary)) << "\n";
    r << "zero_theta_as_printed: " << num(zero_theta_variable(at, ZeroThetaWeights::as_printed)) << "\n";
    r << "avg_error: " << num(average_error_prob(at)) << "\n";
  }
  r << "quadrature_order: " << policy.rule.order() << "\n";
  return r.str();
}

inline int cmd_effrate(const CommonOptions& o, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    emit(o, effrate_report(load_settings(o)), out);
    return kOk;
  });
}

// ---------------------------------------------------------------- sweep

enum class SweepVar { lambda, sense_N, theta, blocklength, eps, rate_pair };

inline SweepVar parse_sweep_var(const std::string& name) {
  if (name == "lambda") return SweepVar::lambda;
  if (name == "sense_N") return SweepVar::sense_N;
  if (name == "theta") return SweepVar::theta;
  if (name == "blocklength") return SweepVar::blocklength;
  if (name == "eps") return SweepVar::eps;
  if (name == "rate_pair") return SweepVar::rate_pair;
  throw config_error("var", "expected lambda, sense_N, theta, blocklength, eps or rate_pair, got '" + name + "'");
}

inline const char* to_string(SweepVar v) {
  switch (v) {
    case SweepVar::lambda: return "lambda";
    case SweepVar::sense_N: return "sense_N";
    case SweepVar::theta: return "theta";
    case SweepVar::blocklength: return "blocklength";
    case SweepVar::eps: return "eps";
    case SweepVar::rate_pair: return "rate_pair";
  }
  return "?";
}

struct SweepSpec {
  SweepVar variable = SweepVar::theta;
  std::optional<double> lo, hi;
  int steps = 0;
  bool log_spacing = false;
  std::vector<double> list;  ///< used instead of lo/hi/steps when non-empty
  bool fixed = true;
  bool variable_mode = true;

  /// Sweep points in order. rate_pair sweeps the square grid values x values.
  std::vector<double> values() const {
    if (!list.empty()) return list;
    if (!lo || !hi) throw config_error("range", "give lo, hi and steps or an explicit list");
    if (!(*lo < *hi)) throw config_error("range", "lo must be < hi");
    if (steps < 2) throw config_error("steps", "must be >= 2");
    if (log_spacing && !(*lo > 0.0)) throw config_error("range", "log spacing needs lo > 0");
    std::vector<double> v(steps);
    for (int i = 0; i < steps; ++i) {
      const double t = static_cast<double>(i) / (steps - 1);
      v[i] = log_spacing ? std::exp(std::log(*lo) + t * (std::log(*hi) - std::log(*lo))) : *lo + t * (*hi - *lo);
    }
    return v;
  }

  void validate() const {
    if (!fixed && !variable_mode) throw config_error("modes", "select at least one of fixed, variable");
    for (double x : values()) {
      if (!std::isfinite(x)) throw config_error("range", "values must be finite");
      if (variable != SweepVar::theta && variable != SweepVar::rate_pair && !(x > 0.0))
        throw config_error("range", std::string(to_string(variable)) + " values must be > 0");
      if ((variable == SweepVar::theta || variable == SweepVar::rate_pair) && x < 0.0)
        throw config_error("range", std::string(to_string(variable)) + " values must be >= 0");
      if (variable == SweepVar::eps && !(x < 1.0)) throw config_error("range", "eps values must be < 1");
    }
  }
};

struct SweepRow {
  double x = 0.0, x2 = 0.0;
  double re_fixed = NAN, re_variable = NAN;
  double p_d = NAN, p_f = NAN;
  double r1 = NAN, r2 = NAN, eps = NAN, avg_error = NAN;
};

struct SweepContext {
  LinkPolicy base;
  double theta;
  bool optimize;
  FixedRates rates;
  double eps;
  PowerControl power;
  InterferenceBudget budget;

  explicit SweepContext(const Settings& cfg)
      : base(build_policy(cfg)),
        theta(cfg.number("theta", 0.01)),
        optimize(cfg.flag("optimize", true)),
        rates{cfg.number("r1", 0.002), cfg.number("r2", 0.025)},
        eps(cfg.number("eps", 1e-3)),
        power(power_control(cfg)),
        budget(interference_budget(cfg)) {
    if (!(theta >= 0.0)) throw config_error("theta", "must be >= 0");
    if (!(eps > 0.0 && eps < 1.0)) throw config_error("eps", "must lie in (0, 1)");
    if (!(rates.r1 >= 0.0 && rates.r2 >= 0.0)) throw config_error("r1", "rates must be >= 0");
  }
};

inline SweepRow evaluate_sweep_point(const SweepContext& ctx, const SweepSpec& spec, double x, double x2) {
  LinkPolicy p = ctx.base;
  double theta = ctx.theta;
  FixedRates rates = ctx.rates;
  double eps = ctx.eps;
  bool opt_fixed = ctx.optimize;
  bool opt_variable = ctx.optimize;
  switch (spec.variable) {
    case SweepVar::lambda: p.sensing.threshold = x; break;
    case SweepVar::sense_N: p.set_sense_duration(x); break;
    case SweepVar::theta: theta = x; break;
    case SweepVar::blocklength:
      // Whole channel uses, so that (T - N)B matches the blocklength exactly.
      x = std::round(x);
      if (x < 2.0) throw config_error("blocklength", "values must round to at least 2 channel uses");
      p.frame.frame_duration = p.frame.sense_duration + x / p.frame.bandwidth;
      break;
    case SweepVar::eps:
      eps = x;
      opt_variable = false;
      break;
    case SweepVar::rate_pair:
      rates = {x, x2};
      opt_fixed = false;
      break;
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(to_string(spec.variable), std::string("value ") + num(x) + " is invalid: " + e.what());
  }

  SweepRow row;
  row.x = x;
  row.x2 = x2;
  const SensingPerf perf = p.perf();
  row.p_d = perf.p_detect;
  row.p_f = perf.p_false_alarm;
  if (ctx.power != PowerControl::none) {
    const auto mode = ctx.power == PowerControl::bound_p1 ? InterferenceMode::bound_p1 : InterferenceMode::avg_interference;
    const auto feas = check_power_feasibility(p.p1, p.p2, perf, ctx.budget, mode);
    if (feas.max_feasible_p2 <= 0.0) throw config_error("power_control", "p1 alone violates the interference budget");
    p.p2 = std::min(p.p2, feas.max_feasible_p2);
    p.p1 = std::min(p.p1, p.p2);
  }

  if (spec.fixed) {
    LinkPolicy pf = p;
    pf.mode = rates;
    if (opt_fixed) {
      const auto res = optimize_fixed(theta, pf);
      row.re_fixed = res.value;
      rates = std::get<FixedRates>(res.argmax);
    } else {
      row.re_fixed = theta > 0.0 ? effective_rate_fixed(theta, pf) : zero_theta_fixed(pf);
    }
    row.r1 = rates.r1;
    row.r2 = rates.r2;
  }
  if (spec.variable_mode) {
    LinkPolicy pv = p;
    pv.mode = TargetError{eps};
    if (opt_variable) {
      const auto res = optimize_variable(theta, pv);
      row.re_variable = res.value;
      eps = std::get<TargetError>(res.argmax).eps;
      pv.mode = TargetError{eps};
    } else {
      row.re_variable = theta > 0.0 ? effective_rate_variable(theta, pv) : zero_theta_variable(pv);
    }
    row.eps = eps;
    row.avg_error = average_error_prob(pv);
  }
  return row;
}

inline std::string sweep_header(const SweepSpec& spec) {
  std::string h = spec.variable == SweepVar::rate_pair ? "r1,r2" : to_string(spec.variable);
  if (spec.fixed) h += ",re_fixed";
  if (spec.variable_mode) h += ",re_variable";
  h += ",p_d,p_f";
  if (spec.fixed) h += ",opt_r1,opt_r2";
  if (spec.variable_mode) h += ",opt_eps,avg_error";
  return h + "\n";
}

inline std::string sweep_line(const SweepSpec& spec, const SweepRow& r) {
  std::string s = num(r.x);
  if (spec.variable == SweepVar::rate_pair) s += "," + num(r.x2);
  if (spec.fixed) s += "," + num(r.re_fixed);
  if (spec.variable_mode) s += "," + num(r.re_variable);
  s += "," + num(r.p_d) + "," + num(r.p_f);
  if (spec.fixed) s += "," + num(r.r1) + "," + num(r.r2);
  if (spec.variable_mode) s += "," + num(r.eps) + "," + num(r.avg_error);
  return s + "\n";
}

/// Evaluates every sweep point on up to `jobs` threads; rows come back in
/// sweep order.
inline std::vector<SweepRow> run_sweep(const Settings& cfg, const SweepSpec& spec, int jobs = 1) {
  spec.validate();
  const SweepContext ctx(cfg);
  const auto vals = spec.values();
  std::vector<std::pair<double, double>> points;
  if (spec.variable == SweepVar::rate_pair) {
    for (double a : vals)
      for (double b : vals) points.emplace_back(a, b);
  } else {
    for (double a : vals) points.emplace_back(a, 0.0);
  }

  std::vector<SweepRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = evaluate_sweep_point(ctx, spec, points[i].first, points[i].second);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

inline std::string sweep_csv(const Settings& cfg, const SweepSpec& spec, int jobs = 1) {
  const auto rows = run_sweep(cfg, spec, jobs);
  std::string csv = sweep_header(spec);
  for (const auto& r : rows) csv += sweep_line(spec, r);
  return csv;
}

inline int cmd_sweep(const CommonOptions& o, const SweepSpec& spec, std::ostream& out = std::cout,
                     std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    if (o.jobs < 1) throw config_error("jobs", "must be >= 1");
    emit(o, sweep_csv(load_settings(o), spec, o.jobs), out);
    return kOk;
  });
}

// ---------------------------------------------------------------- simulate

struct SimulationPlan {
  SimConfig sim;
  double analytical_rate = NAN;  ///< effective rate behind the arrival, if derived
  double target_theta = NAN;
};

/// Resolves the simulation from settings. With `arrival_theta`, the policy is
/// evaluated (optimized when `optimize = true`) at that theta and the arrival
/// set to arrival_scale * T * B * R_E.
inline SimulationPlan plan_simulation(const Settings& cfg) {
  SimulationPlan plan;
  SimConfig& sim = plan.sim;
  sim.policy = build_policy(cfg);
  const double horizon = cfg.number("horizon", 1e6);
  if (!(horizon >= 1e4) || horizon != std::floor(horizon) || horizon > 1e12)
    throw config_error("horizon", "expected an integer >= 10000");
  sim.horizon_frames = static_cast<std::uint64_t>(horizon);
  const double seed = cfg.number("seed", 1);
  if (seed < 0 || seed != std::floor(seed) || seed > 9.007199254740992e15)
    throw config_error("seed", "expected a non-negative integer");
  sim.seed = static_cast<std::uint64_t>(seed);

  if (cfg.has("arrival") && cfg.has("arrival_theta"))
    throw config_error("arrival", "set either arrival or arrival_theta, not both");
  if (cfg.has("arrival_theta")) {
    const double theta = cfg.number("arrival_theta", 0.01);
    if (!(theta > 0.0)) throw config_error("arrival_theta", "must be > 0");
    const double scale = cfg.number("arrival_scale", 1.0);
    if (!(scale >= 0.0)) throw config_error("arrival_scale", "must be >= 0");
    const bool fixed = std::holds_alternative<FixedRates>(sim.policy.mode);
    double re;
    if (cfg.flag("optimize", true)) {
      const auto res = fixed ? optimize_fixed(theta, sim.policy) : optimize_variable(theta, sim.policy);
      sim.policy.mode = res.argmax;
      re = res.value;
    } else {
      re = fixed ? effective_rate_fixed(theta, sim.policy) : effective_rate_variable(theta, sim.policy);
    }
    plan.analytical_rate = re;
    plan.target_theta = theta;
    sim.arrival_rate = scale * arrival_for_effective_rate(sim.policy, re);
  } else {
    sim.arrival_rate = cfg.number("arrival", 0.0);
    if (!(sim.arrival_rate >= 0.0)) throw config_error("arrival", "must be >= 0");
  }

  if (auto levels = cfg.numbers("q_levels")) {
    sim.q_levels = *levels;
  } else {
    const double top = std::isnan(plan.target_theta) ? 2000.0 : 12.0 / plan.target_theta;
    for (int i = 1; i <= 24; ++i) sim.q_levels.push_back(top * i / 24.0);
  }
  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    throw config_error(msg.rfind("q_levels", 0) == 0 ? "q_levels" : "simulate", msg);
  }
  return plan;
}

inline std::string overflow_csv(const SimResult& res) {
  std::string csv = "q,prob,ci_low,ci_high,hits,episodes\n";
  for (const auto& p : res.overflow)
    csv += num(p.q) + "," + num(p.prob) + "," + num(p.ci_low) + "," + num(p.ci_high) + "," + std::to_string(p.hits) + "," +
           std::to_string(p.episodes) + "\n";
  return csv;
}

inline std::string simulation_summary(const SimulationPlan& plan, const SimResult& res) {
  std::ostringstream r;
  const auto& sim = plan.sim;
  r << "seed: " << sim.seed << "\n";
  r << "frames: " << sim.horizon_frames << "\n";
  r << "burn_in: " << res.burn_in << "\n";
  r << "arrival_bits_per_frame: " << num(sim.arrival_rate) << "\n";
  if (!std::isnan(plan.target_theta)) {
    r << "target_theta: " << num(plan.target_theta) << "\n";
    r << "analytical_effective_rate: " << num(plan.analytical_rate) << "\n";
  }
  if (const auto* f = std::get_if<FixedRates>(&sim.policy.mode)) {
    r << "mode: fixed\nr1: " << num(f->r1) << "\nr2: " << num(f->r2) << "\n";
  } else {
    r << "mode: variable\neps: " << num(std::get<TargetError>(sim.policy.mode).eps) << "\n";
  }
  r << "mean_service_bits_per_frame: " << num(res.mean_service) << "\n";
  r << "state_occupancy:";
  for (double f : res.state_occupancy) r << " " << num(f);
  r << "\n";
  if (res.decay.ok) {
    r << "decay_rate_hat: " << num(res.decay.rate) << "\n";
    r << "fit_window: " << num(res.decay.q_first) << " " << num(res.decay.q_last) << "\n";
    r << "fit_points: " << res.decay.points << "\n";
    r << "fit_r_squared: " << num(res.decay.r_squared) << "\n";
  } else {
    r << "decay_rate_hat: undefined\n";
  }
  if (!res.decay.message.empty()) r << "fit_note: " << res.decay.message << "\n";
  r << "horizon_warning: " << (res.horizon_warning ? "yes (confidence intervals widened)" : "no") << "\n";
  return r.str();
}

inline int cmd_simulate(const CommonOptions& o, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return guarded(err, [&] {
    const SimulationPlan plan = plan_simulation(load_settings(o));
    std::ofstream trace_file;
    std::function<void(const FrameRecord&)> trace;
    if (!o.trace.empty()) {
      trace_file.open(o.trace, std::ios::binary | std::ios::trunc);
      if (!trace_file) throw io_error("cannot open '" + o.trace + "' for writing");
      trace_file << "frame,state,h2,rate,service,queue\n";
      trace = [&](const FrameRecord& f) {
        trace_file << f.frame << ',' << f.state << ',' << num(f.h2) << ',' << num(f.rate) << ',' << num(f.service)
                   << ',' << num(f.queue) << '\n';
      };
    }
    const SimResult res = run_sim(plan.sim, trace);
    if (trace_file.is_open()) {
      trace_file.flush();
      if (!trace_file) throw io_error("write to '" + o.trace + "' failed");
    }
    const std::string summary = simulation_summary(plan, res);
    out << summary;
    if (!o.out.empty()) {
      write_file(o.out, overflow_csv(res));
      write_file(o.out + ".summary.txt", summary);
    } else {
      out << "\n" << overflow_csv(res);
    }
    return kOk;
  });
}

}  // namespace cograte::cli

#endif  // COGRATE_CLI_HPP

// Command-line front end: cograte <sense|rate|effrate|sweep|simulate> [options]

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "cograte/cli.hpp"

namespace {

using namespace cograte::cli;

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Key-value config file");
  cmd->add_option("--set", o.overrides, "Override a config key (key=value), repeatable");
  cmd->add_option("--out", o.out, "Output path (default: stdout)");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--jobs", o.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
  cmd->add_option("--quad-order", o.quad_order, "Gauss-Laguerre order")->check(CLI::Range(1, cograte::kMaxQuadratureOrder));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective rate of cognitive radio links with finite blocklength codes"};
  app.require_subcommand(1);

  CommonOptions common;
  RateOptions rate;
  SweepSpec sweep;
  std::string sweep_var = "theta";
  std::string sweep_modes = "both";
  std::string range;

  auto* sense = app.add_subcommand("sense", "Detection / false-alarm report and power feasibility");
  add_common(sense, common);

  auto* rate_cmd = app.add_subcommand("rate", "Error probability vs coding rate, finite and infinite blocklength");
  add_common(rate_cmd, common);
  rate_cmd->add_option("--snr", rate.snr, "Linear SNR");
  rate_cmd->add_option("--h2", rate.h2, "Fading power |h|^2");
  rate_cmd->add_option("--blocklength", rate.blocklength, "Channel uses n (default: (T-N)B)");
  rate_cmd->add_option("--r-lo", rate.r_lo, "Lowest rate");
  rate_cmd->add_option("--r-hi", rate.r_hi, "Highest rate (default: 1.5 x capacity)");
  rate_cmd->add_option("--steps", rate.steps, "Number of rates");

  auto* eff = app.add_subcommand("effrate", "Effective rate at the configured theta");
  add_common(eff, common);

  auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep to CSV");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--var", sweep_var, "lambda | sense_N | theta | blocklength | eps | rate_pair");
  sweep_cmd->add_option("--range", range, "lo:hi:steps");
  sweep_cmd->add_option("--list", sweep.list, "Explicit values (comma separated)")->delimiter(',');
  sweep_cmd->add_flag("--log", sweep.log_spacing, "Logarithmic spacing for --range");
  sweep_cmd->add_option("--modes", sweep_modes, "fixed | variable | both");

  auto* sim = app.add_subcommand("simulate", "Queue simulation with overflow-tail fit");
  add_common(sim, common);
  sim->add_option("--trace", common.trace, "Per-frame trace CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*sense) return cmd_sense(common);
  if (*rate_cmd) return cmd_rate(common, rate);
  if (*eff) return cmd_effrate(common);
  if (*sim) return cmd_simulate(common);

  return guarded(std::cerr, [&] {
    sweep.variable = parse_sweep_var(sweep_var);
    if (sweep_modes == "fixed") {
      sweep.variable_mode = false;
    } else if (sweep_modes == "variable") {
      sweep.fixed = false;
    } else if (sweep_modes != "both") {
      throw cograte::config_error("modes", "expected fixed, variable or both");
    }
    if (!range.empty()) {
      const auto v = cograte::Settings::parse_list("range", range);
      if (range.find(':') == std::string::npos || v.size() < 2) throw cograte::config_error("range", "expected lo:hi:steps");
      sweep.lo = v.front();
      sweep.hi = v.back();
      sweep.steps = static_cast<int>(v.size());
    }
    return cmd_sweep(common, sweep);
  });
}

#ifndef COGRATE_CONFIG_HPP
#define COGRATE_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cograte/effrate.hpp"
#include "cograte/sensing.hpp"

namespace cograte {

/// Invalid configuration value; `field()` names the offending key.
class config_error : public std::runtime_error {
 public:
  config_error(std::string field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Failure reading or writing a file.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Flat `key = value` settings (a TOML subset: numbers, booleans, quoted
// strings, one-line numeric arrays, `#` comments). Later assignments win.
class Settings {
 public:
  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "s", "q",
        "sense_duration", "bandwidth", "threshold", "noise_var", "interference_var",
        "frame_duration", "snr_scaling",
        "p1_db", "p2_db",
        "mode", "r1", "r2", "eps", "optimize",
        "mean_power", "quad_order",
        "theta",
        "perfect_sensing",
        "i0_db", "peak_p1_db", "peak_p2_db", "interference_mode", "power_control",
        "arrival", "arrival_theta", "arrival_scale", "horizon", "q_levels", "seed",
    };
    return keys;
  }

  static Settings parse(std::istream& in, const std::string& source = "config") {
    Settings s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = find_comment(line);
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') continue;  // table headers are accepted and ignored
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw config_error(source + ":" + std::to_string(lineno), "expected key = value");
      s.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return s;
  }

  static Settings load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file '" + path + "'");
    return parse(in, path);
  }

  /// Applies `key=value`.
  void set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw config_error(assignment, "expected key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
  }

  void set(const std::string& key, std::string value) {
    if (!known_keys().count(key)) throw config_error(key, "unknown key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    values_[key] = std::move(value);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_number(key, it->second);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw config_error(key, "expected true or false, got '" + it->second + "'");
  }

  /// A numeric array `[a, b, c]` or a range `lo:hi:steps` (inclusive, linear).
  std::optional<std::vector<double>> numbers(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return parse_list(key, it->second);
  }

  static double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
      throw config_error(key, "expected a finite number, got '" + text + "'");
    return v;
  }

  static std::vector<double> parse_list(const std::string& key, std::string text) {
    text = trim(text);
    std::vector<double> out;
    if (!text.empty() && text.front() == '[') {
      if (text.back() != ']') throw config_error(key, "unterminated array");
      std::stringstream ss(text.substr(1, text.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) out.push_back(parse_number(key, item));
      }
      return out;
    }
    if (std::count(text.begin(), text.end(), ':') == 2) {
      const auto a = text.find(':');
      const auto b = text.find(':', a + 1);
      const double lo = parse_number(key, text.substr(0, a));
      const double hi = parse_number(key, text.substr(a + 1, b - a - 1));
      const double steps = parse_number(key, text.substr(b + 1));
      if (!(lo < hi) || steps < 2 || steps != std::floor(steps))
        throw config_error(key, "range must be lo:hi:steps with lo < hi and integer steps >= 2");
      const int n = static_cast<int>(steps);
      for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static std::size_t find_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) return i;
    }
    return std::string::npos;
  }

  std::map<std::string, std::string> values_;
};

/// Builds a validated LinkPolicy. Unset keys take the reference defaults:
/// B = 10 kHz, noise 0.05, interference 0.12, s = 0.6, q = 0.2, P1 = 0 dB,
/// P2 = 10 dB, threshold 0.1, T = 100 ms, N = 1 ms, unit-mean Rayleigh fading.
inline LinkPolicy build_policy(const Settings& cfg) {
  LinkPolicy p;
  p.chain = {cfg.number("s", 0.6), cfg.number("q", 0.2)};
  const double bandwidth = cfg.number("bandwidth", 1e4);
  const double sense = cfg.number("sense_duration", 1e-3);
  p.sensing = {sense, bandwidth, cfg.number("threshold", 0.1), cfg.number("noise_var", 0.05),
               cfg.number("interference_var", 0.12)};
  p.frame.frame_duration = cfg.number("frame_duration", 0.1);
  p.frame.sense_duration = sense;
  p.frame.bandwidth = bandwidth;
  const std::string scaling = cfg.text("snr_scaling", "none");
  if (scaling == "none") {
    p.frame.snr_scaling = SnrScaling::none;
  } else if (scaling == "energy_constrained") {
    p.frame.snr_scaling = SnrScaling::energy_constrained;
  } else {
    throw config_error("snr_scaling", "expected none or energy_constrained");
  }
  p.p1 = db_to_linear(cfg.number("p1_db", 0.0));
  p.p2 = db_to_linear(cfg.number("p2_db", 10.0));

  const std::string mode = cfg.text("mode", "fixed");
  if (mode == "fixed") {
    p.mode = FixedRates{cfg.number("r1", 0.002), cfg.number("r2", 0.025)};
  } else if (mode == "variable") {
    p.mode = TargetError{cfg.number("eps", 1e-3)};
  } else {
    throw config_error("mode", "expected fixed or variable");
  }
  p.dist.mean_power = cfg.number("mean_power", 1.0);
  const double order = cfg.number("quad_order", kDefaultQuadratureOrder);
  if (order < 1 || order != std::floor(order) || order > kMaxQuadratureOrder)
    throw config_error("quad_order", "expected an integer in [1, " + std::to_string(kMaxQuadratureOrder) + "]");
  p.rule = QuadratureRule::gauss_laguerre(static_cast<int>(order));
  if (cfg.flag("perfect_sensing", false)) p.perf_override = SensingPerf{1.0, 0.0};

  // Map validation failures back to the key that caused them.
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    static const std::vector<std::pair<std::string, std::string>> prefixes{
        {"s ", "s"}, {"q ", "q"}, {"sense_duration", "sense_duration"}, {"bandwidth", "bandwidth"},
        {"threshold", "threshold"}, {"noise_var", "noise_var"}, {"interference_var", "interference_var"},
        {"frame_duration", "frame_duration"}, {"(frame_duration", "frame_duration"}, {"p1", "p1_db"},
        {"p2", "p2_db"}, {"r1", "r1"}, {"eps", "eps"}, {"mean_power", "mean_power"}};
    for (const auto& [prefix, key] : prefixes) {
      if (msg.rfind(prefix, 0) == 0) throw config_error(key, msg);
    }
    throw config_error("config", msg);
  }
  return p;
}

enum class PowerControl { none, bound_p1, avg_interference };

inline PowerControl power_control(const Settings& cfg) {
  const std::string v = cfg.text("power_control", "none");
  if (v == "none") return PowerControl::none;
  if (v == "bound_p1") return PowerControl::bound_p1;
  if (v == "avg_interference") return PowerControl::avg_interference;
  throw config_error("power_control", "expected none, bound_p1 or avg_interference");
}

inline InterferenceMode interference_mode(const Settings& cfg) {
  const std::string v = cfg.text("interference_mode", "avg_interference");
  if (v == "bound_p1") return InterferenceMode::bound_p1;
  if (v == "avg_interference") return InterferenceMode::avg_interference;
  throw config_error("interference_mode", "expected bound_p1 or avg_interference");
}

inline InterferenceBudget interference_budget(const Settings& cfg) {
  InterferenceBudget b{db_to_linear(cfg.number("i0_db", 7.0))};
  if (cfg.has("peak_p1_db")) b.peak_p1 = db_to_linear(cfg.number("peak_p1_db", 0.0));
  if (cfg.has("peak_p2_db")) b.peak_p2 = db_to_linear(cfg.number("peak_p2_db", 0.0));
  return b;
}

}  // namespace cograte

#endif  // COGRATE_CONFIG_HPP

#ifndef COGRATE_OPTIMIZE_HPP
#define COGRATE_OPTIMIZE_HPP

#include <algorithm>
#include <array>
#include <cmath>

namespace cograte::opt {

struct Max1D {
  double x;
  double value;
  int iterations;
  bool converged;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <typename F>
Max1D golden_section_max(F&& f, double lo, double hi, double tol, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = std::min(lo, hi);
  double b = std::max(lo, hi);
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  for (; it < max_iter && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const bool converged = (b - a) <= tol;
  return fc >= fd ? Max1D{c, fc, it, converged} : Max1D{d, fd, it, converged};
}

struct Max2D {
  std::array<double, 2> x;
  double value;
  int iterations;
  bool converged;
};

/// Compass (coordinate pattern) search for a maximum inside the box
/// [lo, hi]^2. The step halves whenever no axis move improves f.
template <typename F>
Max2D compass_search_max(F&& f, std::array<double, 2> start, std::array<double, 2> lo, std::array<double, 2> hi,
                         double initial_step, double min_step, int max_iter = 2000) {
  auto clamp = [&](std::array<double, 2> p) {
    for (int k = 0; k < 2; ++k) p[k] = std::clamp(p[k], lo[k], hi[k]);
    return p;
  };
  std::array<double, 2> best = clamp(start);
  double best_value = f(best);
  double step = initial_step;
  int it = 0;
  for (; it < max_iter && step >= min_step; ++it) {
    bool improved = false;
    for (int k = 0; k < 2 && !improved; ++k) {
      for (double dir : {1.0, -1.0}) {
        auto trial = best;
        trial[k] += dir * step;
        trial = clamp(trial);
        if (trial == best) continue;
        const double v = f(trial);
        if (v > best_value) {
          best = trial;
          best_value = v;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {best, best_value, it, step < min_step};
}

}  // namespace cograte::opt

#endif  // COGRATE_OPTIMIZE_HPP

#pragma once

#include <cmath>
#include <iostream>
#include <vector>

#include "core.hpp"

namespace smcaero {

struct DeadbandInterval {
  double t_start;
  double t_end;
  double delta;
};

struct DeadbandSchedule {
  std::vector<DeadbandInterval> intervals;

  void validate() const {
    if (intervals.empty()) throw ConfigError("dead band schedule is empty");
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const auto& iv = intervals[i];
      if (!(iv.t_end > iv.t_start)) throw ConfigError("dead band interval must have t_end > t_start");
      if (!(iv.delta >= 0.0)) throw ConfigError("dead band width must be >= 0");
      if (i > 0 && iv.t_start != intervals[i - 1].t_end) throw ConfigError("dead band intervals must be contiguous");
    }
  }
};

// boundary instants belong to the later interval
inline double deadband_at(double t, const DeadbandSchedule& s) {
  for (const auto& iv : s.intervals)
    if (t >= iv.t_start && t < iv.t_end) return iv.delta;
  if (!s.intervals.empty() && t == s.intervals.back().t_end) return s.intervals.back().delta;
  static thread_local bool warned = false;
  if (!warned) {
    std::clog << "warning: t=" << t << " outside dead band schedule, using last interval\n";
    warned = true;
  }
  return s.intervals.back().delta;
}

struct PwmConfig {
  double a = 0.05;
  double freq_hz = 20.0;
  double hold = 0.05;
  DeadbandSchedule schedule;

  void validate() const {
    if (!(a >= 0.0)) throw ConfigError("dither amplitude must be >= 0");
    if (!(hold > 0.0)) throw ConfigError("hold must be positive");
    if (!(freq_hz >= 0.0)) throw ConfigError("dither frequency must be >= 0");
    schedule.validate();
  }
};

inline double modified_sigma(double sigma, double t, const PwmConfig& cfg) {
  return sigma + cfg.a * std::sin(2.0 * kPi * cfg.freq_hz * t);
}

struct SampleHoldState {
  double held = 0.0;
  double next_sample = -1e300;
};

// zero-order hold with samples spaced exactly `hold` apart from the first call
inline double sample_hold(double raw, double t, double hold, SampleHoldState& sh) {
  if (sh.next_sample == -1e300) sh.next_sample = t;
  if (t >= sh.next_sample - 1e-9 * hold) {
    sh.held = raw;
    sh.next_sample += hold;
    while (sh.next_sample <= t + 1e-9 * hold) sh.next_sample += hold;
  }
  return sh.held;
}

// fires cmd only outside the dead band of the modified sliding variable, then holds
inline double pwm_gate(double cmd, double sigma_bar, double t, const PwmConfig& cfg, SampleHoldState& sh) {
  const double raw = std::abs(sigma_bar) > deadband_at(t, cfg.schedule) ? cmd : 0.0;
  return sample_hold(raw, t, cfg.hold, sh);
}

inline double offpulse_control(double rho, double sigma_bar, double t, const PwmConfig& cfg, SampleHoldState& sh) {
  return pwm_gate(rho * sgn(sigma_bar), sigma_bar, t, cfg, sh);
}

// shortest maximal nonzero run in a uniformly sampled signal, in seconds (infinity when none)
inline double min_pulse_width(const std::vector<double>& u, double dt) {
  double best = INFINITY;
  std::size_t run = 0;
  for (std::size_t i = 0; i <= u.size(); ++i) {
    if (i < u.size() && u[i] != 0.0) {
      ++run;
    } else if (run > 0) {
      // a run still open at the end of the record may be truncated
      if (i != u.size()) best = std::min(best, static_cast<double>(run) * dt);
      run = 0;
    }
  }
  return best;
}

}  // namespace smcaero

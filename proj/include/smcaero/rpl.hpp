#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "diff.hpp"
#include "pwm.hpp"
#include "sim.hpp"
#include "sliding.hpp"
#include "smc2.hpp"

namespace smcaero {

struct RplParams {
  double Jyy = 300.0;
  double m = 1000.0;
  double la = 2.8;
  double gm = 1.6;
  double ua_max = 15.0;
  double ud_max = 2800.0;
  double b_att = 9.3e-3;  // rounded la/Jyy, consistent with the 107.5 allocation gain
};

enum class RplCubic { Rounded, Soft };

struct RplCommands {
  double th, thd, thdd;
  double x, xd, xdd;
};

inline RplCommands rpl_commands(double t, RplCubic cubic = RplCubic::Rounded) {
  // soft: x(240) = 0 and x'(240) = 0; rounded: the same cubic to two figures
  const double a = cubic == RplCubic::Rounded ? 6.9e-4 : 1.0 / 1440.0;
  const double b = cubic == RplCubic::Rounded ? -0.23 : -11.0 / 48.0;
  return {kPi / 2.0, 0.0, 0.0, a * t * t * t + b * t * t - 10.0 * t + 6000.0, 3.0 * a * t * t + 2.0 * b * t - 10.0,
          6.0 * a * t + 2.0 * b};
}

inline double rpl_phi_a(double t) { return 0.06 * std::sin(0.2 * t); }
inline double rpl_phi_d(double t) { return 0.5 * std::sin(0.2 * t); }

// state (theta, theta', x, x'), u = (u_a, u_d) already saturated
inline Vec rpl_dynamics(const Vec& s, const Vec& u, double phi_a, double phi_d, const RplParams& p = {}) {
  Vec d(4);
  d << s[1], p.b_att * u[0] + phi_a, s[3], std::sin(s[0]) / p.m * (u[0] + u[1]) - p.gm + phi_d;
  return d;
}

struct Allocation {
  double ua, ud;
  bool saturated;
};

inline Allocation allocate_controls(double va, double vd, double theta, const RplParams& p = {}, double t = 0.0) {
  const double s = std::sin(theta);
  if (std::abs(s) < 0.1) throw AllocationError(t);
  const double ua = 107.5 * va;
  const double ud = -107.5 * va + 1e3 / s * vd;
  Allocation a{clamp(ua, -p.ua_max, p.ua_max), clamp(ud, 0.0, p.ud_max), false};
  a.saturated = a.ua != ua || a.ud != ud;
  return a;
}

struct RplPlant {
  RplParams p;
  bool perturbed = true;
  Vec deriv(const Vec& x, const Vec& u, double t) const {
    return rpl_dynamics(x, u, perturbed ? rpl_phi_a(t) : 0.0, perturbed ? rpl_phi_d(t) : 0.0, p);
  }
  std::vector<std::string> state_names() const { return {"theta", "theta_dot", "x", "x_dot"}; }
};

enum class RplLaw { Smc1, Pid, Stw };

inline DeadbandSchedule rpl_attitude_deadband() { return {{{0, 100, 0.05}, {100, 200, 0.025}, {200, 240, 0.01}}}; }
inline DeadbandSchedule rpl_descent_deadband() { return {{{0, 100, 0.1}, {100, 200, 0.075}, {200, 240, 0.05}}}; }

// integral state bounded by the reachable virtual control
inline StwState rpl_stw(double lambda, double eps_ratio, double gamma, double mu, double w_max) {
  StwState s;
  s.lambda = lambda;
  s.eps_ratio = eps_ratio;
  s.beta = eps_ratio * lambda;
  s.gamma = gamma;
  s.mu = mu;
  s.w_max = w_max;
  return s;
}

struct RplConfig {
  RplLaw law = RplLaw::Smc1;
  RplParams params;
  double dt = 1e-3;
  double t_end = 240.0;
  int record_stride = 10;
  double theta0_deg = 91.67;
  double theta_dot0_deg = 5.73;
  double x0 = 6500.0;
  double x_dot0 = -10.0;
  bool perturbed = true;
  RplCubic cubic = RplCubic::Rounded;
  double ts_att = 2.0;
  double ts_desc = 5.0;
  // sliding-variable integral is frozen while the proportional part exceeds the gate
  double gate_a = 0.05;
  double gate_d = 0.05;
  // adaptive relay
  double gamma_a = 5.0, gamma_d = 5.0;
  double rho0_a = 0.01, rho0_d = 0.01;
  // adaptive super-twisting, one state per channel
  StwState stw_a = rpl_stw(3.0, 0.1, 0.1, 0.01, 15.0 / 107.5);
  StwState stw_d = rpl_stw(1.0, 0.1, 0.1, 0.1, 2.8);
  // PID gains, attitude error taken in degrees
  double kp_a = 10.0, ki_a = 0.1, kd_a = 0.5;
  double kp_d = 30.0, ki_d = 0.2, kd_d = 0.1;
  bool pid_degrees = true;
  bool use_pwm = true;
  PwmConfig pwm_a{0.05, 20.0, 0.05, rpl_attitude_deadband()};
  PwmConfig pwm_d{0.05, 20.0, 0.05, rpl_descent_deadband()};
  // error derivatives from model state or from k=2 differentiators on theta and x
  bool diff_derivs = false;
  double diff_L_att = 1.0;
  double diff_L_desc = 10.0;

  void validate() const {
    SimConfig{0.0, t_end, dt, record_stride}.validate();
    if (use_pwm) {
      pwm_a.validate();
      pwm_d.validate();
    }
    if (!(gamma_a > 0.0 && gamma_d > 0.0)) throw ConfigError("adaptation rates must be positive");
    if (!(rho0_a >= 0.0 && rho0_d >= 0.0)) throw ConfigError("initial gains must be >= 0");
  }
};

class RplControl {
 public:
  explicit RplControl(const RplConfig& c)
      : c_(c),
        spec_a_(design_coefficients(2, c.ts_att, true)),
        spec_d_(design_coefficients(2, c.ts_desc, true)),
        rho_a_(c.rho0_a),
        rho_d_(c.rho0_d),
        stw_a_(c.stw_a),
        stw_d_(c.stw_d),
        diff_th_(DiffConfig{2, 0, c.diff_L_att, {}}),
        diff_x_(DiffConfig{2, 0, c.diff_L_desc, {}}) {
    acc_a_.gate = c.gate_a;
    acc_d_.gate = c.gate_d;
  }

  Vec step(double t, const Vec& s, double dt) {
    const auto cmd = rpl_commands(t, c_.cubic);
    double thd = s[1], xd = s[3];
    if (c_.diff_derivs) {
      if (first_) {
        diff_th_.state().z[0] = s[0];
        diff_x_.state().z[0] = s[2];
        first_ = false;
      }
      thd = diff_th_.z(1);
      xd = diff_x_.z(1);
      diff_th_.step(s[0], dt);
      diff_x_.step(s[2], dt);
    }
    ea_ = cmd.th - s[0];
    const double ead = cmd.thd - thd;
    ed_ = cmd.x - s[2];
    const double edd = cmd.xd - xd;
    sa_ = eval_sigma(spec_a_, {ea_, ead}, acc_a_, dt);
    sd_ = eval_sigma(spec_d_, {ed_, edd}, acc_d_, dt);
    const double sba = c_.use_pwm ? modified_sigma(sa_, t, c_.pwm_a) : sa_;
    const double sbd = c_.use_pwm ? modified_sigma(sd_, t, c_.pwm_d) : sd_;

    double va = 0.0, vd = 0.0;
    bool direct = false;
    switch (c_.law) {
      case RplLaw::Smc1:
        va = rho_a_ * sgn(sba);
        vd = rho_d_ * sgn(sbd);
        break;
      case RplLaw::Stw:
        va = stw_step(stw_a_, sa_, dt);
        vd = stw_step(stw_d_, sd_, dt);
        break;
      case RplLaw::Pid: {
        const double k = c_.pid_degrees ? 180.0 / kPi : 1.0;
        va = clamp(c_.kp_a * k * ea_ + c_.ki_a * k * pid_ia_ + c_.kd_a * k * ead, -c_.params.ua_max, c_.params.ua_max);
        vd = clamp(c_.kp_d * ed_ + c_.ki_d * pid_id_ + c_.kd_d * edd, 0.0, c_.params.ud_max);
        pid_ia_ += ea_ * dt;
        pid_id_ += ed_ * dt;
        direct = true;
        break;
      }
    }
    if (c_.use_pwm) {
      va = pwm_gate(va, sba, t, c_.pwm_a, sh_a_);
      vd = pwm_gate(vd, sbd, t, c_.pwm_d, sh_d_);
    }
    va_ = va;
    vd_ = vd;
    if (direct) {
      ua_ = va;
      ud_ = vd;
    } else {
      const auto al = allocate_controls(va, vd, s[0], c_.params, t);
      ua_ = al.ua;
      ud_ = al.ud;
      if (al.saturated) ++sat_events_;
    }

    // adaptation after the control is formed
    if (c_.law == RplLaw::Smc1) {
      const double da = deadband_at(t, c_.pwm_a.schedule), dd = deadband_at(t, c_.pwm_d.schedule);
      if (std::abs(sa_) > da) rho_a_ += c_.gamma_a * std::abs(sa_) * dt;
      if (std::abs(sd_) > dd) rho_d_ += c_.gamma_d * std::abs(sd_) * dt;
    } else if (c_.law == RplLaw::Stw) {
      stw_adapt(stw_a_, sa_, dt);
      stw_adapt(stw_d_, sd_, dt);
    }
    cmd_ = cmd;
    Vec u(2);
    u << ua_, ud_;
    return u;
  }

  std::vector<std::string> columns() const {
    return {"theta_deg", "theta_dot_deg", "theta_cmd_deg", "x_cmd", "e_a_deg", "e_d", "sigma_a", "sigma_d", "v_a",
            "v_d",       "u_a",           "u_d",           "rho_a", "rho_d",   "lambda_a", "lambda_d", "beta_a", "beta_d"};
  }

  void record(std::vector<double>& row) const {
    // row already holds t and the plant state
    const double th = row[1], thd = row[2];
    row.insert(row.end(), {deg(th), deg(thd), deg(cmd_.th), cmd_.x, deg(ea_), ed_, sa_, sd_, va_, vd_, ua_, ud_,
                           rho_a_, rho_d_, stw_a_.lambda, stw_d_.lambda, stw_a_.beta, stw_d_.beta});
  }

  long saturation_events() const { return sat_events_; }

 private:
  RplConfig c_;
  SlidingVariableSpec spec_a_, spec_d_;
  SigmaAccumulator acc_a_, acc_d_;
  double rho_a_, rho_d_;
  StwState stw_a_, stw_d_;
  Differentiator diff_th_, diff_x_;
  bool first_ = true;
  SampleHoldState sh_a_, sh_d_;
  double pid_ia_ = 0.0, pid_id_ = 0.0;
  double ea_ = 0.0, ed_ = 0.0, sa_ = 0.0, sd_ = 0.0, va_ = 0.0, vd_ = 0.0, ua_ = 0.0, ud_ = 0.0;
  RplCommands cmd_{};
  long sat_events_ = 0;
};

struct RplMetrics {
  double J_ea = 0.0, J_ed = 0.0, J_ua = 0.0, J_ud = 0.0;
};

// (1/T) sum |s_k| h over the recorded grid, last sample excluded
inline double average_abs(const std::vector<double>& s, double h, double T) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) a += std::abs(s[i]) * h;
  return a / T;
}

inline RplMetrics rpl_metrics(const SimTrace& tr) {
  const auto& t = tr.col("t");
  if (t.size() < 2) throw Error("trace too short for metrics");
  const double h = t[1] - t[0];
  const double T = t.back() - t.front();
  return {average_abs(tr.col("e_a_deg"), h, T), average_abs(tr.col("e_d"), h, T), average_abs(tr.col("u_a"), h, T),
          average_abs(tr.col("u_d"), h, T)};
}

struct RplResult {
  SimTrace trace;
  RplMetrics metrics;
  long saturation_events = 0;
};

inline RplResult run_rpl(const RplConfig& cfg) {
  cfg.validate();
  RplPlant plant{cfg.params, cfg.perturbed};
  RplControl ctl(cfg);
  Vec x0(4);
  x0 << rad(cfg.theta0_deg), rad(cfg.theta_dot0_deg), cfg.x0, cfg.x_dot0;
  RplResult r;
  r.trace = run_simulation(plant, ctl, x0, SimConfig{0.0, cfg.t_end, cfg.dt, cfg.record_stride});
  r.metrics = rpl_metrics(r.trace);
  r.saturation_events = ctl.saturation_events();
  return r;
}

}  // namespace smcaero

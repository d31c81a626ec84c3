#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "core.hpp"
#include "diff.hpp"
#include "lti.hpp"
#include "sim.hpp"
#include "sliding.hpp"
#include "smc2.hpp"

namespace smcaero {

struct LvParams {
  double I = 1.355e8;
  double C_Na = 8.0;
  double q = 4880.0;
  double S = 9.2;
  double l_a = 15.24;
  double S_n = 135.58;
  double V = 457.2;
  double l_g = 22.86;
  double R = 0.4535e6;
  double g = 18.29;
  double M = 21.89e4;
  double I_n = 1355.8;
  double w_e = 12.0;
  double z_e = 0.5;
  double tau_a = 0.2;
  double w_b = 12.5;
  double z_b = 0.005;
  double phi_g = -0.0005;
  double psi_g = 0.0001;
  double psi_s = 0.0001;
};

inline TransferFunction lv_rigid(const LvParams& p = {}) {
  return {{-(p.l_g * p.S_n + p.I_n), 0.0, -p.l_g * p.R}, {p.I, 0.0, -p.C_Na * p.q * p.S * p.l_a}};
}

inline TransferFunction lv_actuator(const LvParams& p = {}) {
  return tf_series({{1.0}, {p.tau_a, 1.0}}, {{p.w_e * p.w_e}, {1.0, 2.0 * p.z_e * p.w_e, p.w_e * p.w_e}});
}

inline TransferFunction lv_bending(const LvParams& p = {}) {
  return {{p.psi_s * (p.S_n * p.phi_g - p.I_n * p.psi_g), 0.0, p.psi_s * p.R * p.phi_g},
          {1.0, 2.0 * p.z_b * p.w_b, p.w_b * p.w_b}};
}

inline TransferFunction lv_open_loop(const LvParams& p = {}) {
  return tf_series(lv_actuator(p), tf_parallel(lv_rigid(p), lv_bending(p)));
}

// actuator block feeding the rigid + bending block; state = (actuator, airframe)
struct LvPlant {
  StateSpace act;
  StateSpace body;
  bool perturbed = true;

  int order() const { return act.order() + body.order(); }
  double beta(const Vec& x) const { return act.C.dot(x.head(act.order())) + act.D * 0.0; }
  double theta(const Vec& x) const { return body.C.dot(x.tail(body.order())) + body.D * beta(x); }
  // derivative of the output from the model (actuator has relative degree 3, so beta' has no input term)
  double theta_dot(const Vec& x) const {
    const Vec xa = x.head(act.order()), xb = x.tail(body.order());
    const double b = beta(x);
    const double bd = act.C.dot(act.A * xa);
    return body.C.dot(body.A * xb + body.B * b) + body.D * bd;
  }
  static double perturbation(double t) { return 0.2 + 0.1 * std::sin(0.1 * t); }

  Vec deriv(const Vec& x, const Vec& u, double t) const {
    const double in = u[0] + (perturbed ? perturbation(t) : 0.0);
    Vec d(order());
    const Vec xa = x.head(act.order()), xb = x.tail(body.order());
    d.head(act.order()) = act.A * xa + act.B * in;
    d.tail(body.order()) = body.A * xb + body.B * beta(x);
    return d;
  }
  std::vector<std::string> state_names() const {
    std::vector<std::string> n;
    for (int i = 0; i < act.order(); ++i) n.push_back("xa" + std::to_string(i));
    for (int i = 0; i < body.order(); ++i) n.push_back("xb" + std::to_string(i));
    return n;
  }
};

inline LvPlant build_lv_plant(const LvParams& p = {}, bool perturbed = true) {
  return {to_state_space(lv_actuator(p)), to_state_space(tf_parallel(lv_rigid(p), lv_bending(p))), perturbed};
}

inline double lv_command(double t) {
  static const std::vector<StepTerm> train{{-1.2, 2.0}, {2.3, 6.0}, {-1.2, 10.0}};
  return step_train(t, train);
}

inline double pd_control(double e, double edot, double kp = 1.87, double kd = 2.13) { return kp * e + kd * edot; }

inline double lv_smc_control(double sigma, double rho, double Lbar, double eps) {
  return -(rho + Lbar) * sigma / (std::abs(sigma) + eps);
}

enum class LvLaw { Pd, Smc1, Stw };

struct LvConfig {
  LvLaw law = LvLaw::Smc1;
  LvParams params;
  double dt = 1e-4;
  double t_end = 30.0;
  int record_stride = 100;
  bool perturbed = true;
  double kp = 1.87, kd = 2.13;
  double rho = 0.45;
  double Lbar = 0.35;
  double eps = 0.1;
  double ts = 8.0;
  double gate = std::numeric_limits<double>::infinity();  // sliding-variable integral gate
  StwState stw = [] {
    StwState s;
    s.lambda = 0.3;
    s.eps_ratio = 0.1;
    s.beta = 0.03;
    s.gamma = 0.1;
    s.mu = 0.1;
    s.lambda_min = 0.05;
    s.w_max = 5.0;
    return s;
  }();
  // error derivative from a k=2 differentiator on e, or from the model output derivative
  bool model_derivs = false;
  double diff_L = 5.0;
  // angles, gimbal and perturbation share one unit; scale < 1 reads the step train in degrees against a radian plant
  double command_scale = 1.0;

  void validate() const {
    SimConfig{0.0, t_end, dt, record_stride}.validate();
    if (!(rho > 0.0 && eps > 0.0)) throw ConfigError("rho and eps must be positive");
    if (!(Lbar >= 0.0)) throw ConfigError("Lbar must be >= 0");
    if (!(ts > 0.0)) throw ConfigError("ts must be positive");
    DiffConfig{2, 0, diff_L, {}}.validate();
  }
};

class LvControl {
 public:
  LvControl(const LvConfig& c, const LvPlant& plant)
      : c_(c), plant_(plant), spec_(design_coefficients(2, c.ts, true)), stw_(c.stw), diff_(DiffConfig{2, 0, c.diff_L, {}}) {
    acc_.gate = c.gate;
  }

  Vec step(double t, const Vec& x, double dt) {
    th_ = plant_.theta(x);
    thc_ = c_.command_scale * lv_command(t);
    e_ = thc_ - th_;
    if (c_.model_derivs) {
      ed_ = -plant_.theta_dot(x);
    } else {
      ed_ = diff_.z(1);
      diff_.step(e_, dt);
    }
    sigma_ = eval_sigma(spec_, {e_, ed_}, acc_, dt);
    switch (c_.law) {
      case LvLaw::Pd:
        u_ = -pd_control(e_, ed_, c_.kp, c_.kd);
        break;
      case LvLaw::Smc1:
        u_ = lv_smc_control(sigma_, c_.rho, c_.Lbar, c_.eps);
        break;
      case LvLaw::Stw:
        u_ = -stw_step(stw_, sigma_, dt);
        stw_adapt(stw_, sigma_, dt);
        break;
    }
    beta_ = plant_.beta(x);
    Vec u(1);
    u << u_;
    return u;
  }

  std::vector<std::string> columns() const {
    return {"theta", "theta_cmd", "e", "e_dot", "sigma", "u", "beta", "lambda", "beta_stw"};
  }
  void record(std::vector<double>& row) const {
    row.insert(row.end(), {th_, thc_, e_, ed_, sigma_, u_, beta_, stw_.lambda, stw_.beta});
  }

 private:
  LvConfig c_;
  LvPlant plant_;
  SlidingVariableSpec spec_;
  SigmaAccumulator acc_;
  StwState stw_;
  Differentiator diff_;
  double th_ = 0.0, thc_ = 0.0, e_ = 0.0, ed_ = 0.0, sigma_ = 0.0, u_ = 0.0, beta_ = 0.0;
};

struct LvMetrics {
  double J_e = 0.0, J_u = 0.0;
};

inline LvMetrics lv_metrics(const SimTrace& tr) {
  const auto& t = tr.col("t");
  if (t.size() < 2) throw Error("trace too short for metrics");
  const double h = t[1] - t[0], T = t.back() - t.front();
  LvMetrics m;
  const auto& e = tr.col("e");
  const auto& u = tr.col("u");
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    m.J_e += std::abs(e[i]) * h;
    m.J_u += std::abs(u[i]) * h;
  }
  m.J_e /= T;
  m.J_u /= T;
  return m;
}

struct LvResult {
  SimTrace trace;
  LvMetrics metrics;
  double max_abs_beta = 0.0;
};

inline LvResult run_lv(const LvConfig& cfg) {
  cfg.validate();
  const LvPlant plant = build_lv_plant(cfg.params, cfg.perturbed);
  LvControl ctl(cfg, plant);
  LvResult r;
  r.trace = run_simulation(plant, ctl, Vec::Zero(plant.order()), SimConfig{0.0, cfg.t_end, cfg.dt, cfg.record_stride});
  r.metrics = lv_metrics(r.trace);
  for (double b : r.trace.col("beta")) r.max_abs_beta = std::max(r.max_abs_beta, std::abs(b));
  return r;
}

}  // namespace smcaero

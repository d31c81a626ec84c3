#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "hosm.hpp"
#include "lti.hpp"
#include "sim.hpp"
#include "sliding.hpp"
#include "smc1.hpp"
#include "smc2.hpp"

namespace smcaero {

enum class CustomLaw { Smc1Sign, Smc1Sigmoid, Smc1Adaptive, Smc1DoubleLayer, Stw, StwAdaptive, Tw, QcHosm, NestedHosm, Achosm };

inline const std::vector<std::pair<std::string, CustomLaw>>& custom_law_names() {
  static const std::vector<std::pair<std::string, CustomLaw>> n{
      {"smc1-sign", CustomLaw::Smc1Sign},       {"smc1-sigmoid", CustomLaw::Smc1Sigmoid},
      {"smc1-adaptive", CustomLaw::Smc1Adaptive}, {"smc1-double-layer", CustomLaw::Smc1DoubleLayer},
      {"stw", CustomLaw::Stw},                  {"stw-adaptive", CustomLaw::StwAdaptive},
      {"tw", CustomLaw::Tw},                    {"qc-hosm", CustomLaw::QcHosm},
      {"nested-hosm", CustomLaw::NestedHosm},   {"achosm", CustomLaw::Achosm}};
  return n;
}

inline CustomLaw parse_custom_law(const std::string& s) {
  for (auto& [k, v] : custom_law_names())
    if (k == s) return v;
  throw ConfigError("unknown controller '" + s + "'");
}

inline std::string custom_law_name(CustomLaw l) {
  for (auto& [k, v] : custom_law_names())
    if (v == l) return k;
  return "?";
}

struct Perturbation {
  double bias = 0.0;
  double amp = 0.0;
  double freq = 0.0;  // rad/s
  double at(double t) const { return bias + amp * std::sin(freq * t); }
};

// SISO LTI plant y = G(u + f) under a sliding-mode law on e = y_c - y
struct CustomConfig {
  TransferFunction plant{{1.0}, {1.0, 0.0, 0.0}};
  CustomLaw law = CustomLaw::Smc1Sign;
  std::vector<StepTerm> command;  // empty: zero command
  Perturbation perturbation;
  std::vector<double> x0;  // empty: zero state
  double dt = 1e-4;
  double t_end = 10.0;
  int record_stride = 10;
  double ts = 2.0;
  bool with_integral = false;
  // relay and sigmoid
  double rho = 1.0;
  double eps = 0.1;
  double gamma = 1.0;
  double delta = 0.01;
  DoubleLayerState double_layer;
  StwState stw;
  TwState tw;
  double alpha = 1.0;  // HOSM magnitude
  AchosmState achosm;

  void validate() const {
    plant.validate();
    SimConfig{0.0, t_end, dt, record_stride}.validate();
    const int r = relative_degree(plant);
    if (r < 1 || r > 5) throw ConfigError("custom plant relative degree must lie in 1..5");
    if (!x0.empty() && static_cast<int>(x0.size()) != degree(plant.den))
      throw ConfigError("x0 length must equal the plant order");
    if (!(rho > 0.0 && eps > 0.0 && alpha > 0.0)) throw ConfigError("rho, eps and alpha must be positive");
    if (!(ts > 0.0)) throw ConfigError("ts must be positive");
    if (law == CustomLaw::Achosm) achosm.validate();
    if (law == CustomLaw::Smc1DoubleLayer) double_layer.validate();
  }
};

class CustomControl {
 public:
  explicit CustomControl(const CustomConfig& c)
      : c_(c), ss_(to_state_space(c.plant)), r_(relative_degree(c.plant)), stw_(c.stw), tw_(c.tw),
        dl_(c.double_layer), ach_(c.achosm), rho_(c.rho) {
    if (r_ >= 2) spec_ = design_coefficients(r_, c.ts, c.with_integral);
    Eigen::VectorXd v = ss_.B;
    for (int i = 1; i < r_; ++i) v = ss_.A * v;
    hf_ = ss_.C.dot(v);  // C A^(r-1) B
    if (hf_ == 0.0) throw ConfigError("plant high-frequency gain is zero");
    ach_.r = r_;
  }

  Vec step(double t, const Vec& x, double dt) {
    // exact error derivatives; the command is piecewise constant
    d_.assign(static_cast<std::size_t>(r_), 0.0);
    y_ = ss_.C.dot(x);
    Eigen::VectorXd ax = x;
    for (int i = 0; i < r_; ++i) {
      d_[static_cast<std::size_t>(i)] = -ss_.C.dot(ax);
      ax = ss_.A * ax;
    }
    d_[0] += c_.command.empty() ? 0.0 : step_train(t, c_.command);
    sigma_ = r_ >= 2 ? eval_sigma(spec_, d_, acc_, dt) : d_[0];
    const double sdot = first_ ? 0.0 : (sigma_ - sigma_prev_) / dt;
    first_ = false;
    sigma_prev_ = sigma_;

    switch (c_.law) {
      case CustomLaw::Smc1Sign:
        v_ = rho_ * sgn(sigma_);
        break;
      case CustomLaw::Smc1Sigmoid:
        v_ = rho_ * sigma_ / (std::abs(sigma_) + c_.eps);
        break;
      case CustomLaw::Smc1Adaptive:
        v_ = rho_ * sgn(sigma_);
        if (std::abs(sigma_) > c_.delta) rho_ += c_.gamma * std::abs(sigma_) * dt;
        break;
      case CustomLaw::Smc1DoubleLayer: {
        Vec s(1), vp(1);
        s << sigma_;
        vp << v_;
        auto o = double_layer_step(dl_, s, vp, dt);
        rho_ = o.gain;
        v_ = o.v[0];
        break;
      }
      case CustomLaw::Stw:
        v_ = stw_step(stw_, sigma_, dt);
        break;
      case CustomLaw::StwAdaptive:
        v_ = stw_step(stw_, sigma_, dt);
        stw_adapt(stw_, sigma_, dt);
        break;
      case CustomLaw::Tw:
        v_ = tw_step(tw_, sigma_, sdot, dt);
        break;
      case CustomLaw::QcHosm:
        v_ = r_ >= 2 ? quasi_continuous(r_, d_, c_.alpha) : c_.alpha * sgn(d_[0]);
        break;
      case CustomLaw::NestedHosm:
        v_ = r_ >= 2 ? nested_relay(r_, d_, c_.alpha) : c_.alpha * sgn(d_[0]);
        break;
      case CustomLaw::Achosm:
        v_ = achosm_step(ach_, d_, dt);
        break;
    }
    // e^(r) = -C A^r x - hf (u + f): dividing by hf gives e^(r) = xi - v
    u_ = v_ / hf_;
    f_ = c_.perturbation.at(t);
    Vec u(1);
    u << u_ + f_;
    return u;
  }

  std::vector<std::string> columns() const { return {"y", "e", "sigma", "v", "u", "f", "gain"}; }
  void record(std::vector<double>& row) const {
    row.insert(row.end(), {y_, d_[0], sigma_, v_, u_, f_, gain()});
  }

  double gain() const {
    switch (c_.law) {
      case CustomLaw::Stw:
      case CustomLaw::StwAdaptive:
        return stw_.lambda;
      case CustomLaw::Tw:
        return tw_.alpha1;
      case CustomLaw::Achosm:
        return ach_.L();
      default:
        return rho_;
    }
  }
  const StwState& stw() const { return stw_; }
  const DoubleLayerState& double_layer() const { return dl_; }

 private:
  CustomConfig c_;
  StateSpace ss_;
  int r_;
  SlidingVariableSpec spec_;
  SigmaAccumulator acc_;
  StwState stw_;
  TwState tw_;
  DoubleLayerState dl_;
  AchosmState ach_;
  double rho_;
  double hf_ = 1.0;
  std::vector<double> d_;
  double y_ = 0.0, sigma_ = 0.0, sigma_prev_ = 0.0, v_ = 0.0, u_ = 0.0, f_ = 0.0;
  bool first_ = true;
};

inline SimTrace run_custom(const CustomConfig& cfg) {
  cfg.validate();
  LtiPlant plant(cfg.plant);
  CustomControl ctl(cfg);
  Vec x0 = Vec::Zero(plant.ss.order());
  for (std::size_t i = 0; i < cfg.x0.size(); ++i) x0[static_cast<Eigen::Index>(i)] = cfg.x0[i];
  return run_simulation(plant, ctl, x0, SimConfig{0.0, cfg.t_end, cfg.dt, cfg.record_stride});
}

}  // namespace smcaero

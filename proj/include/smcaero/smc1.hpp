#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "core.hpp"
#include "sim.hpp"

namespace smcaero {

using Mat = Eigen::MatrixXd;

inline Mat checked_inverse(const Mat& g0) {
  Eigen::JacobiSVD<Mat> svd(g0);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (smin == 0.0 || sv(0) / smin > 1e12) throw ConfigError("G0 is singular or ill-conditioned");
  return g0.inverse();
}

inline Vec unit_vector_control(const Vec& sigma, const Mat& g0_inv, double rho0) {
  const double n = sigma.norm();
  if (n == 0.0) return Vec::Zero(g0_inv.rows());
  return g0_inv * (rho0 * sigma / n);
}

inline Vec sign_control(const Vec& sigma, const Mat& g0_inv, const Vec& r) {
  Vec v(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) v[i] = r[i] * sgn(sigma[i]);
  return g0_inv * v;
}

// sign replaced by sigma/(|sigma| + eps) per channel
inline Vec sigmoid_control(const Vec& sigma, const Mat& g0_inv, const Vec& gains, const Vec& eps) {
  Vec v(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!(eps[i] > 0.0)) throw ConfigError("sigmoid width must be positive");
    v[i] = gains[i] * sigma[i] / (std::abs(sigma[i]) + eps[i]);
  }
  return g0_inv * v;
}

struct Smc1Gains {
  Vec rho;
  Vec gamma;
  Vec delta;
};

// componentwise form
inline Smc1Gains adapt_gain_simple(Smc1Gains g, const Vec& sigma, double dt) {
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (std::abs(sigma[i]) > g.delta[i]) g.rho[i] += g.gamma[i] * std::abs(sigma[i]) * dt;
  return g;
}

// unit-vector form, one gain driven by the norm
inline double adapt_gain_unit(double rho0, double gamma0, double delta0, const Vec& sigma, double dt) {
  const double n = sigma.norm();
  return n > delta0 ? rho0 + gamma0 * n * dt : rho0;
}

struct DoubleLayerState {
  double k = 0.0;
  double r = 0.0;
  double eta = 0.01;
  double eps = 0.01;
  double alpha = 0.9;
  double r0 = 0.1;
  double gamma = 1.0;
  double delta0 = 0.01;
  double tau_f = 0.1;
  Vec veq;  // filtered switching signal
  double delta = 0.0;
  long clamp_events = 0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("double layer alpha must lie in (0,1)");
    if (!(r0 > 0.0)) throw ConfigError("double layer r0 must be positive");
    if (!(tau_f > 0.0)) throw ConfigError("filter time constant must be positive");
  }
};

struct DoubleLayerOut {
  double gain;  // k + eta
  Vec v;        // (k + eta) sigma/||sigma||
};

inline DoubleLayerOut double_layer_step(DoubleLayerState& st, const Vec& sigma, const Vec& v_prev, double dt) {
  if (st.veq.size() != v_prev.size()) st.veq = Vec::Zero(v_prev.size());
  const double a = dt / st.tau_f;
  st.veq += std::min(a, 1.0) * (v_prev - st.veq);
  st.delta = st.k - st.veq.norm() / st.alpha - st.eps;
  const double rho = st.r0 + st.r;
  st.k += -rho * sgn(st.delta) * dt;
  if (st.k < 0.0) {
    st.k = 0.0;
    ++st.clamp_events;
  }
  if (std::abs(st.delta) > st.delta0) st.r += st.gamma * std::abs(st.delta) * dt;
  DoubleLayerOut out{st.k + st.eta, Vec::Zero(sigma.size())};
  const double n = sigma.norm();
  if (n > 0.0) out.v = out.gain * sigma / n;
  return out;
}

}  // namespace smcaero

#pragma once

#include <cmath>
#include <limits>

#include "core.hpp"

namespace smcaero {

struct StwState {
  double w = 0.0;
  double lambda = 1.5;
  double beta = 1.1;
  // adaptive part
  double gamma = 1.0;
  double mu = 0.05;
  double lambda_min = 0.01;
  double eps_ratio = 0.1;
  double eta = 0.01;
  // anti-windup bound on the integral state
  double w_max = std::numeric_limits<double>::infinity();

  static StwState from_bound(double L1) {
    StwState s;
    s.lambda = 1.5 * std::sqrt(L1);
    s.beta = 1.1 * L1;
    return s;
  }
};

inline double stw_step(StwState& st, double sigma, double dt) {
  const double v = st.lambda * std::sqrt(std::abs(sigma)) * sgn(sigma) + st.w;
  st.w = clamp(st.w + st.beta * sgn(sigma) * dt, -st.w_max, st.w_max);
  return v;
}

inline void stw_adapt(StwState& st, double sigma, double dt) {
  if (st.lambda > st.lambda_min)
    st.lambda += st.gamma * sgn(std::abs(sigma) - st.mu) * dt;
  else
    st.lambda += st.eta * dt;
  st.beta = st.eps_ratio * st.lambda;
}

struct TwState {
  double v = 0.0;
  double alpha1 = 3.0;
  double alpha2 = 1.5;
  double v_max = 10.0;
  bool invert = false;
  // adaptive part
  double gamma1 = 1.0;
  double mu1 = 0.01;
  double c = 1.0;
  double alpha1_min = 0.1;
  double eta1 = 0.01;
};

inline bool tw_gains_valid(double alpha1, double alpha2, double L1) {
  return alpha1 - alpha2 > L1 && alpha1 + alpha2 - L1 > alpha1 - alpha2 + L1;
}

// for sigma' = xi - v: v' = a1 sign(sigma) + a2 sign(sigma') inside |v| < v_max, v' = -v outside.
// invert flips the twisting part for plants with sigma' = xi + v.
inline double tw_step(TwState& st, double sigma, double sigma_dot, double dt) {
  double vdot;
  if (std::abs(st.v) >= st.v_max)
    vdot = -st.v;
  else
    vdot = (st.invert ? -1.0 : 1.0) * (st.alpha1 * sgn(sigma) + st.alpha2 * sgn(sigma_dot));
  st.v += vdot * dt;
  return st.v;
}

inline void tw_adapt(TwState& st, double sigma, double sigma_dot, double dt) {
  const double V = sigma * sigma + st.c * sigma_dot * sigma_dot;
  if (st.alpha1 >= st.alpha1_min)
    st.alpha1 += st.gamma1 * sgn(V - st.mu1) * dt;
  else
    st.alpha1 += st.eta1 * dt;
  st.alpha2 = 0.5 * st.alpha1;
}

}  // namespace smcaero

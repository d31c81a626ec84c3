#pragma once

#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "core.hpp"

namespace smcaero {

struct HosmExponents {
  std::vector<double> qc;      // powers used by quasi_continuous
  std::vector<double> nested;  // outer powers (r-i)/q of the nested norms, i = r-1 .. 1
};

inline int nested_q(int r) {
  int q = 1;
  for (int i = 2; i <= r; ++i) q = std::lcm(q, i);
  return q;
}

inline HosmExponents homogeneity_exponents(int r) {
  if (r < 2 || r > 5) throw ConfigError("HOSM order must be 2..5");
  HosmExponents e;
  switch (r) {
    case 2: e.qc = {1.0 / 2.0}; break;
    case 3: e.qc = {2.0 / 3.0, 1.0 / 2.0}; break;
    case 4: e.qc = {3.0 / 4.0, 2.0 / 3.0, 1.0 / 2.0}; break;
    default: e.qc = {5.0, 5.0 / 2.0, 5.0 / 3.0, 5.0 / 4.0, 1.0}; break;
  }
  const double q = nested_q(r);
  for (int i = r - 1; i >= 1; --i) e.nested.push_back(i == 1 ? (r - 1.0) / r : (r - i) / q);
  return e;
}

namespace detail {
// x^p for x >= 0 with 0^p = 0 for any p (keeps the origin convention for negative powers)
inline double ppow(double x, double p) { return x == 0.0 ? 0.0 : std::pow(x, p); }
}  // namespace detail

// d = (sigma, sigma', ..., sigma^(r-1)); for e^(r) = xi - v use v = quasi_continuous(...)
inline double quasi_continuous(int r, const std::vector<double>& d, double alpha) {
  using detail::ppow;
  if (r < 2 || r > 5) throw ConfigError("HOSM order must be 2..5");
  if (static_cast<int>(d.size()) != r) throw Error("derivative stack length must equal r");
  double num = 0.0, den = 0.0;
  switch (r) {
    case 2:
      num = d[1] + spow(d[0], 0.5);
      den = std::abs(d[1]) + ppow(std::abs(d[0]), 0.5);
      break;
    case 3: {
      const double m = std::abs(d[1]) + ppow(std::abs(d[0]), 2.0 / 3.0);
      num = d[2] + 2.0 * ppow(m, -0.5) * (d[1] + spow(d[0], 2.0 / 3.0));
      den = std::abs(d[2]) + 2.0 * ppow(m, 0.5);
      break;
    }
    case 4: {
      const double m = std::abs(d[1]) + 0.5 * ppow(std::abs(d[0]), 0.75);
      const double inner = d[2] + ppow(m, -1.0 / 3.0) * (d[1] + 0.5 * spow(d[0], 0.75));
      const double n2 = std::abs(d[2]) + ppow(m, 2.0 / 3.0);
      num = d[3] + 3.0 * inner * ppow(n2, -0.5);
      den = std::abs(d[3]) + 3.0 * ppow(n2, 0.5);
      break;
    }
    default:
      num = spow(d[4], 5.0) + 6.0 * spow(d[3], 2.5) + 5.0 * spow(d[2], 5.0 / 3.0) + 6.0 * spow(d[1], 1.25) + d[0];
      den = std::pow(std::abs(d[4]), 5.0) + 6.0 * std::pow(std::abs(d[3]), 2.5) +
            5.0 * std::pow(std::abs(d[2]), 5.0 / 3.0) + 6.0 * std::pow(std::abs(d[1]), 1.25) + std::abs(d[0]);
      break;
  }
  if (den == 0.0) return 0.0;
  return alpha * num / den;
}

inline const std::vector<double>& nested_betas(int r) {
  static const std::array<std::vector<double>, 6> b{{{}, {}, {1.0}, {1.0, 2.0}, {0.5, 1.0, 3.0}, {0.5, 1.0, 2.0, 3.0}}};
  if (r < 2 || r > 5) throw ConfigError("HOSM order must be 2..5");
  return b[static_cast<std::size_t>(r)];
}

// bracketed switching function Phi_{r-1}; Phi_0 = sigma,
// Phi_i = sigma^(i) + beta_i N_i sign(Phi_{i-1}), N_i = (sum_{j<i} |sigma^(j)|^(q/(r-j)))^((r-i)/q)
inline double nested_surface(int r, const std::vector<double>& d) {
  using detail::ppow;
  if (static_cast<int>(d.size()) != r) throw Error("derivative stack length must equal r");
  const auto& beta = nested_betas(r);
  const double q = nested_q(r);
  double phi = d[0];
  for (int i = 1; i < r; ++i) {
    double sum = 0.0;
    for (int j = 0; j < i; ++j) sum += ppow(std::abs(d[static_cast<std::size_t>(j)]), q / (r - j));
    const double n = ppow(sum, (r - i) / q);
    phi = d[static_cast<std::size_t>(i)] + beta[static_cast<std::size_t>(i - 1)] * n * sgn(phi);
  }
  return phi;
}

// alpha times the bracket, without an outer sign
inline double nested(int r, const std::vector<double>& d, double alpha) { return alpha * nested_surface(r, d); }

// relay form used in closed loop: alpha sign(bracket)
inline double nested_relay(int r, const std::vector<double>& d, double alpha) {
  return alpha * sgn(nested_surface(r, d));
}

struct AchosmState {
  int r = 3;
  // layer-1 gains and powers of the homogeneous part
  std::vector<double> gamma1{1.0, 1.0, 1.0};
  std::vector<double> powers{1.0 / 3.0, 1.0 / 2.0, 1.0};
  double beta0 = 2.0;
  double alpha = 0.4;
  double eps = 0.01;
  double gamma = 1.0;
  double delta0 = 0.01;
  double l0 = 0.1;
  double r0 = 0.1;
  double tau_f = 0.05;

  double vsigma_integral = 0.0;
  double beta_sign_integral = 0.0;
  double l = 0.0;
  double rr = 0.0;
  double veq = 0.0;
  double s = 0.0;
  double delta = 0.0;
  double ldot = 0.0;
  long clamp_events = 0;

  double L() const { return l0 + l; }
  double lambda() const { return 2.0 * std::sqrt(2.0 * beta0 * L()); }
  double beta() const { return beta0 * L(); }

  void validate() const {
    if (!(beta0 > 1.0)) throw ConfigError("ACHOSM beta0 must exceed 1");
    if (!(alpha > 0.0 && alpha < 1.0 / beta0)) throw ConfigError("ACHOSM alpha must satisfy 0 < alpha < 1/beta0");
    if (!(l0 > 0.0 && r0 > 0.0)) throw ConfigError("ACHOSM l0 and r0 must be positive");
    if (static_cast<int>(gamma1.size()) != r || static_cast<int>(powers.size()) != r)
      throw ConfigError("ACHOSM needs one gain and one power per derivative");
  }
};

// for e^(r) = xi - v; returns v = v_sigma + v_s (sign flipped so the loop is stabilizing)
inline double achosm_step(AchosmState& st, const std::vector<double>& d, double dt) {
  if (static_cast<int>(d.size()) != st.r) throw Error("derivative stack length must equal r");
  double vsig = 0.0;
  for (int i = 0; i < st.r; ++i) {
    const auto k = static_cast<std::size_t>(i);
    vsig += st.gamma1[k] * spow(d[k], st.powers[k]);
  }
  st.s = d.back() + st.vsigma_integral;
  const double L = st.L();
  st.delta = L - std::abs(st.veq) / (st.alpha * st.beta0);
  const double rho = st.r0 + st.rr;
  st.ldot = -rho * sgn(st.delta);
  const double vs = st.s * st.ldot / L + st.lambda() * spow(st.s, 0.5) + st.beta_sign_integral;
  const double switching = st.beta() * sgn(st.s);

  st.vsigma_integral += vsig * dt;
  st.beta_sign_integral += switching * dt;
  st.veq += std::min(dt / st.tau_f, 1.0) * (switching - st.veq);
  st.l += st.ldot * dt;
  if (st.l < 0.0) {
    st.l = 0.0;
    ++st.clamp_events;
  }
  if (std::abs(st.delta) > st.delta0) st.rr += st.gamma * std::abs(st.delta) * dt;
  return vsig + vs;
}

}  // namespace smcaero

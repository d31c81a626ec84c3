#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "core.hpp"
#include "lti.hpp"

namespace smcaero {

// normalized ITAE characteristic polynomials, coefficients of s^(n-1)..s^0 at omega = 1
inline const std::vector<double>& itae_table(int order) {
  static const std::vector<std::vector<double>> t{
      {},
      {1.0},
      {1.4, 1.0},
      {1.75, 2.15, 1.0},
      {2.1, 3.4, 2.7, 1.0},
      {2.8, 5.0, 5.5, 3.4, 1.0},
  };
  if (order < 1 || order > 5) throw ConfigError("ITAE order must be 1..5");
  return t[static_cast<std::size_t>(order)];
}

struct SlidingVariableSpec {
  int r = 1;
  std::vector<double> coeffs;  // c_{r-2} .. c_0
  double c_int = 0.0;
  double t_settle = 0.0;

  // s^r + c_{r-2} s^{r-1} + ... + c_0 s + c_int (integral form), else s^(r-1) + ... + c_0
  Poly characteristic() const {
    Poly p{1.0};
    for (double c : coeffs) p.push_back(c);
    if (c_int != 0.0) p.push_back(c_int);
    return p;
  }
};

inline SlidingVariableSpec design_coefficients(int r, double t_settle, bool with_integral) {
  if (r < 2 || r > 5) throw ConfigError("sliding variable design needs 2 <= r <= 5");
  if (!(t_settle > 0.0)) throw ConfigError("settling time must be positive");
  const double w = 10.0 / t_settle;
  const int order = with_integral ? r : r - 1;
  const auto& base = itae_table(order);
  SlidingVariableSpec s;
  s.r = r;
  s.t_settle = t_settle;
  for (int i = 0; i < order; ++i) {
    const double c = base[static_cast<std::size_t>(i)] * std::pow(w, i + 1);
    if (with_integral && i == order - 1)
      s.c_int = c;
    else
      s.coeffs.push_back(c);
  }
  return s;
}

struct SigmaAccumulator {
  double integral = 0.0;
  double last_sigma = 0.0;
  // integration is frozen while |sigma - c_int * integral| exceeds gate
  double gate = std::numeric_limits<double>::infinity();
};

// stack = (e, e', ..., e^(r-1)); rectangle rule on the integral after evaluation
inline double eval_sigma(const SlidingVariableSpec& spec, const std::vector<double>& stack, SigmaAccumulator& acc,
                         double dt) {
  if (static_cast<int>(stack.size()) != spec.r) throw Error("error stack length must equal r");
  double s = stack[static_cast<std::size_t>(spec.r - 1)];
  const int nc = static_cast<int>(spec.coeffs.size());
  for (int i = 0; i < nc; ++i) s += spec.coeffs[static_cast<std::size_t>(i)] * stack[static_cast<std::size_t>(nc - 1 - i)];
  const double proportional = s;
  s += spec.c_int * acc.integral;
  acc.last_sigma = s;
  if (std::abs(proportional) <= acc.gate) acc.integral += stack[0] * dt;
  return s;
}

}  // namespace smcaero

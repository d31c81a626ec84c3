#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "sim.hpp"

namespace smcaero {

// polynomial coefficients in descending powers of s
using Poly = std::vector<double>;

inline Poly strip(Poly p) {
  auto it = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
  p.erase(p.begin(), it);
  return p.empty() ? Poly{0.0} : p;
}

inline int degree(const Poly& p) { return static_cast<int>(strip(p).size()) - 1; }

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  std::size_t oa = r.size() - a.size(), ob = r.size() - b.size();
  for (std::size_t i = 0; i < a.size(); ++i) r[oa + i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[ob + i] += b[i];
  return r;
}

inline double poly_eval(const Poly& p, double s) {
  double v = 0.0;
  for (double c : p) v = v * s + c;
  return v;
}

inline std::vector<std::complex<double>> roots(const Poly& p_in) {
  Poly p = strip(p_in);
  const int n = static_cast<int>(p.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) comp(0, j) = -p[static_cast<std::size_t>(j) + 1] / p[0];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<std::complex<double>> r;
  for (int i = 0; i < n; ++i) r.push_back(es.eigenvalues()[i]);
  return r;
}

inline bool is_hurwitz(const Poly& p) {
  for (auto z : roots(p))
    if (!(z.real() < 0.0)) return false;
  return true;
}

struct TransferFunction {
  Poly num;
  Poly den;

  void validate() const {
    if (num.empty() || den.empty()) throw Error("transfer function needs num and den");
    for (double c : num)
      if (!std::isfinite(c)) throw Error("non-finite numerator coefficient");
    for (double c : den)
      if (!std::isfinite(c)) throw Error("non-finite denominator coefficient");
    if (strip(den).size() == 1 && strip(den)[0] == 0.0) throw Error("zero denominator");
    if (degree(num) > degree(den)) throw Error("improper transfer function");
  }

  double dc_gain() const { return poly_eval(num, 0.0) / poly_eval(den, 0.0); }
};

inline int relative_degree(const TransferFunction& tf) {
  tf.validate();
  return degree(tf.den) - degree(tf.num);
}

struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;

  int order() const { return static_cast<int>(A.rows()); }

  // h_k = C A^(k-1) B for k = 1..count
  std::vector<double> markov(int count) const {
    std::vector<double> h;
    Eigen::VectorXd v = B;
    for (int k = 0; k < count; ++k) {
      h.push_back(C.dot(v));
      v = A * v;
    }
    return h;
  }
};

// controllable canonical form, denominator normalized to monic here only
inline StateSpace to_state_space(const TransferFunction& tf) {
  tf.validate();
  Poly den = strip(tf.den);
  Poly num = strip(tf.num);
  const int n = static_cast<int>(den.size()) - 1;
  const double a0 = den[0];
  for (double& c : den) c /= a0;
  for (double& c : num) c /= a0;
  Poly b(static_cast<std::size_t>(n) + 1, 0.0);
  std::copy(num.begin(), num.end(), b.end() - static_cast<long>(num.size()));

  StateSpace ss;
  ss.D = b[0];
  ss.A = Eigen::MatrixXd::Zero(n, n);
  ss.B = Eigen::VectorXd::Zero(n);
  ss.C = Eigen::RowVectorXd::Zero(n);
  if (n == 0) return ss;
  for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) ss.A(n - 1, j) = -den[static_cast<std::size_t>(n - j)];
  ss.B(n - 1) = 1.0;
  // strictly proper remainder b - D*den, ascending powers into C
  for (int j = 0; j < n; ++j) {
    const std::size_t idx = static_cast<std::size_t>(n - j);
    ss.C(j) = b[idx] - ss.D * den[idx];
  }
  return ss;
}

inline TransferFunction tf_series(const TransferFunction& g1, const TransferFunction& g2) {
  return {poly_mul(g1.num, g2.num), poly_mul(g1.den, g2.den)};
}

inline TransferFunction tf_parallel(const TransferFunction& g1, const TransferFunction& g2) {
  return {poly_add(poly_mul(g1.num, g2.den), poly_mul(g2.num, g1.den)), poly_mul(g1.den, g2.den)};
}

// pole/zero pairs closer than tol; composition never cancels them
inline std::vector<std::pair<std::complex<double>, std::complex<double>>> near_common_roots(
    const TransferFunction& tf, double tol = 1e-9) {
  std::vector<std::pair<std::complex<double>, std::complex<double>>> out;
  auto zs = roots(tf.num);
  auto ps = roots(tf.den);
  for (auto z : zs)
    for (auto p : ps)
      if (std::abs(z - p) <= tol * std::max(1.0, std::abs(p))) out.emplace_back(z, p);
  return out;
}

// benchmark model used for practical relative degree identification
inline TransferFunction lv_prd_bench() {
  return {{-117.1, -13.55, -16870.0}, {0.2, 3.425, 72.39, 679.0, 6364.0, 22230.0, -2557.0, -9000.0}};
}

// single-input LTI plant: state x, input u[0], output y = Cx + Du
struct LtiPlant {
  StateSpace ss;
  explicit LtiPlant(StateSpace s) : ss(std::move(s)) {}
  explicit LtiPlant(const TransferFunction& tf) : ss(to_state_space(tf)) {}

  Vec deriv(const Vec& x, const Vec& u, double) const { return ss.A * x + ss.B * u[0]; }
  double output(const Vec& x, double u) const { return ss.C.dot(x) + ss.D * u; }
  std::vector<std::string> state_names() const {
    std::vector<std::string> n;
    for (int i = 0; i < ss.order(); ++i) n.push_back("x" + std::to_string(i));
    return n;
  }
};

}  // namespace smcaero

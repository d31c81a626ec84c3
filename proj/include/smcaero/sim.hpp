#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace smcaero {

using Vec = Eigen::VectorXd;

struct SimConfig {
  double t0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  int record_stride = 1;
  double bound = 1e9;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!(t_end > t0)) throw ConfigError("t_end must exceed t0");
    if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
    if (!(bound > 0.0)) throw ConfigError("divergence bound must be > 0");
  }

  long steps() const { return std::lround((t_end - t0) / dt); }
};

enum class Method { Euler, RK4 };

class SimTrace {
 public:
  SimTrace() = default;
  explicit SimTrace(std::vector<std::string> names) : names_(std::move(names)), cols_(names_.size()) {}

  const std::vector<std::string>& names() const { return names_; }
  std::size_t rows() const { return cols_.empty() ? 0 : cols_[0].size(); }
  std::size_t width() const { return names_.size(); }

  bool has(std::string_view name) const { return index(name) >= 0; }

  const std::vector<double>& col(std::string_view name) const {
    int i = index(name);
    if (i < 0) throw Error("no such trace column: " + std::string(name));
    return cols_[static_cast<std::size_t>(i)];
  }
  const std::vector<double>& col(std::size_t i) const { return cols_.at(i); }

  void append(const std::vector<double>& row) {
    if (row.size() != cols_.size()) throw Error("trace row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) cols_[i].push_back(row[i]);
  }

  bool all_finite() const {
    for (const auto& c : cols_)
      for (double v : c)
        if (!std::isfinite(v)) return false;
    return true;
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < names_.size(); ++i) os << (i ? "," : "") << names_[i];
    os << '\n';
    os << std::setprecision(17);
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::size_t i = 0; i < cols_.size(); ++i) os << (i ? "," : "") << cols_[i][r];
      os << '\n';
    }
  }

  // content hash over names and raw sample bits
  std::size_t hash() const {
    std::string buf;
    for (const auto& n : names_) buf += n + '\n';
    for (const auto& c : cols_)
      buf.append(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(double));
    return std::hash<std::string_view>{}(buf);
  }

 private:
  int index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }

  std::vector<std::string> names_;
  std::vector<std::vector<double>> cols_;
};

template <class F>
Vec checked_deriv(const F& deriv, const Vec& x, const Vec& u, double t) {
  Vec d = deriv(x, u, t);
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!std::isfinite(d[i])) throw DivergedError(t, "derivative[" + std::to_string(i) + "]");
  return d;
}

template <class F>
Vec euler_step(const Vec& x, const F& deriv, const Vec& u, double t, double dt) {
  return x + dt * checked_deriv(deriv, x, u, t);
}

template <class F>
Vec rk4_step(const Vec& x, const F& deriv, const Vec& u, double t, double dt) {
  Vec k1 = checked_deriv(deriv, x, u, t);
  Vec k2 = checked_deriv(deriv, Vec(x + 0.5 * dt * k1), u, t + 0.5 * dt);
  Vec k3 = checked_deriv(deriv, Vec(x + 0.5 * dt * k2), u, t + 0.5 * dt);
  Vec k4 = checked_deriv(deriv, Vec(x + dt * k3), u, t + dt);
  return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double heaviside(double t, double tau) { return t >= tau ? 1.0 : 0.0; }

struct StepTerm {
  double amplitude;
  double tau;
};

inline double step_train(double t, const std::vector<StepTerm>& terms) {
  if (terms.empty()) throw Error("step_train needs at least one term");
  double s = 0.0;
  for (const auto& term : terms) s += term.amplitude * heaviside(t, term.tau);
  return s;
}

template <class P>
concept Plant = requires(const P& p, const Vec& x, const Vec& u, double t) {
  { p.deriv(x, u, t) } -> std::convertible_to<Vec>;
  { p.state_names() } -> std::convertible_to<std::vector<std::string>>;
};

// step() is called exactly once per integration step and may mutate controller state.
// record() appends the controller's columns for the sample just computed.
template <class C>
concept Controller = requires(C& c, double t, const Vec& x, double dt, std::vector<double>& row) {
  { c.step(t, x, dt) } -> std::convertible_to<Vec>;
  { c.columns() } -> std::convertible_to<std::vector<std::string>>;
  c.record(row);
};

template <Plant P, Controller C>
SimTrace run_simulation(const P& plant, C& ctl, Vec x, const SimConfig& cfg, Method method = Method::Euler) {
  cfg.validate();
  std::vector<std::string> names{"t"};
  for (auto& n : plant.state_names()) names.push_back(n);
  for (auto& n : ctl.columns()) names.push_back(n);
  SimTrace trace(names);

  const long n = cfg.steps();
  const auto deriv = [&plant](const Vec& xx, const Vec& uu, double tt) { return plant.deriv(xx, uu, tt); };
  std::vector<double> row;
  row.reserve(names.size());
  for (long k = 0; k <= n; ++k) {
    const double t = cfg.t0 + static_cast<double>(k) * cfg.dt;
    Vec u = ctl.step(t, x, cfg.dt);
    if (k % cfg.record_stride == 0) {
      row.clear();
      row.push_back(t);
      for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(x[i]);
      ctl.record(row);
      trace.append(row);
    }
    if (k == n) break;
    x = method == Method::Euler ? euler_step(x, deriv, u, t, cfg.dt) : rk4_step(x, deriv, u, t, cfg.dt);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!std::isfinite(x[i]) || std::abs(x[i]) > cfg.bound)
        throw DivergedError(t + cfg.dt, "state[" + std::to_string(i) + "]");
  }
  return trace;
}

// plumbing plant for tests and custom scenarios
struct FunctionPlant {
  std::function<Vec(const Vec&, const Vec&, double)> f;
  std::vector<std::string> names;
  Vec deriv(const Vec& x, const Vec& u, double t) const { return f(x, u, t); }
  std::vector<std::string> state_names() const { return names; }
};

struct FunctionController {
  std::function<Vec(double, const Vec&, double)> law;
  std::vector<std::string> names;
  Vec last;
  Vec step(double t, const Vec& x, double dt) {
    last = law(t, x, dt);
    return last;
  }
  std::vector<std::string> columns() const { return names; }
  void record(std::vector<double>& row) const {
    for (Eigen::Index i = 0; i < last.size(); ++i) row.push_back(last[i]);
  }
};

}  // namespace smcaero

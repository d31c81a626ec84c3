#pragma once

#include <cmath>
#include <vector>

#include "core.hpp"

namespace smcaero {

// lambda_0 .. lambda_k
inline std::vector<double> coefficient_table(int k) {
  switch (k) {
    case 1: return {1.1, 1.5};
    case 2: return {1.1, 2.12, 3.0};
    case 3: return {1.1, 3.06, 4.16, 3.0};
    case 4: return {1.1, 4.57, 9.30, 10.03, 5.0};
    case 5: return {1.1, 6.75, 20.26, 32.24, 23.72, 7.0};
    default: throw ConfigError("differentiator order k must be 1..5");
  }
}

struct DiffConfig {
  int nd = 2;
  int nf = 0;
  double L = 1.0;
  std::vector<double> lambdas;  // empty: take coefficient_table(nd + nf)

  int k() const { return nd + nf; }
  std::vector<double> coeffs() const { return lambdas.empty() ? coefficient_table(k()) : lambdas; }

  void validate() const {
    if (nd < 1 || nf < 0 || nd + nf > 5) throw ConfigError("need 1 <= nd and nd + nf <= 5");
    if (!(L > 0.0)) throw ConfigError("differentiator L must be positive");
    auto c = coeffs();
    if (static_cast<int>(c.size()) != k() + 1) throw ConfigError("lambda list must have nd + nf + 1 entries");
    for (double v : c)
      if (!(v > 0.0)) throw ConfigError("lambdas must be positive");
  }
};

struct DiffState {
  std::vector<double> w;  // filtering states w_1 .. w_nf
  std::vector<double> z;  // z_0 .. z_nd

  static DiffState zeros(const DiffConfig& c) {
    return {std::vector<double>(static_cast<std::size_t>(c.nf), 0.0),
            std::vector<double>(static_cast<std::size_t>(c.nd) + 1, 0.0)};
  }
};

// one Euler step of the (filtering) differentiator chain
class Differentiator {
 public:
  explicit Differentiator(DiffConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    lam_ = cfg_.coeffs();
    const int k = cfg_.k();
    gain_.resize(static_cast<std::size_t>(k) + 1);
    pw_.resize(static_cast<std::size_t>(k) + 1);
    // chain position j = 0..k uses lambda_{k-j} L^{(j+1)/(k+1)} [.]^{(k-j)/(k+1)}
    for (int j = 0; j <= k; ++j) {
      gain_[static_cast<std::size_t>(j)] =
          lam_[static_cast<std::size_t>(k - j)] * std::pow(cfg_.L, (j + 1.0) / (k + 1.0));
      pw_[static_cast<std::size_t>(j)] = (k - j) / (k + 1.0);
    }
    st_ = DiffState::zeros(cfg_);
  }

  const DiffConfig& config() const { return cfg_; }
  const DiffState& state() const { return st_; }
  DiffState& state() { return st_; }
  double z(int i) const { return st_.z.at(static_cast<std::size_t>(i)); }

  void step(double f, double dt) {
    const int nf = cfg_.nf, nd = cfg_.nd, k = cfg_.k();
    const double w1 = nf > 0 ? st_.w[0] : st_.z[0] - f;
    std::vector<double> chain(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j < nf; ++j) chain[static_cast<std::size_t>(j)] = st_.w[static_cast<std::size_t>(j)];
    for (int i = 0; i <= nd; ++i) chain[static_cast<std::size_t>(nf + i)] = st_.z[static_cast<std::size_t>(i)];
    std::vector<double> rate(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j) {
      const auto u = static_cast<std::size_t>(j);
      double next;
      if (j == k)
        next = 0.0;
      else if (j == nf - 1)
        next = st_.z[0] - f;
      else
        next = chain[u + 1];
      rate[u] = -gain_[u] * spow(w1, pw_[u]) + next;
    }
    for (int j = 0; j <= k; ++j) chain[static_cast<std::size_t>(j)] += dt * rate[static_cast<std::size_t>(j)];
    for (int j = 0; j < nf; ++j) st_.w[static_cast<std::size_t>(j)] = chain[static_cast<std::size_t>(j)];
    for (int i = 0; i <= nd; ++i) st_.z[static_cast<std::size_t>(i)] = chain[static_cast<std::size_t>(nf + i)];
  }

 private:
  DiffConfig cfg_;
  std::vector<double> lam_, gain_, pw_;
  DiffState st_;
};

inline DiffState diff_step(const DiffConfig& cfg, const DiffState& st, double f_meas, double dt) {
  Differentiator d(cfg);
  d.state() = st;
  d.step(f_meas, dt);
  return d.state();
}

struct DiffTrace {
  std::vector<std::vector<double>> z;  // z[i][n]
  std::vector<double> residual;        // z0 - f
  long converged_index = -1;           // first sample after which |z0 - f| stays below the band
  double converged_time = -1.0;
};

// band for the convergence timestamp: 10 L dt^(k+1)... floored so double rounding does not dominate
inline double convergence_band(const DiffConfig& cfg, double dt) {
  return std::max(10.0 * cfg.L * std::pow(dt, cfg.k() + 1.0), 1e-12);
}

inline DiffTrace differentiate_trace(const DiffConfig& cfg, const std::vector<double>& f, double dt, double t0 = 0.0) {
  Differentiator d(cfg);
  DiffTrace out;
  out.z.assign(static_cast<std::size_t>(cfg.nd) + 1, std::vector<double>(f.size()));
  out.residual.resize(f.size());
  for (std::size_t n = 0; n < f.size(); ++n) {
    for (int i = 0; i <= cfg.nd; ++i) out.z[static_cast<std::size_t>(i)][n] = d.z(i);
    out.residual[n] = d.z(0) - f[n];
    d.step(f[n], dt);
  }
  const double band = convergence_band(cfg, dt);
  long last_bad = -1;
  for (std::size_t n = 0; n < f.size(); ++n)
    if (std::abs(out.residual[n]) > band) last_bad = static_cast<long>(n);
  if (last_bad + 1 < static_cast<long>(f.size())) {
    out.converged_index = last_bad + 1;
    out.converged_time = t0 + static_cast<double>(out.converged_index) * dt;
  }
  return out;
}

}  // namespace smcaero

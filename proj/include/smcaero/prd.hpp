#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "core.hpp"
#include "diff.hpp"
#include "lti.hpp"
#include "sim.hpp"

namespace smcaero {

struct PrdConfig {
  double alpha = 0.1;
  long n_iter = 10000;  // integration steps simulated after tau
  double tau = 1.0;
  double dt = 1e-4;
  int max_order = 8;
  double diff_L = 0.0;  // 0 selects a per-order bound from the window length
  double window = 0.2;
  double amplitude = 1.0;
  std::vector<StepTerm> input;  // overrides amplitude * 1(t - tau) when non-empty
  int sample_stride = 10;       // analyzer sampling period in integration steps
  double kappa = 10.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(window > 0.0) || !(tau > window)) throw ConfigError("need 0 < window < tau");
    if (max_order < 1) throw ConfigError("max_order must be >= 1");
    if (n_iter < 1 || static_cast<double>(n_iter) * dt < window) throw ConfigError("n_iter * dt must cover the window");
    if (sample_stride < 1) throw ConfigError("sample_stride must be >= 1");
    if (diff_L < 0.0) throw ConfigError("diff_L must be >= 0");
  }

  double input_at(double t) const { return input.empty() ? amplitude * heaviside(t, tau) : step_train(t, input); }
};

struct AnalyzerResult {
  double score = 0.0;
  bool step_like = false;
};

// trace sampled every ts from t0; steepness = largest one-sample jump after tau relative to the window amplitude
inline AnalyzerResult performance_analyzer(const std::vector<double>& trace, double t0, double ts, double tau,
                                           double window, double alpha) {
  const double eps = 1e-9 * ts;
  const auto first = static_cast<long>(std::ceil((tau - window - t0) / ts - 1e-9));
  const auto last = static_cast<long>(std::floor((tau + window - t0) / ts + 1e-9));
  if (first < 0 || last >= static_cast<long>(trace.size())) throw Error("analysis window outside trace");
  double amp = 0.0, jump = 0.0;
  for (long n = first; n <= last; ++n) {
    const auto i = static_cast<std::size_t>(n);
    amp = std::max(amp, std::abs(trace[i]));
    const double t = t0 + static_cast<double>(n) * ts;
    if (n > first && t > tau + eps) jump = std::max(jump, std::abs(trace[i] - trace[i - 1]));
  }
  AnalyzerResult r;
  r.score = jump / (amp + 1e-12);
  r.step_like = r.score >= alpha;
  return r;
}

struct PrdReport {
  std::optional<int> prd;
  std::vector<double> score_jump;   // quasi-discontinuity score of order j (index j-1)
  std::vector<double> score_slope;  // slope-change score of order j-1, attributed to j
  std::vector<std::vector<double>> derivatives;  // analysis-rate samples of y^(j), index j
  std::vector<double> time;
  double sample_period = 0.0;
};

// Lipschitz bound for the order-j probe on the normalized output
inline double probe_L(const PrdConfig& cfg, int j) {
  if (cfg.diff_L > 0.0) return cfg.diff_L;
  return cfg.kappa * std::tgamma(j + 2.0) / std::pow(cfg.window, j + 1.0);
}

// order-j probe; returns estimates of y^(j-1) and y^(j).
// orders above five cascade a fifth-order stage into a lower-order stage
inline std::pair<std::vector<double>, std::vector<double>> probe_derivative(const std::vector<double>& y, int j,
                                                                           const PrdConfig& cfg) {
  if (j <= 5) {
    DiffConfig dc;
    dc.nd = j;
    dc.L = probe_L(cfg, j);
    auto tr = differentiate_trace(dc, y, cfg.dt);
    return {std::move(tr.z[static_cast<std::size_t>(j - 1)]), std::move(tr.z[static_cast<std::size_t>(j)])};
  }
  auto y5 = probe_derivative(y, 5, cfg).second;
  DiffConfig dc;
  dc.nd = j - 5;
  dc.L = cfg.diff_L > 0.0 ? cfg.diff_L : probe_L(cfg, j) / probe_L(cfg, 5);
  auto tr = differentiate_trace(dc, y5, cfg.dt);
  return {std::move(tr.z[static_cast<std::size_t>(j - 6)]), std::move(tr.z[static_cast<std::size_t>(j - 5)])};
}

inline PrdReport identify_prd_trace(std::vector<double> y, const PrdConfig& cfg) {
  cfg.validate();
  PrdReport rep;
  // normalize by the output magnitude inside the analysis horizon
  const auto horizon = static_cast<std::size_t>(std::lround((cfg.tau + cfg.window) / cfg.dt)) + 1;
  double scale = 0.0;
  for (std::size_t i = 0; i < std::min(horizon, y.size()); ++i) scale = std::max(scale, std::abs(y[i]));
  if (scale > 0.0)
    for (double& v : y) v /= scale;

  const int m = cfg.sample_stride;
  const double ts = cfg.dt * m;
  rep.sample_period = ts;
  for (std::size_t i = 0; i < y.size(); i += static_cast<std::size_t>(m)) rep.time.push_back(static_cast<double>(i) * cfg.dt);
  // block means over the analyzer period suppress the sign chatter of the top estimate
  auto decimate = [&](const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); i += static_cast<std::size_t>(m)) {
      const std::size_t e = std::min(v.size(), i + static_cast<std::size_t>(m));
      double s = 0.0;
      for (std::size_t q = i; q < e; ++q) s += v[q];
      out.push_back(s / static_cast<double>(e - i));
    }
    return out;
  };
  rep.derivatives.push_back(decimate(y));

  for (int j = 1; j <= cfg.max_order; ++j) {
    auto [lower, top] = probe_derivative(y, j, cfg);
    auto zj = decimate(top);
    rep.derivatives.push_back(zj);
    const auto a = performance_analyzer(zj, 0.0, ts, cfg.tau, cfg.window, cfg.alpha);
    // slope change of y^(j-1), taken from the smoother lower state of the same probe
    const auto prev = decimate(lower);
    std::vector<double> slope(prev.size(), 0.0);
    for (std::size_t i = 1; i < prev.size(); ++i) slope[i] = (prev[i] - prev[i - 1]) / ts;
    const auto b = performance_analyzer(slope, 0.0, ts, cfg.tau, cfg.window, cfg.alpha);
    rep.score_jump.push_back(a.score);
    rep.score_slope.push_back(b.score);
    if (a.step_like || b.step_like) {
      rep.prd = j;
      break;
    }
  }
  return rep;
}

inline std::vector<double> simulate_lti_output(const TransferFunction& tf, const PrdConfig& cfg) {
  LtiPlant plant(tf);
  const long n = std::lround(cfg.tau / cfg.dt) + cfg.n_iter;
  Vec x = Vec::Zero(plant.ss.order());
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(n) + 1);
  Vec u(1);
  const auto deriv = [&plant](const Vec& xx, const Vec& uu, double tt) { return plant.deriv(xx, uu, tt); };
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    u[0] = cfg.input_at(t);
    y.push_back(plant.output(x, u[0]));
    x = euler_step(x, deriv, u, t, cfg.dt);
  }
  return y;
}

inline PrdReport identify_prd(const TransferFunction& tf, const PrdConfig& cfg) {
  cfg.validate();
  return identify_prd_trace(simulate_lti_output(tf, cfg), cfg);
}

// benchmark input train applied to lv_prd_bench
inline std::vector<StepTerm> prd_bench_input() { return {{-17.5, 1.0}, {35.0, 1.3}, {-35.0, 1.85}}; }

// stable minimum-phase systems, relative degree cycling 1..5, poles and zeros in [-10, -0.5]
inline std::vector<TransferFunction> random_lti_corpus(std::uint64_t seed, int n) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> root(-10.0, -0.5), gain(0.5, 5.0);
  std::uniform_int_distribution<int> zeros(0, 2), coin(0, 1);
  std::vector<TransferFunction> out;
  for (int i = 0; i < n; ++i) {
    const int r = 1 + i % 5;
    const int nz = zeros(g);
    Poly num{gain(g) * (coin(g) ? 1.0 : -1.0)}, den{1.0};
    for (int k = 0; k < r + nz; ++k) den = poly_mul(den, {1.0, -root(g)});
    for (int k = 0; k < nz; ++k) num = poly_mul(num, {1.0, -root(g)});
    out.push_back({num, den});
  }
  return out;
}

}  // namespace smcaero

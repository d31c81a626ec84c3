#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "config.hpp"
#include "custom.hpp"
#include "diff.hpp"
#include "hosm.hpp"
#include "lv.hpp"
#include "prd.hpp"
#include "pwm.hpp"
#include "rpl.hpp"
#include "sliding.hpp"
#include "smc1.hpp"
#include "smc2.hpp"

namespace smcaero {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

template <class... A>
std::string strf(const char* fmt, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, a...);
  return buf;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- sliding-variable design ----

inline CheckResult check_sigma_design() {
  struct Case {
    double ts, c0, cint;
  };
  const Case cases[] = {{2.0, 7.0, 25.0}, {5.0, 2.8, 4.0}, {8.0, 1.75, 1.5625}};
  CheckResult r{"sigma-design", true, ""};
  for (const auto& c : cases) {
    const auto s = design_coefficients(2, c.ts, true);
    const bool ok = std::abs(s.coeffs.at(0) - c.c0) <= 1e-12 * c.c0 && std::abs(s.c_int - c.cint) <= 1e-12 * c.cint;
    r.pass = r.pass && ok;
    r.detail += strf("ts=%g -> (%.10g, %.10g) ", c.ts, s.coeffs.at(0), s.c_int);
  }
  const double ref = 1.56, got = design_coefficients(2, 8.0, true).c_int;
  const double rel = std::abs(got - ref) / ref;
  r.pass = r.pass && rel <= 0.005;
  r.detail += strf("| vs 1.56: %.3f%%", 100.0 * rel);
  return r;
}

// ---- PRD identification ----

inline CheckResult check_prd_bench() {
  const auto sc = builtin_scenario("prd-bench");
  const auto& s = std::get<PrdScenario>(sc.body);
  const auto rep = identify_prd(s.tf, s.cfg);
  CheckResult r{"prd-benchmark", rep.prd && *rep.prd == 5, ""};
  r.detail = rep.prd ? strf("prd=%d (expected 5)", *rep.prd) : std::string("prd not found (expected 5)");
  return r;
}

inline constexpr std::uint64_t kCorpusSeed = 20240607;

inline CheckResult check_prd_corpus(std::uint64_t seed = kCorpusSeed, int n = 10) {
  const auto corpus = random_lti_corpus(seed, n);
  int agree = 0;
  std::string seen;
  for (const auto& tf : corpus) {
    const auto rep = identify_prd(tf, PrdConfig{});
    const int rd = relative_degree(tf);
    if (rep.prd && *rep.prd == rd) ++agree;
    seen += strf("%d/%d ", rep.prd ? *rep.prd : -1, rd);
  }
  return {"prd-corpus", agree == n, strf("seed=%llu agreement %d/%d (prd/true: ", static_cast<unsigned long long>(seed), agree, n) + seen + ")"};
}

// ---- differentiator ----

struct DiffSinErrors {
  double z1 = 0.0, z2 = 0.0;
};

// steady errors of a k=2 differentiator on sin t over t in [t_lo, t_hi]
inline DiffSinErrors diff_sin_errors(double dt, double L = 1.1, double t_lo = 10.0, double t_hi = 20.0) {
  DiffConfig dc;
  dc.nd = 2;
  dc.L = L;
  const auto n = static_cast<std::size_t>(std::lround(t_hi / dt)) + 1;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(static_cast<double>(i) * dt);
  const auto tr = differentiate_trace(dc, f, dt);
  DiffSinErrors e;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (t < t_lo) continue;
    e.z1 = std::max(e.z1, std::abs(tr.z[1][i] - std::cos(t)));
    e.z2 = std::max(e.z2, std::abs(tr.z[2][i] + std::sin(t)));
  }
  return e;
}

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

inline CheckResult check_differentiator() {
  const auto sc = builtin_scenario("diff-sin");
  const auto& s = std::get<DiffScenario>(sc.body);
  const auto at = diff_sin_errors(s.dt, s.cfg.L);
  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4, 1.25e-4};
  std::vector<double> e1, e2;
  for (double h : dts) {
    const auto e = diff_sin_errors(h, s.cfg.L);
    e1.push_back(e.z1);
    e2.push_back(e.z2);
  }
  const double k = 2.0;
  const double want1 = (k + 1 - 1) / (k + 1), want2 = (k + 1 - 2) / (k + 1);
  const double p1 = loglog_slope(dts, e1), p2 = loglog_slope(dts, e2);
  const bool ok = at.z1 <= 1e-2 && at.z2 <= 1e-1 && p1 >= 0.8 * want1 && p2 >= 0.8 * want2;
  return {"differentiator", ok,
          strf("dt=1e-4: |z1-cos|=%.2e (<=1e-2) |z2+sin|=%.2e (<=1e-1); slopes z1 %.3f (>= %.3f) z2 %.3f (>= %.3f)",
               at.z1, at.z2, p1, 0.8 * want1, p2, 0.8 * want2)};
}

// ---- super-twisting convergence ----

inline CheckResult check_stw_convergence() {
  auto sc = builtin_scenario("stw-sin");
  auto cfg = std::get<CustomConfig>(sc.body);
  cfg.record_stride = 1;
  const auto tr = run_custom(cfg);
  const auto& t = tr.col("t");
  const auto& s = tr.col("sigma");
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= 5.0) worst = std::max(worst, std::abs(s[i]));
  const double bound = 5.0 * cfg.dt;
  return {"stw-convergence", worst <= bound && t.back() >= 20.0 - 1e-9,
          strf("sigma(0)=%.3g, max|sigma| on [5,20] = %.3e (<= %.1e)", s.front(), worst, bound)};
}

// ---- RPL ----

struct RplRun {
  std::string name;
  RplConfig cfg;
  std::optional<RplResult> result;
  std::string error;
  double seconds = 0.0;
};

inline RplRun run_rpl_builtin(const std::string& scenario, int record_stride) {
  RplRun run;
  run.name = scenario;
  run.cfg = std::get<RplConfig>(builtin_scenario(scenario).body);
  run.cfg.record_stride = record_stride;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run.result = run_rpl(run.cfg);
  } catch (const Error& e) {
    run.error = e.what();
  }
  run.seconds = seconds_since(t0);
  return run;
}

struct RplSuite {
  RplRun smc1, pid, stw;
};

inline RplSuite run_rpl_suite(int record_stride = 1) {
  return {run_rpl_builtin("rpl-smc1", record_stride), run_rpl_builtin("rpl-pid", record_stride),
          run_rpl_builtin("rpl-stw", record_stride)};
}

inline bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

// shortest pulse over both channels of a stride-1 RPL trace
inline double rpl_min_pulse(const RplRun& run) {
  const auto& tr = run.result->trace;
  const double dt = run.cfg.dt * run.cfg.record_stride;
  return std::min(min_pulse_width(tr.col("u_a"), dt), min_pulse_width(tr.col("u_d"), dt));
}

inline CheckResult check_rpl(const RplSuite& s) {
  CheckResult r{"rpl", true, ""};
  for (const RplRun* run : {&s.smc1, &s.pid, &s.stw})
    if (!run->result) return {"rpl", false, run->name + " failed: " + run->error};
  const auto& tr = s.smc1.result->trace;
  const double thd = std::abs(tr.col("theta_dot_deg").back());
  const double xd = std::abs(tr.col("x_dot").back());
  const double tend = tr.col("t").back();
  const bool final_ok = thd <= 1.14 && xd <= 0.5 && std::abs(tend - 240.0) < 1e-6;
  r.detail += strf("smc1 t=%.0f |theta_dot|=%.3f deg/s (<=1.14) |x_dot|=%.3f m/s (<=0.5)%s; ", tend, thd, xd,
                   final_ok ? "" : " FAIL");

  double min_pulse = INFINITY;
  bool pulses_ok = true;
  for (const RplRun* run : {&s.smc1, &s.pid, &s.stw}) {
    if (run->cfg.record_stride != 1) {
      pulses_ok = false;
      continue;
    }
    const double w = rpl_min_pulse(*run);
    min_pulse = std::min(min_pulse, w);
    pulses_ok = pulses_ok && w >= 0.05 - 1e-9;
  }
  r.detail += strf("min pulse %.4f s (>=0.05)%s; ", min_pulse, pulses_ok ? "" : " FAIL");

  const bool mono = non_decreasing(tr.col("rho_a")) && non_decreasing(tr.col("rho_d"));
  r.detail += strf("rho monotone %s; ", mono ? "yes" : "NO");

  const auto& a = s.smc1.result->metrics;
  const auto& p = s.pid.result->metrics;
  const auto& w = s.stw.result->metrics;
  const bool o1 = w.J_ea < a.J_ea && a.J_ea < p.J_ea;
  const bool o2 = w.J_ed < a.J_ed && a.J_ed < p.J_ed;
  const bool o3 = a.J_ud < w.J_ud && w.J_ud < p.J_ud;
  r.detail += strf("J_ea stw %.4f < smc1 %.4f < pid %.4f %s; ", w.J_ea, a.J_ea, p.J_ea, o1 ? "ok" : "FAIL");
  r.detail += strf("J_ed stw %.3f < smc1 %.3f < pid %.3f %s; ", w.J_ed, a.J_ed, p.J_ed, o2 ? "ok" : "FAIL");
  r.detail += strf("J_ud smc1 %.2f < stw %.2f < pid %.2f %s; ", a.J_ud, w.J_ud, p.J_ud, o3 ? "ok" : "FAIL");

  const double slowest = std::max({s.smc1.seconds, s.pid.seconds, s.stw.seconds});
  const bool fast = slowest <= 120.0;
  r.detail += strf("slowest run %.2f s (<=120)", slowest);
  r.pass = final_ok && pulses_ok && mono && o1 && o2 && o3 && fast;
  return r;
}

// ---- LV ----

struct LvRun {
  std::string name;
  LvConfig cfg;
  std::optional<LvResult> result;
  std::string error;
  double seconds = 0.0;
};

inline LvRun run_lv_builtin(const std::string& scenario) {
  LvRun run;
  run.name = scenario;
  run.cfg = std::get<LvConfig>(builtin_scenario(scenario).body);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run.result = run_lv(run.cfg);
  } catch (const Error& e) {
    run.error = e.what();
  }
  run.seconds = seconds_since(t0);
  return run;
}

struct LvSuite {
  LvRun pd, smc1, stw;
};

inline LvSuite run_lv_suite() { return {run_lv_builtin("lv-pd"), run_lv_builtin("lv-smc1"), run_lv_builtin("lv-stw")}; }

inline CheckResult check_lv(const LvSuite& s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto je = [&](const LvRun& r) { return r.result ? r.result->metrics.J_e : inf; };
  auto ju = [&](const LvRun& r) { return r.result ? r.result->metrics.J_u : inf; };
  CheckResult r{"lv", true, ""};
  for (const LvRun* run : {&s.pd, &s.smc1, &s.stw})
    if (!run->result) r.detail += run->name + " diverged (" + run->error + "); ";

  const bool je_ok = je(s.smc1) <= 0.005;
  r.detail += strf("smc1 J_e=%.4g deg (<=0.005); ", je(s.smc1));
  const bool o1 = je(s.stw) < je(s.smc1) && je(s.smc1) < je(s.pd);
  const bool o2 = ju(s.smc1) < ju(s.stw) && ju(s.stw) < ju(s.pd);
  r.detail += strf("J_e stw %.4g < smc1 %.4g < pd %.4g %s; ", je(s.stw), je(s.smc1), je(s.pd), o1 ? "ok" : "FAIL");
  r.detail += strf("J_u smc1 %.4g < stw %.4g < pd %.4g %s; ", ju(s.smc1), ju(s.stw), ju(s.pd), o2 ? "ok" : "FAIL");
  const double beta = s.smc1.result ? s.smc1.result->max_abs_beta : inf;
  const bool beta_ok = beta <= 5.0;
  r.detail += strf("smc1 max|beta|=%.3g deg (<=5); ", beta);
  const double slowest = std::max({s.pd.seconds, s.smc1.seconds, s.stw.seconds});
  const bool fast = slowest <= 180.0;
  r.detail += strf("slowest run %.2f s (<=180)", slowest);
  r.pass = s.pd.result && s.smc1.result && s.stw.result && je_ok && o1 && o2 && beta_ok && fast;
  return r;
}

// ---- property suites ----

// degree-0 homogeneity of the quasi-continuous family on random stacks, r = 2..5
inline CheckResult check_qc_homogeneity(int points = 100000, std::uint64_t seed = 11) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), logk(-3.0, 3.0);
  double worst = 0.0;
  for (int n = 0; n < points; ++n) {
    const int r = 2 + n % 4;
    const double kappa = std::pow(10.0, logk(g));
    std::vector<double> d(static_cast<std::size_t>(r)), ds(d.size());
    for (int i = 0; i < r; ++i) {
      const auto k = static_cast<std::size_t>(i);
      d[k] = u(g) * std::pow(10.0, logk(g));
      ds[k] = std::pow(kappa, r - i) * d[k];
    }
    const double a = quasi_continuous(r, d, 1.0), b = quasi_continuous(r, ds, 1.0);
    const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    worst = std::max(worst, std::abs(a - b) / scale);
  }
  return {"qc-homogeneity", worst <= 1e-9, strf("%d points, worst relative deviation %.2e (<=1e-9)", points, worst)};
}

inline CheckResult check_pwm_min_pulse(const RplSuite& s) {
  CheckResult r{"pwm-min-pulse", true, ""};
  for (const RplRun* run : {&s.smc1, &s.pid, &s.stw}) {
    if (!run->result || run->cfg.record_stride != 1) {
      r.pass = false;
      r.detail += run->name + " unavailable; ";
      continue;
    }
    const double w = rpl_min_pulse(*run);
    r.pass = r.pass && w >= run->cfg.pwm_a.hold - 1e-9;
    r.detail += strf("%s %.4f s; ", run->name.c_str(), w);
  }
  r.detail += "(>= hold 0.05 s)";
  return r;
}

// beta = eps_ratio * lambda after every adaptation step
inline CheckResult check_stw_ratio(long steps = 200000, double dt = 1e-4) {
  StwState st;
  st.lambda = 1.5;
  st.eps_ratio = 0.7;
  st.beta = st.eps_ratio * st.lambda;
  st.gamma = 2.0;
  st.mu = 0.01;
  st.lambda_min = 0.2;
  double sigma = 1.0, worst = 0.0;
  for (long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const double v = stw_step(st, sigma, dt);
    stw_adapt(st, sigma, dt);
    worst = std::max(worst, std::abs(st.beta / st.lambda - st.eps_ratio) / st.eps_ratio);
    sigma += dt * (0.8 * std::sin(t) - v);
  }
  return {"stw-ratio", worst <= 4.0 * std::numeric_limits<double>::epsilon(),
          strf("%ld steps, worst relative ratio deviation %.2e", steps, worst)};
}

// double-layer k under a bounded matched disturbance, 10^6 steps
inline CheckResult check_double_layer_bounded(long steps = 1000000, double dt = 1e-4) {
  DoubleLayerState st;
  const double dmax = 0.8;
  const double bound = 2.0 * (dmax / st.alpha + st.eps);
  double sigma = 1.0, v = 0.0, kmax = 0.0;
  bool finite = true;
  Vec s(1), vp(1);
  for (long n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    s << sigma;
    vp << v;
    v = double_layer_step(st, s, vp, dt).v[0];
    sigma += dt * (0.3 + 0.5 * std::sin(t) - v);
    kmax = std::max(kmax, st.k);
    finite = finite && std::isfinite(st.k) && std::isfinite(sigma);
  }
  return {"double-layer-bounded", finite && kmax <= bound,
          strf("%ld steps, max k %.4f (<= %.4f), final r %.3f", steps, kmax, bound, st.r)};
}

// trace of any simulated scenario
inline SimTrace scenario_trace(const ScenarioConfig& c) {
  if (auto* p = std::get_if<RplConfig>(&c.body)) return run_rpl(*p).trace;
  if (auto* p = std::get_if<LvConfig>(&c.body)) return run_lv(*p).trace;
  if (auto* p = std::get_if<CustomConfig>(&c.body)) return run_custom(*p);
  throw ConfigError("scenario '" + c.kind + "' does not produce a simulation trace");
}

// identical scenarios give bit-identical traces, also after a resolved-config round trip
inline CheckResult check_determinism() {
  CheckResult r{"determinism", true, ""};
  for (const char* name : {"rpl-smc1", "rpl-stw", "stw-sin", "lv-pd-unperturbed"}) {
    const auto sc = builtin_scenario(name);
    const auto h1 = scenario_trace(sc).hash();
    const auto h2 = scenario_trace(sc).hash();
    const auto h3 = scenario_trace(parse_config(resolved_json(sc))).hash();
    const bool ok = h1 == h2 && h1 == h3;
    r.pass = r.pass && ok;
    r.detail += strf("%s %s; ", name, ok ? "identical" : "DIFFERS");
  }
  return r;
}

inline CheckResult combine(const std::string& name, const std::vector<CheckResult>& parts) {
  CheckResult r{name, true, ""};
  for (const auto& p : parts) {
    r.pass = r.pass && p.pass;
    r.detail += "[" + p.name + (p.pass ? " ok" : " FAIL") + ": " + p.detail + "] ";
  }
  return r;
}

inline CheckResult check_properties(const RplSuite& rpl) {
  return combine("properties", {check_qc_homogeneity(), check_pwm_min_pulse(rpl), check_stw_ratio(),
                                check_double_layer_bounded(), check_determinism()});
}

}  // namespace smcaero

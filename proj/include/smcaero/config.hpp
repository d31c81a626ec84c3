#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "core.hpp"
#include "custom.hpp"
#include "diff.hpp"
#include "lv.hpp"
#include "prd.hpp"
#include "rpl.hpp"

namespace smcaero {

using json = nlohmann::json;

template <class E>
using NameTable = std::vector<std::pair<std::string, E>>;

// reads fields, remembers which keys were consumed, rejects the rest
class JsonIn {
 public:
  JsonIn(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  template <class T>
  JsonIn& operator()(const char* key, T& out) {
    if (auto it = j_.find(key); it != j_.end()) {
      used_.insert(key);
      read(*it, out, sub(key));
    }
    return *this;
  }

  template <class F>
  JsonIn& obj(const char* key, F&& f) {
    if (auto it = j_.find(key); it != j_.end()) {
      used_.insert(key);
      JsonIn in(*it, sub(key));
      f(in);
      in.finish();
    }
    return *this;
  }

  template <class E>
  JsonIn& choice(const char* key, E& out, const NameTable<E>& names) {
    if (auto it = j_.find(key); it != j_.end()) {
      used_.insert(key);
      if (!it->is_string()) throw ConfigError(sub(key) + " must be a string");
      const auto s = it->get<std::string>();
      for (auto& [n, v] : names)
        if (n == s) {
          out = v;
          return *this;
        }
      std::string allowed;
      for (auto& [n, v] : names) allowed += (allowed.empty() ? "" : ", ") + n;
      throw ConfigError(sub(key) + ": unknown value '" + s + "' (allowed: " + allowed + ")");
    }
    return *this;
  }

  void skip(const char* key) { used_.insert(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError("unknown key '" + sub(it.key()) + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  std::string sub(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  static void read(const json& v, double& out, const std::string& p) {
    if (v.is_null()) {
      out = std::numeric_limits<double>::infinity();  // null = unbounded
      return;
    }
    if (!v.is_number()) throw ConfigError(p + " must be a number");
    out = v.get<double>();
  }
  static void read(const json& v, int& out, const std::string& p) {
    if (!v.is_number_integer()) throw ConfigError(p + " must be an integer");
    out = v.get<int>();
  }
  static void read(const json& v, long& out, const std::string& p) {
    if (!v.is_number_integer()) throw ConfigError(p + " must be an integer");
    out = v.get<long>();
  }
  static void read(const json& v, bool& out, const std::string& p) {
    if (!v.is_boolean()) throw ConfigError(p + " must be true or false");
    out = v.get<bool>();
  }
  static void read(const json& v, std::string& out, const std::string& p) {
    if (!v.is_string()) throw ConfigError(p + " must be a string");
    out = v.get<std::string>();
  }
  static void read(const json& v, std::vector<double>& out, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p + " must be an array of numbers");
    out.clear();
    for (auto& e : v) {
      if (!e.is_number()) throw ConfigError(p + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
  }
  static void read(const json& v, std::vector<StepTerm>& out, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p + " must be an array of [amplitude, tau] pairs");
    out.clear();
    for (auto& e : v) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ConfigError(p + " must be an array of [amplitude, tau] pairs");
      out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
  }
  static void read(const json& v, DeadbandSchedule& out, const std::string& p) {
    if (!v.is_array()) throw ConfigError(p + " must be an array of [t0, t1, delta] triples");
    out.intervals.clear();
    for (auto& e : v) {
      if (!e.is_array() || e.size() != 3) throw ConfigError(p + " must be an array of [t0, t1, delta] triples");
      for (auto& x : e)
        if (!x.is_number()) throw ConfigError(p + " must be an array of [t0, t1, delta] triples");
      out.intervals.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// mirror of JsonIn that writes every field, producing the resolved config
class JsonOut {
 public:
  json j = json::object();

  template <class T>
  JsonOut& operator()(const char* key, T& v) {
    j[key] = write(v);
    return *this;
  }
  template <class F>
  JsonOut& obj(const char* key, F&& f) {
    JsonOut o;
    f(o);
    j[key] = o.j;
    return *this;
  }
  template <class E>
  JsonOut& choice(const char* key, E& v, const NameTable<E>& names) {
    for (auto& [n, e] : names)
      if (e == v) j[key] = n;
    return *this;
  }
  void skip(const char*) {}

 private:
  static json write(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
  static json write(int v) { return v; }
  static json write(long v) { return v; }
  static json write(bool v) { return v; }
  static json write(const std::string& v) { return v; }
  static json write(const std::vector<double>& v) { return v; }
  static json write(const std::vector<StepTerm>& v) {
    json a = json::array();
    for (auto& s : v) a.push_back(json::array({s.amplitude, s.tau}));
    return a;
  }
  static json write(const DeadbandSchedule& s) {
    json a = json::array();
    for (auto& i : s.intervals) a.push_back(json::array({i.t_start, i.t_end, i.delta}));
    return a;
  }
};

// ---- field lists, shared by reading and echoing ----

template <class V>
void stw_fields(V& v, StwState& s) {
  v("lambda", s.lambda)("beta", s.beta)("w", s.w)("gamma", s.gamma)("mu", s.mu)("lambda_min", s.lambda_min)(
      "eps_ratio", s.eps_ratio)("eta", s.eta)("w_max", s.w_max);
}

template <class V>
void tw_fields(V& v, TwState& s) {
  v("alpha1", s.alpha1)("alpha2", s.alpha2)("v_max", s.v_max)("invert", s.invert)("gamma1", s.gamma1)("mu1", s.mu1)(
      "c", s.c)("alpha1_min", s.alpha1_min)("eta1", s.eta1);
}

template <class V>
void pwm_fields(V& v, PwmConfig& p) {
  v("a", p.a)("freq_hz", p.freq_hz)("hold", p.hold)("deadband", p.schedule);
}

inline const NameTable<RplLaw>& rpl_law_names() {
  static const NameTable<RplLaw> n{{"smc1", RplLaw::Smc1}, {"pid", RplLaw::Pid}, {"stw", RplLaw::Stw}};
  return n;
}
inline const NameTable<RplCubic>& rpl_cubic_names() {
  static const NameTable<RplCubic> n{{"rounded", RplCubic::Rounded}, {"soft", RplCubic::Soft}};
  return n;
}
inline const NameTable<LvLaw>& lv_law_names() {
  static const NameTable<LvLaw> n{{"pd", LvLaw::Pd}, {"smc1", LvLaw::Smc1}, {"stw", LvLaw::Stw}};
  return n;
}
inline NameTable<CustomLaw> custom_law_table() {
  NameTable<CustomLaw> t;
  for (auto& p : custom_law_names()) t.push_back(p);
  return t;
}

template <class V>
void rpl_fields(V& v, RplConfig& c) {
  v.choice("controller", c.law, rpl_law_names());
  v("dt", c.dt)("t_end", c.t_end)("record_stride", c.record_stride);
  v("theta0_deg", c.theta0_deg)("theta_dot0_deg", c.theta_dot0_deg)("x0", c.x0)("x_dot0", c.x_dot0);
  v("perturbed", c.perturbed);
  v.choice("cubic", c.cubic, rpl_cubic_names());
  v("ts_att", c.ts_att)("ts_desc", c.ts_desc)("gate_a", c.gate_a)("gate_d", c.gate_d);
  v("gamma_a", c.gamma_a)("gamma_d", c.gamma_d)("rho0_a", c.rho0_a)("rho0_d", c.rho0_d);
  v.obj("stw_a", [&](auto& o) { stw_fields(o, c.stw_a); });
  v.obj("stw_d", [&](auto& o) { stw_fields(o, c.stw_d); });
  v.obj("pid", [&](auto& o) {
    o("kp_a", c.kp_a)("ki_a", c.ki_a)("kd_a", c.kd_a)("kp_d", c.kp_d)("ki_d", c.ki_d)("kd_d", c.kd_d)("degrees",
                                                                                                      c.pid_degrees);
  });
  v("use_pwm", c.use_pwm);
  v.obj("pwm_a", [&](auto& o) { pwm_fields(o, c.pwm_a); });
  v.obj("pwm_d", [&](auto& o) { pwm_fields(o, c.pwm_d); });
  v("diff_derivs", c.diff_derivs)("diff_L_att", c.diff_L_att)("diff_L_desc", c.diff_L_desc);
  v.obj("params", [&](auto& o) {
    auto& p = c.params;
    o("Jyy", p.Jyy)("m", p.m)("la", p.la)("gm", p.gm)("ua_max", p.ua_max)("ud_max", p.ud_max)("b_att", p.b_att);
  });
}

template <class V>
void lv_fields(V& v, LvConfig& c) {
  v.choice("controller", c.law, lv_law_names());
  v("dt", c.dt)("t_end", c.t_end)("record_stride", c.record_stride)("perturbed", c.perturbed);
  v("kp", c.kp)("kd", c.kd)("rho", c.rho)("Lbar", c.Lbar)("eps", c.eps)("ts", c.ts)("gate", c.gate);
  v.obj("stw", [&](auto& o) { stw_fields(o, c.stw); });
  v("model_derivs", c.model_derivs)("diff_L", c.diff_L)("command_scale", c.command_scale);
  v.obj("params", [&](auto& o) {
    auto& p = c.params;
    o("I", p.I)("C_Na", p.C_Na)("q", p.q)("S", p.S)("l_a", p.l_a)("S_n", p.S_n)("V", p.V)("l_g", p.l_g)("R", p.R)(
        "g", p.g)("M", p.M)("I_n", p.I_n)("w_e", p.w_e)("z_e", p.z_e)("tau_a", p.tau_a)("w_b", p.w_b)("z_b", p.z_b)(
        "phi_g", p.phi_g)("psi_g", p.psi_g)("psi_s", p.psi_s);
  });
}

template <class V>
void custom_fields(V& v, CustomConfig& c) {
  v.obj("plant", [&](auto& o) { o("num", c.plant.num)("den", c.plant.den); });
  v.choice("controller", c.law, custom_law_table());
  v("command", c.command)("x0", c.x0);
  v.obj("perturbation", [&](auto& o) { o("bias", c.perturbation.bias)("amp", c.perturbation.amp)("freq", c.perturbation.freq); });
  v("dt", c.dt)("t_end", c.t_end)("record_stride", c.record_stride)("ts", c.ts)("with_integral", c.with_integral);
  v("rho", c.rho)("eps", c.eps)("gamma", c.gamma)("delta", c.delta)("alpha", c.alpha);
  v.obj("stw", [&](auto& o) { stw_fields(o, c.stw); });
  v.obj("tw", [&](auto& o) { tw_fields(o, c.tw); });
  v.obj("double_layer", [&](auto& o) {
    auto& d = c.double_layer;
    o("k", d.k)("eta", d.eta)("eps", d.eps)("alpha", d.alpha)("r0", d.r0)("gamma", d.gamma)("delta0", d.delta0)(
        "tau_f", d.tau_f);
  });
  v.obj("achosm", [&](auto& o) {
    auto& a = c.achosm;
    o("gamma1", a.gamma1)("powers", a.powers)("beta0", a.beta0)("alpha", a.alpha)("eps", a.eps)("gamma", a.gamma)(
        "delta0", a.delta0)("l0", a.l0)("r0", a.r0)("tau_f", a.tau_f);
  });
}

struct PrdScenario {
  std::string model = "lv_prd_bench";  // or "tf" with num/den
  TransferFunction tf = lv_prd_bench();
  PrdConfig cfg = [] {
    PrdConfig c;
    c.input = prd_bench_input();
    return c;
  }();
};

template <class V>
void prd_fields(V& v, PrdScenario& s) {
  v("model", s.model);
  v("num", s.tf.num)("den", s.tf.den);
  auto& c = s.cfg;
  v("alpha", c.alpha)("n_iter", c.n_iter)("tau", c.tau)("dt", c.dt)("max_order", c.max_order)("diff_L", c.diff_L);
  v("window", c.window)("amplitude", c.amplitude)("input", c.input)("sample_stride", c.sample_stride)("kappa", c.kappa);
}

struct DiffScenario {
  DiffConfig cfg;
  double dt = 1e-4;
  double t_end = 20.0;
  std::string signal = "sin";  // built-in test signal when no input file is given
};

template <class V>
void diff_fields(V& v, DiffScenario& s) {
  v("nd", s.cfg.nd)("nf", s.cfg.nf)("L", s.cfg.L)("lambdas", s.cfg.lambdas)("dt", s.dt)("t_end", s.t_end)("signal",
                                                                                                           s.signal);
}

using ScenarioBody = std::variant<RplConfig, LvConfig, CustomConfig, PrdScenario, DiffScenario>;

struct ScenarioConfig {
  std::string kind;
  ScenarioBody body;
};

inline ScenarioConfig parse_config(const json& j) {
  JsonIn in(j, "");
  if (!j.contains("scenario") || !j["scenario"].is_string()) throw ConfigError("missing string key 'scenario'");
  in.skip("scenario");
  ScenarioConfig sc;
  sc.kind = j["scenario"].get<std::string>();
  if (sc.kind == "rpl") {
    RplConfig c;
    rpl_fields(in, c);
    in.finish();
    c.validate();
    sc.body = c;
  } else if (sc.kind == "lv") {
    LvConfig c;
    lv_fields(in, c);
    in.finish();
    c.validate();
    sc.body = c;
  } else if (sc.kind == "custom") {
    CustomConfig c;
    custom_fields(in, c);
    in.finish();
    c.validate();
    sc.body = c;
  } else if (sc.kind == "prd") {
    PrdScenario s;
    prd_fields(in, s);
    in.finish();
    if (s.model == "lv_prd_bench") {
      // the resolved echo carries the benchmark coefficients; anything else needs model = "tf"
      const auto bench = lv_prd_bench();
      if ((j.contains("num") && s.tf.num != bench.num) || (j.contains("den") && s.tf.den != bench.den))
        throw ConfigError("num/den require model = \"tf\"");
      s.tf = bench;
    } else if (s.model != "tf") {
      throw ConfigError("model: unknown value '" + s.model + "' (allowed: lv_prd_bench, tf)");
    }
    s.tf.validate();
    s.cfg.validate();
    sc.body = s;
  } else if (sc.kind == "diff") {
    DiffScenario s;
    diff_fields(in, s);
    in.finish();
    s.cfg.validate();
    if (!(s.dt > 0.0 && s.t_end > 0.0)) throw ConfigError("dt and t_end must be positive");
    if (s.signal != "sin") throw ConfigError("signal: unknown value '" + s.signal + "' (allowed: sin)");
    sc.body = s;
  } else {
    throw ConfigError("scenario: unknown value '" + sc.kind + "' (allowed: rpl, lv, custom, prd, diff)");
  }
  return sc;
}

inline json resolved_json(ScenarioConfig sc) {
  JsonOut out;
  std::visit(
      [&](auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RplConfig>) rpl_fields(out, c);
        if constexpr (std::is_same_v<T, LvConfig>) lv_fields(out, c);
        if constexpr (std::is_same_v<T, CustomConfig>) custom_fields(out, c);
        if constexpr (std::is_same_v<T, PrdScenario>) prd_fields(out, c);
        if constexpr (std::is_same_v<T, DiffScenario>) diff_fields(out, c);
      },
      sc.body);
  json j = out.j;
  j["scenario"] = sc.kind;
  return j;
}

inline json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(parse_json_text(ss.str(), path));
}

// named scenarios runnable without any file
inline const std::map<std::string, json>& builtin_scenarios() {
  static const std::map<std::string, json> m{
      {"rpl-smc1", {{"scenario", "rpl"}, {"controller", "smc1"}}},
      {"rpl-pid", {{"scenario", "rpl"}, {"controller", "pid"}}},
      {"rpl-stw", {{"scenario", "rpl"}, {"controller", "stw"}}},
      {"lv-pd", {{"scenario", "lv"}, {"controller", "pd"}}},
      {"lv-pd-unperturbed", {{"scenario", "lv"}, {"controller", "pd"}, {"perturbed", false}}},
      {"lv-smc1", {{"scenario", "lv"}, {"controller", "smc1"}}},
      {"lv-stw", {{"scenario", "lv"}, {"controller", "stw"}}},
      {"prd-bench", {{"scenario", "prd"}}},
      {"diff-sin", {{"scenario", "diff"}, {"nd", 2}, {"L", 1.1}, {"dt", 1e-4}, {"t_end", 20.0}}},
      {"stw-sin",
       {{"scenario", "custom"},
        {"plant", {{"num", {1.0}}, {"den", {1.0, 0.0}}}},
        {"controller", "stw"},
        {"x0", {-1.0}},
        {"perturbation", {{"amp", -0.8}, {"freq", 1.0}}},
        {"stw", {{"lambda", 1.5}, {"beta", 1.1}}},
        {"dt", 1e-4},
        {"t_end", 20.0}}},
  };
  return m;
}

inline ScenarioConfig builtin_scenario(const std::string& name) {
  const auto& m = builtin_scenarios();
  auto it = m.find(name);
  if (it == m.end()) {
    std::string names;
    for (auto& [k, v] : m) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError("unknown scenario '" + name + "' (available: " + names + ")");
  }
  return parse_config(it->second);
}

}  // namespace smcaero

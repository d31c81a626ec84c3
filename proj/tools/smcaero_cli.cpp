#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <smcaero/checks.hpp>
#include <smcaero/config.hpp>

namespace fs = std::filesystem;
using namespace smcaero;

namespace {

enum Exit { kOk = 0, kConfig = 1, kDiverged = 2, kCheckFailed = 3 };

int fail(int code, const std::string& kind, const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::cerr << json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump() << "\n";
  return code;
}

void write_json(const fs::path& p, const json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << j.dump(2) << "\n";
}

void write_trace(const fs::path& p, const SimTrace& tr) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  tr.write_csv(f);
}

struct RunArgs {
  std::string kind;
  std::string controller;
  bool perturbed = false, unperturbed = false;
  std::string config, scenario;
  double dt = 0.0, tend = 0.0;
  std::string out, metrics, out_dir = "out";
  bool check = false;
};

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_json_text(ss.str(), path);
}

// config source, then command-line overrides, then schema validation
ScenarioConfig resolve_run_config(const RunArgs& a) {
  json j;
  if (!a.scenario.empty() && !a.config.empty()) throw ConfigError("--scenario and --config are exclusive");
  if (!a.scenario.empty()) {
    const auto& m = builtin_scenarios();
    auto it = m.find(a.scenario);
    if (it == m.end()) builtin_scenario(a.scenario);  // throws with the list of names
    j = it->second;
  } else if (!a.config.empty()) {
    j = load_json_file(a.config);
  } else {
    j = {{"scenario", a.kind}};
  }
  if (!j.contains("scenario")) j["scenario"] = a.kind;
  if (j["scenario"] != a.kind)
    throw ConfigError("scenario kind '" + j["scenario"].get<std::string>() + "' does not match 'run " + a.kind + "'");
  if (!a.controller.empty()) j["controller"] = a.controller;
  if (a.perturbed && a.unperturbed) throw ConfigError("--perturbed and --unperturbed are exclusive");
  if (a.perturbed || a.unperturbed) {
    if (a.kind == "custom") throw ConfigError("custom scenarios set the perturbation explicitly");
    j["perturbed"] = a.perturbed;
  }
  if (a.dt > 0.0) j["dt"] = a.dt;
  if (a.tend > 0.0) j["t_end"] = a.tend;
  return parse_config(j);
}

std::vector<CheckResult> run_checks(const ScenarioConfig& sc, const SimTrace& tr) {
  std::vector<CheckResult> out;
  const auto& t = tr.col("t");
  const double h = t.size() > 1 ? t[1] - t[0] : 0.0;
  if (auto* c = std::get_if<RplConfig>(&sc.body)) {
    const double thd = std::abs(tr.col("theta_dot_deg").back()), xd = std::abs(tr.col("x_dot").back());
    out.push_back({"final-rates", thd <= 1.14 && xd <= 0.5, strf("|theta_dot|=%.3f deg/s |x_dot|=%.3f m/s", thd, xd)});
    const double w = std::min(min_pulse_width(tr.col("u_a"), h), min_pulse_width(tr.col("u_d"), h));
    out.push_back({"min-pulse", w >= c->pwm_a.hold - 1e-9, strf("%.4f s (hold %.3f s)", w, c->pwm_a.hold)});
    if (c->law == RplLaw::Smc1) {
      const bool mono = non_decreasing(tr.col("rho_a")) && non_decreasing(tr.col("rho_d"));
      out.push_back({"gain-monotone", mono, mono ? "rho_a, rho_d non-decreasing" : "rho decreased"});
    }
  } else if (auto* c = std::get_if<LvConfig>(&sc.body)) {
    double beta = 0.0;
    for (double b : tr.col("beta")) beta = std::max(beta, std::abs(b));
    out.push_back({"gimbal", beta <= 5.0, strf("max|beta| = %.3f deg", beta)});
    if (c->law == LvLaw::Smc1) {
      const auto m = lv_metrics(tr);
      out.push_back({"tracking", m.J_e <= 0.005, strf("J_e = %.4g deg", m.J_e)});
    }
  } else if (auto* c = std::get_if<CustomConfig>(&sc.body)) {
    // HOSM laws act on the output error itself, the others on sigma
    const bool hosm = c->law == CustomLaw::QcHosm || c->law == CustomLaw::NestedHosm || c->law == CustomLaw::Achosm;
    const char* name = hosm ? "e" : "sigma";
    const auto& s = tr.col(name);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= t.front() + 0.75 * (t.back() - t.front())) worst = std::max(worst, std::abs(s[i]));
    out.push_back({"sliding", worst <= 5.0 * c->dt, strf("max|%s| over last quarter = %.3e (<= 5 dt)", name, worst)});
  }
  return out;
}

int cmd_run(const RunArgs& a) {
  const auto sc = resolve_run_config(a);
  const fs::path dir = a.out_dir;
  write_json(dir / "resolved_config.json", resolved_json(sc));
  json metrics;
  SimTrace tr;
  const auto t0 = std::chrono::steady_clock::now();
  if (auto* c = std::get_if<RplConfig>(&sc.body)) {
    auto r = run_rpl(*c);
    metrics = {{"J_ea", r.metrics.J_ea}, {"J_ed", r.metrics.J_ed}, {"J_ua", r.metrics.J_ua},
               {"J_ud", r.metrics.J_ud}, {"saturation_events", r.saturation_events}};
    tr = std::move(r.trace);
  } else if (auto* c = std::get_if<LvConfig>(&sc.body)) {
    auto r = run_lv(*c);
    metrics = {{"J_e", r.metrics.J_e}, {"J_u", r.metrics.J_u}, {"max_abs_beta", r.max_abs_beta}};
    tr = std::move(r.trace);
  } else {
    tr = run_custom(std::get<CustomConfig>(sc.body));
    const auto& t = tr.col("t");
    const double h = t[1] - t[0], T = t.back() - t.front();
    double je = 0.0, ju = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      je += std::abs(tr.col("e")[i]) * h / T;
      ju += std::abs(tr.col("u")[i]) * h / T;
    }
    metrics = {{"J_e", je}, {"J_u", ju}};
  }
  metrics["runtime_s"] = seconds_since(t0);
  metrics["scenario"] = sc.kind;
  metrics["trace_hash"] = std::to_string(tr.hash());

  int code = kOk;
  if (a.check) {
    json checks = json::array();
    for (const auto& c : run_checks(sc, tr)) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
      if (!c.pass) code = kCheckFailed;
    }
    metrics["checks"] = checks;
  }
  write_trace(a.out.empty() ? dir / "trace.csv" : fs::path(a.out), tr);
  write_json(a.metrics.empty() ? dir / "metrics.json" : fs::path(a.metrics), metrics);
  if (code == kCheckFailed) std::cerr << json{{"error", "check"}, {"message", "acceptance check failed"}}.dump() << "\n";
  return code;
}

json prd_report_json(const PrdReport& r) {
  json j{{"prd", r.prd ? json(*r.prd) : json(nullptr)}, {"score_jump", r.score_jump}, {"score_slope", r.score_slope}};
  return j;
}

struct PrdArgs {
  std::string model = "lv_prd_bench", config;
  std::vector<double> num, den;
  double alpha = -1.0, tau = -1.0, dt = -1.0, window = -1.0;
  int max_order = -1, corpus = 0;
  std::uint64_t seed = kCorpusSeed;
  std::string out;
};

int cmd_prd(const PrdArgs& a) {
  json out;
  if (a.corpus > 0) {
    PrdConfig cfg;
    if (a.alpha > 0) cfg.alpha = a.alpha;
    cfg.validate();
    int agree = 0;
    json systems = json::array();
    for (const auto& tf : random_lti_corpus(a.seed, a.corpus)) {
      const auto rep = identify_prd(tf, cfg);
      const int rd = relative_degree(tf);
      agree += rep.prd && *rep.prd == rd;
      systems.push_back({{"num", tf.num}, {"den", tf.den}, {"relative_degree", rd}, {"prd", rep.prd ? json(*rep.prd) : json(nullptr)}});
    }
    out = {{"seed", a.seed}, {"agreement", agree}, {"count", a.corpus}, {"systems", systems}};
  } else {
    json j = a.config.empty() ? json{{"scenario", "prd"}} : load_json_file(a.config);
    if (!a.config.empty() && j.value("scenario", "prd") != "prd") throw ConfigError("config is not a prd scenario");
    j["scenario"] = "prd";
    if (!a.num.empty() || !a.den.empty()) {
      j["model"] = "tf";
      j["num"] = a.num;
      j["den"] = a.den;
    } else if (a.config.empty()) {
      j["model"] = a.model;
    }
    if (a.alpha >= 0) j["alpha"] = a.alpha;
    if (a.tau >= 0) j["tau"] = a.tau;
    if (a.dt >= 0) j["dt"] = a.dt;
    if (a.window >= 0) j["window"] = a.window;
    if (a.max_order >= 0) j["max_order"] = a.max_order;
    const auto sc = parse_config(j);
    const auto& s = std::get<PrdScenario>(sc.body);
    out = prd_report_json(identify_prd(s.tf, s.cfg));
    out["relative_degree"] = relative_degree(s.tf);
    out["config"] = resolved_json(sc);
  }
  if (a.out.empty())
    std::cout << out.dump(2) << "\n";
  else
    write_json(a.out, out);
  return kOk;
}

// one numeric column out of a CSV, header optional
std::vector<double> read_column(const std::string& path, const std::string& column) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open input '" + path + "'");
  std::string line;
  std::vector<double> out;
  long col = -1;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (first) {
      first = false;
      char* end = nullptr;
      std::strtod(cells[0].c_str(), &end);
      const bool header = end == cells[0].c_str();
      if (header) {
        for (std::size_t i = 0; i < cells.size(); ++i)
          if (cells[i] == column) col = static_cast<long>(i);
        if (column.empty()) col = static_cast<long>(cells.size()) - 1;
        if (col < 0) throw ConfigError("input has no column '" + column + "'");
        continue;
      }
      if (!column.empty()) throw ConfigError("input has no header, cannot select column '" + column + "'");
      col = static_cast<long>(cells.size()) - 1;
    }
    if (col >= static_cast<long>(cells.size())) throw ConfigError("short row in '" + path + "'");
    try {
      out.push_back(std::stod(cells[static_cast<std::size_t>(col)]));
    } catch (const std::exception&) {
      throw ConfigError("non-numeric value '" + cells[static_cast<std::size_t>(col)] + "' in '" + path + "'");
    }
  }
  if (out.empty()) throw ConfigError("input '" + path + "' has no samples");
  return out;
}

struct DiffArgs {
  int order = 2, filter = 0;
  double L = 1.0, dt = 0.0;
  std::string input, column, out;
};

int cmd_diff(const DiffArgs& a) {
  DiffConfig dc;
  dc.nd = a.order;
  dc.nf = a.filter;
  dc.L = a.L;
  dc.validate();
  if (!(a.dt > 0.0)) throw ConfigError("--dt must be positive");
  const auto f = read_column(a.input, a.column);
  const auto tr = differentiate_trace(dc, f, a.dt);
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw ConfigError("cannot write '" + a.out + "'");
  }
  std::ostream& os = a.out.empty() ? std::cout : file;
  os << "t";
  for (int i = 0; i <= dc.nd; ++i) os << ",z" << i;
  os << ",residual\n" << std::setprecision(17);
  for (std::size_t n = 0; n < f.size(); ++n) {
    os << static_cast<double>(n) * a.dt;
    for (int i = 0; i <= dc.nd; ++i) os << ',' << tr.z[static_cast<std::size_t>(i)][n];
    os << ',' << tr.residual[n] << '\n';
  }
  if (tr.converged_time >= 0.0)
    std::cerr << "converged at t=" << tr.converged_time << "\n";
  else
    std::cerr << "residual did not settle inside the band " << convergence_band(dc, a.dt) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sliding-mode control toolkit: simulations, sliding-variable design, PRD identification, differentiators"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "simulate a scenario (rpl | lv | custom)");
  run->add_option("kind", ra.kind, "scenario kind")->required()->check(CLI::IsMember({"rpl", "lv", "custom"}));
  run->add_option("--controller", ra.controller, "control law name");
  run->add_flag("--perturbed", ra.perturbed, "apply the scenario perturbation");
  run->add_flag("--unperturbed", ra.unperturbed, "drop the scenario perturbation");
  run->add_option("--config", ra.config, "JSON scenario file");
  run->add_option("--scenario", ra.scenario, "built-in scenario name");
  run->add_option("--dt", ra.dt, "integration step override");
  run->add_option("--tend", ra.tend, "final time override");
  run->add_option("--out", ra.out, "trace CSV path (default <out-dir>/trace.csv)");
  run->add_option("--metrics", ra.metrics, "metrics JSON path (default <out-dir>/metrics.json)");
  run->add_option("--out-dir", ra.out_dir, "directory for the resolved config and default outputs")->capture_default_str();
  run->add_flag("--check", ra.check, "evaluate the scenario checks, exit 3 on failure");

  PrdArgs pa;
  auto* prd = app.add_subcommand("prd-id", "identify the practical relative degree of an LTI model");
  prd->add_option("--model", pa.model, "named model")->check(CLI::IsMember({"lv_prd_bench"}))->capture_default_str();
  prd->add_option("--num", pa.num, "numerator coefficients, highest power first");
  prd->add_option("--den", pa.den, "denominator coefficients, highest power first");
  prd->add_option("--config", pa.config, "JSON prd scenario file");
  prd->add_option("--alpha", pa.alpha, "steepness threshold in (0,1)");
  prd->add_option("--tau", pa.tau, "input application time");
  prd->add_option("--dt", pa.dt, "integration step");
  prd->add_option("--window", pa.window, "analysis half-window");
  prd->add_option("--max-order", pa.max_order, "highest derivative probed");
  prd->add_option("--corpus", pa.corpus, "run a random corpus of N systems instead");
  prd->add_option("--seed", pa.seed, "corpus seed")->capture_default_str();
  prd->add_option("--out", pa.out, "report path (default stdout)");

  int r = 2;
  double ts = 0.0;
  bool no_integral = false;
  auto* ds = app.add_subcommand("design-sigma", "ITAE sliding-variable coefficients");
  ds->add_option("--r", r, "relative degree 2..5")->required();
  ds->add_option("--ts", ts, "settling time")->required();
  ds->add_flag("--no-integral", no_integral, "omit the integral term");

  DiffArgs da;
  auto* df = app.add_subcommand("diff", "run a HOSM differentiator over a sampled signal");
  df->add_option("--order", da.order, "differentiation order")->capture_default_str();
  df->add_option("--filter", da.filter, "filtering order")->capture_default_str();
  df->add_option("--L", da.L, "Lipschitz bound")->capture_default_str();
  df->add_option("--dt", da.dt, "sample period")->required();
  df->add_option("--column", da.column, "input column name (default last column)");
  df->add_option("--out", da.out, "output CSV (default stdout)");
  df->add_option("input", da.input, "input CSV")->required();

  auto* ls = app.add_subcommand("scenarios", "list the built-in scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kConfig, "usage", e.what());
  }

  try {
    if (*run) return cmd_run(ra);
    if (*prd) return cmd_prd(pa);
    if (*ds) {
      const auto s = design_coefficients(r, ts, !no_integral);
      json j{{"c", s.coeffs}};
      if (!no_integral) j["c_int"] = s.c_int;
      std::cout << j.dump() << "\n";
      return kOk;
    }
    if (*df) return cmd_diff(da);
    if (*ls) {
      for (const auto& [name, j] : builtin_scenarios()) std::cout << name << "  " << j.dump() << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const DivergedError& e) {
    return fail(kDiverged, "diverged", e.what());
  } catch (const AllocationError& e) {
    return fail(kDiverged, "diverged", e.what());
  } catch (const std::exception& e) {
    return fail(kConfig, "error", e.what());
  }
  return kOk;
}

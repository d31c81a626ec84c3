#include <gtest/gtest.h>

#include <cmath>

#include <smcaero/rpl.hpp>

using namespace smcaero;

namespace {
double horner(std::initializer_list<double> c, double t) {
  double v = 0.0;
  for (double x : c) v = v * t + x;
  return v;
}
}  // namespace

TEST(RplCommands, RoundedCubic) {
  for (double t : {0.0, 37.0, 120.0, 240.0}) {
    const auto c = rpl_commands(t);
    EXPECT_NEAR(c.x, horner({6.9e-4, -0.23, -10.0, 6000.0}, t), 1e-9);
    EXPECT_NEAR(c.xd, horner({3 * 6.9e-4, -0.46, -10.0}, t), 1e-12);
    EXPECT_NEAR(c.xdd, horner({6 * 6.9e-4, -0.46}, t), 1e-12);
    EXPECT_DOUBLE_EQ(c.th, kPi / 2.0);
    EXPECT_EQ(c.thd, 0.0);
  }
  EXPECT_NEAR(rpl_commands(240.0).x, -109.44, 1e-9);
  EXPECT_NEAR(rpl_commands(240.0).xd, -1.168, 1e-9);
}

TEST(RplCommands, SoftCubicLandsAtRest) {
  const auto c = rpl_commands(240.0, RplCubic::Soft);
  EXPECT_NEAR(c.x, 0.0, 1e-9);
  EXPECT_NEAR(c.xd, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(rpl_commands(0.0, RplCubic::Soft).x, 6000.0);
  EXPECT_DOUBLE_EQ(rpl_commands(0.0, RplCubic::Soft).xd, -10.0);
}

TEST(RplModel, DynamicsHandEvaluation) {
  Vec s(4), u(2);
  s << kPi / 6.0, 0.1, 5000.0, -3.0;
  u << 10.0, 2000.0;
  const Vec d = rpl_dynamics(s, u, 0.01, 0.2);
  EXPECT_DOUBLE_EQ(d[0], 0.1);
  EXPECT_NEAR(d[1], 9.3e-3 * 10.0 + 0.01, 1e-15);
  EXPECT_DOUBLE_EQ(d[2], -3.0);
  EXPECT_NEAR(d[3], 0.5 * 2010.0 / 1000.0 - 1.6 + 0.2, 1e-12);
  EXPECT_NEAR(rpl_phi_a(2.5), 0.06 * std::sin(0.5), 1e-15);
  EXPECT_NEAR(rpl_phi_d(2.5), 0.5 * std::sin(0.5), 1e-15);
}

TEST(RplModel, AllocationAndSaturation) {
  auto a = allocate_controls(0.1, 2.0, kPi / 2.0);
  EXPECT_NEAR(a.ua, 10.75, 1e-12);
  EXPECT_NEAR(a.ud, -10.75 + 2000.0, 1e-9);
  EXPECT_FALSE(a.saturated);
  a = allocate_controls(1.0, 5.0, kPi / 2.0);
  EXPECT_EQ(a.ua, 15.0);
  EXPECT_EQ(a.ud, 2800.0);
  EXPECT_TRUE(a.saturated);
  a = allocate_controls(0.0, -1.0, kPi / 2.0);
  EXPECT_EQ(a.ud, 0.0);  // thrusters only push
  EXPECT_THROW(allocate_controls(0.0, 1.0, 0.05), AllocationError);
  EXPECT_THROW(allocate_controls(0.0, 1.0, kPi - 0.05), AllocationError);
}

namespace {
RplConfig short_run(RplLaw law) {
  RplConfig c;
  c.law = law;
  c.t_end = 30.0;
  c.record_stride = 1;
  return c;
}
}  // namespace

TEST(RplRun, AdaptiveRelayPulsesAndGains) {
  const auto r = run_rpl(short_run(RplLaw::Smc1));
  const auto& tr = r.trace;
  EXPECT_GE(min_pulse_width(tr.col("u_a"), 1e-3), 0.05 - 1e-9);
  EXPECT_GE(min_pulse_width(tr.col("u_d"), 1e-3), 0.05 - 1e-9);
  const auto& ra = tr.col("rho_a");
  const auto& rd = tr.col("rho_d");
  for (std::size_t i = 1; i < ra.size(); ++i) {
    ASSERT_GE(ra[i], ra[i - 1]);
    ASSERT_GE(rd[i], rd[i - 1]);
  }
  EXPECT_GT(ra.back(), ra.front());
  for (double u : tr.col("u_a")) ASSERT_LE(std::abs(u), 15.0);
  for (double u : tr.col("u_d")) ASSERT_TRUE(u >= 0.0 && u <= 2800.0);
}

TEST(RplRun, AttitudeHeldNearVertical) {
  RplConfig c;
  c.t_end = 240.0;
  const auto r = run_rpl(c);
  const auto& th = r.trace.col("theta_deg");
  for (std::size_t i = r.trace.rows() / 4; i < th.size(); ++i) ASSERT_NEAR(th[i], 90.0, 2.0);
  EXPECT_LE(std::abs(r.trace.col("theta_dot_deg").back()), 1.14);
}

TEST(RplRun, AllControllersRunAndMetricsPositive) {
  for (RplLaw law : {RplLaw::Smc1, RplLaw::Pid, RplLaw::Stw}) {
    const auto r = run_rpl(short_run(law));
    EXPECT_TRUE(r.trace.all_finite());
    EXPECT_GT(r.metrics.J_ea, 0.0);
    EXPECT_GE(r.metrics.J_ud, 0.0);
  }
}

TEST(RplRun, StwGainRatioMaintained) {
  const auto r = run_rpl(short_run(RplLaw::Stw));
  const auto& l = r.trace.col("lambda_a");
  const auto& b = r.trace.col("beta_a");
  for (std::size_t i = 0; i < l.size(); ++i) ASSERT_NEAR(b[i], 0.1 * l[i], 1e-15 * l[i]);
}

TEST(RplRun, Deterministic) {
  RplConfig c;
  c.t_end = 20.0;
  EXPECT_EQ(run_rpl(c).trace.hash(), run_rpl(c).trace.hash());
}

TEST(RplRun, MetricsAreTimeAverages) {
  SimTrace tr({"t", "e_a_deg", "e_d", "u_a", "u_d"});
  for (int i = 0; i <= 4; ++i) tr.append({i * 0.5, 1.0, -2.0, 3.0 * i, 0.0});
  const auto m = rpl_metrics(tr);
  EXPECT_DOUBLE_EQ(m.J_ea, 1.0);
  EXPECT_DOUBLE_EQ(m.J_ed, 2.0);
  EXPECT_DOUBLE_EQ(m.J_ua, (0.0 + 3.0 + 6.0 + 9.0) * 0.5 / 2.0);
}

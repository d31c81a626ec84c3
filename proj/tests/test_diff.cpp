#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <smcaero/checks.hpp>
#include <smcaero/diff.hpp>

using namespace smcaero;

namespace {
std::vector<double> sample(double dt, double t_end, double (*f)(double)) {
  const auto n = static_cast<std::size_t>(std::lround(t_end / dt)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(static_cast<double>(i) * dt);
  return v;
}
}  // namespace

TEST(Differentiator, CoefficientTables) {
  EXPECT_EQ(coefficient_table(2), (std::vector<double>{1.1, 2.12, 3.0}));
  EXPECT_EQ(coefficient_table(5), (std::vector<double>{1.1, 6.75, 20.26, 32.24, 23.72, 7.0}));
  EXPECT_EQ(coefficient_table(1), (std::vector<double>{1.1, 1.5}));
  EXPECT_THROW(coefficient_table(6), ConfigError);
  EXPECT_THROW(coefficient_table(0), ConfigError);
}

TEST(Differentiator, ConfigValidation) {
  EXPECT_THROW((DiffConfig{0, 0, 1.0, {}}.validate()), ConfigError);
  EXPECT_THROW((DiffConfig{4, 2, 1.0, {}}.validate()), ConfigError);
  EXPECT_THROW((DiffConfig{2, 0, 0.0, {}}.validate()), ConfigError);
  EXPECT_THROW((DiffConfig{2, 0, 1.0, {1.0, 2.0}}.validate()), ConfigError);
  EXPECT_THROW((DiffConfig{2, 0, 1.0, {1.0, -2.0, 3.0}}.validate()), ConfigError);
}

TEST(Differentiator, ZeroSignalStaysAtOrigin) {
  for (int nf : {0, 2}) {
    DiffConfig c{2, nf, 3.0, {}};
    DiffState st = DiffState::zeros(c);
    for (int i = 0; i < 1000; ++i) st = diff_step(c, st, 0.0, 1e-3);
    for (double z : st.z) EXPECT_EQ(z, 0.0);
    for (double w : st.w) EXPECT_EQ(w, 0.0);
  }
}

TEST(Differentiator, FirstStepMatchesHandEvaluation) {
  // z0' = -3 L^(1/3) |z0 - f|^(2/3) sign + z1, z1' = -2.12 L^(2/3) |.|^(1/3) sign + z2, z2' = -1.1 L sign
  DiffConfig c{2, 0, 8.0, {}};
  const DiffState st = diff_step(c, DiffState::zeros(c), -1.0, 0.1);
  EXPECT_NEAR(st.z[0], -0.1 * 3.0 * 2.0, 1e-15);
  EXPECT_NEAR(st.z[1], -0.1 * 2.12 * 4.0, 1e-15);
  EXPECT_NEAR(st.z[2], -0.1 * 1.1 * 8.0, 1e-15);
}

TEST(Differentiator, ParabolaSecondDerivativeExact) {
  const double dt = 1e-3, L = 1.0;
  const auto f = sample(dt, 20.0, [](double t) { return 0.5 * t * t; });
  const auto tr = differentiate_trace(DiffConfig{2, 0, L, {}}, f, dt);
  for (std::size_t i = 10000; i < f.size(); ++i) ASSERT_NEAR(tr.z[2][i], 1.0, 5.0 * L * dt) << "i=" << i;
}

TEST(Differentiator, SineTrackedAfterTransient) {
  const double dt = 1e-4;
  const auto f = sample(dt, 15.0, [](double t) { return std::sin(t); });
  const auto tr = differentiate_trace(DiffConfig{2, 0, 1.1, {}}, f, dt);
  for (std::size_t i = 80000; i < f.size(); ++i) ASSERT_NEAR(tr.z[1][i], std::cos(static_cast<double>(i) * dt), 1e-2);
}

TEST(Differentiator, ConstantSignal) {
  const double dt = 1e-3;
  const auto f = sample(dt, 10.0, [](double) { return 2.5; });
  const auto tr = differentiate_trace(DiffConfig{2, 0, 1.0, {}}, f, dt);
  EXPECT_NEAR(tr.z[0].back(), 2.5, 1e-6);
  EXPECT_NEAR(tr.z[1].back(), 0.0, 1e-3);
  EXPECT_NEAR(tr.z[2].back(), 0.0, 1e-2);
}

TEST(Differentiator, ErrorsShrinkWithStep) {
  const std::vector<double> dts{1e-3, 5e-4, 2.5e-4, 1.25e-4};
  std::vector<double> e1, e2;
  for (double h : dts) {
    const auto e = diff_sin_errors(h);
    e1.push_back(e.z1);
    e2.push_back(e.z2);
  }
  EXPECT_GE(loglog_slope(dts, e1), 0.8 * 2.0 / 3.0);
  EXPECT_GE(loglog_slope(dts, e2), 0.8 * 1.0 / 3.0);
}

TEST(Differentiator, AmplitudeAndLScaleTogether) {
  // f -> k f with L -> k L maps every estimate z_i -> k z_i
  const double dt = 1e-4, k = 100.0;
  const auto f = sample(dt, 5.0, [](double t) { return std::sin(t); });
  std::vector<double> fk(f);
  for (double& v : fk) v *= k;
  const auto a = differentiate_trace(DiffConfig{2, 0, 1.0, {}}, f, dt);
  const auto b = differentiate_trace(DiffConfig{2, 0, k, {}}, fk, dt);
  for (std::size_t i = 0; i < f.size(); i += 97)
    for (int j = 0; j <= 2; ++j) {
      const double za = a.z[static_cast<std::size_t>(j)][i], zb = b.z[static_cast<std::size_t>(j)][i];
      ASSERT_NEAR(zb, k * za, 1e-9 * (std::abs(k * za) + 1e-6));
    }
}

namespace {
double noisy_rms(int nf, double eps, std::uint64_t seed) {
  const double dt = 1e-4;
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto n = static_cast<std::size_t>(20.0 / dt) + 1;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(static_cast<double>(i) * dt) + eps * u(g);
  const auto tr = differentiate_trace(DiffConfig{2, nf, 1.1, {}}, f, dt);
  double s = 0.0;
  std::size_t m = 0;
  for (std::size_t i = n / 2; i < n; ++i, ++m) {
    const double e = tr.z[1][i] - std::cos(static_cast<double>(i) * dt);
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(m));
}
}  // namespace

TEST(Differentiator, NoiseErrorGrowsSublinearly) {
  const double e4 = noisy_rms(0, 1e-4, 3), e3 = noisy_rms(0, 1e-3, 3), e2 = noisy_rms(0, 1e-2, 3);
  EXPECT_LT(e3 / e4, 10.0);
  EXPECT_LT(e2 / e3, 10.0);
  EXPECT_GT(e2, e3);
}

TEST(Differentiator, FilteringBeatsPlainOnNoise) {
  EXPECT_LT(noisy_rms(2, 1e-2, 9), noisy_rms(0, 1e-2, 9));
}

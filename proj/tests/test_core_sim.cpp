#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <smcaero/core.hpp>
#include <smcaero/lti.hpp>
#include <smcaero/sim.hpp>

using namespace smcaero;

namespace {

FunctionPlant decay_plant(double a) {
  return {[a](const Vec& x, const Vec& u, double) { return Vec(-a * x + u); }, {"x"}};
}

FunctionController zero_controller() {
  return {[](double, const Vec&, double) { return Vec::Zero(1); }, {"u"}, {}};
}

}  // namespace

TEST(Core, SignAndSignedPower) {
  EXPECT_EQ(sgn(2.5), 1.0);
  EXPECT_EQ(sgn(-0.1), -1.0);
  EXPECT_EQ(sgn(0.0), 0.0);
  EXPECT_DOUBLE_EQ(spow(-4.0, 0.5), -2.0);
  EXPECT_DOUBLE_EQ(spow(8.0, 1.0 / 3.0), 2.0);
  EXPECT_EQ(spow(0.0, 0.5), 0.0);
}

TEST(Sim, EulerMatchesClosedFormRecursion) {
  // x_{k+1} = (1 - a h) x_k exactly
  const double a = 2.0, h = 1e-3;
  auto plant = decay_plant(a);
  auto ctl = zero_controller();
  Vec x0(1);
  x0 << 1.0;
  const auto tr = run_simulation(plant, ctl, x0, SimConfig{0.0, 1.0, h, 1});
  ASSERT_EQ(tr.rows(), 1001u);
  for (std::size_t k = 0; k < tr.rows(); k += 100)
    EXPECT_NEAR(tr.col("x")[k], std::pow(1.0 - a * h, static_cast<double>(k)), 1e-12);
  EXPECT_DOUBLE_EQ(tr.col("t").back(), 1.0);
}

TEST(Sim, RecordStrideKeepsEveryNthStep) {
  auto plant = decay_plant(1.0);
  auto ctl = zero_controller();
  Vec x0(1);
  x0 << 1.0;
  const auto tr = run_simulation(plant, ctl, x0, SimConfig{0.0, 1.0, 1e-3, 10});
  EXPECT_EQ(tr.rows(), 101u);
  EXPECT_NEAR(tr.col("t")[1], 0.01, 1e-15);
}

TEST(Sim, Rk4ConvergesFourthOrder) {
  auto plant = decay_plant(1.0);
  auto ctl = zero_controller();
  Vec x0(1);
  x0 << 1.0;
  auto err = [&](double h) {
    const auto tr = run_simulation(plant, ctl, x0, SimConfig{0.0, 1.0, h, 1}, Method::RK4);
    return std::abs(tr.col("x").back() - std::exp(-1.0));
  };
  const double ratio = err(0.1) / err(0.05);
  EXPECT_NEAR(std::log2(ratio), 4.0, 0.2);
}

TEST(Sim, DivergenceAbortsWithTimestamp) {
  auto plant = decay_plant(-50.0);
  auto ctl = zero_controller();
  Vec x0(1);
  x0 << 1.0;
  try {
    run_simulation(plant, ctl, x0, SimConfig{0.0, 10.0, 1e-3, 1});
    FAIL() << "expected divergence";
  } catch (const DivergedError& e) {
    // 1 * (1.05)^k crosses 1e9 after ~425 steps
    EXPECT_NEAR(e.t, 0.425, 0.002);
  }
}

TEST(Sim, NonFiniteDerivativeAborts) {
  FunctionPlant p{[](const Vec& x, const Vec&, double) { return Vec(x.array().sqrt() - 1.0); }, {"x"}};
  auto ctl = zero_controller();
  Vec x0(1);
  x0 << -1.0;
  EXPECT_THROW(run_simulation(p, ctl, x0, SimConfig{0.0, 1.0, 1e-3, 1}), DivergedError);
}

TEST(Sim, InvalidConfigRejected) {
  EXPECT_THROW((SimConfig{0.0, 1.0, 0.0, 1}.validate()), ConfigError);
  EXPECT_THROW((SimConfig{1.0, 1.0, 1e-3, 1}.validate()), ConfigError);
  EXPECT_THROW((SimConfig{0.0, 1.0, 1e-3, 0}.validate()), ConfigError);
}

TEST(Sim, IdenticalRunsHashIdentical) {
  LtiPlant plant(TransferFunction{{1.0}, {1.0, 1.0, 4.0}});
  FunctionController ctl{[](double t, const Vec&, double) { return Vec::Constant(1, std::sin(3.0 * t)); }, {"u"}, {}};
  const auto a = run_simulation(plant, ctl, Vec::Zero(2), SimConfig{0.0, 5.0, 1e-3, 7});
  const auto b = run_simulation(plant, ctl, Vec::Zero(2), SimConfig{0.0, 5.0, 1e-3, 7});
  EXPECT_EQ(a.hash(), b.hash());
  const auto c = run_simulation(plant, ctl, Vec::Zero(2), SimConfig{0.0, 5.0, 1e-3, 5});
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Sim, CsvHasHeaderAndRoundTripPrecision) {
  SimTrace tr({"t", "y"});
  tr.append({0.0, 0.1});
  tr.append({0.5, 1.0 / 3.0});
  std::ostringstream os;
  tr.write_csv(os);
  std::istringstream is(os.str());
  std::string header, r0, r1;
  std::getline(is, header);
  std::getline(is, r0);
  std::getline(is, r1);
  EXPECT_EQ(header, "t,y");
  EXPECT_EQ(std::stod(r1.substr(r1.find(',') + 1)), 1.0 / 3.0);
  EXPECT_THROW(tr.append({1.0}), Error);
  EXPECT_THROW(tr.col("missing"), Error);
}

TEST(Sim, StepTrainSumsDelayedSteps) {
  const std::vector<StepTerm> s{{-1.2, 2.0}, {2.3, 6.0}, {-1.2, 10.0}};
  EXPECT_EQ(step_train(1.999, s), 0.0);
  EXPECT_DOUBLE_EQ(step_train(2.0, s), -1.2);
  EXPECT_DOUBLE_EQ(step_train(7.0, s), 1.1);
  EXPECT_NEAR(step_train(20.0, s), -0.1, 1e-15);
}

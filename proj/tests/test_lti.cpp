#include <gtest/gtest.h>

#include <cmath>

#include <smcaero/lti.hpp>
#include <smcaero/lv.hpp>
#include <smcaero/sim.hpp>

using namespace smcaero;

namespace {

// impulse-response coefficients of num/den by long division in 1/s
std::vector<double> markov_by_division(Poly num, Poly den, int count) {
  const double a0 = den[0];
  for (double& c : den) c /= a0;
  for (double& c : num) c /= a0;
  const std::size_t n = den.size() - 1;
  Poly b(n + 1, 0.0);
  std::copy(num.begin(), num.end(), b.end() - static_cast<long>(num.size()));
  // G = b0 + sum h_k s^-k; h_k = b_k - b0 a_k - sum_{j<k} a_j h_{k-j}
  std::vector<double> h;
  for (int k = 1; k <= count; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    double v = uk <= n ? b[uk] - b[0] * den[uk] : 0.0;
    for (std::size_t j = 1; j < uk && j <= n; ++j) v -= den[j] * h[uk - j - 1];
    h.push_back(v);
  }
  return h;
}

}  // namespace

TEST(Lti, RelativeDegree) {
  EXPECT_EQ(relative_degree({{1.0}, {1.0, 0.0, 0.0}}), 2);
  EXPECT_EQ(relative_degree({{2.0, 1.0}, {1.0, 3.0, 2.0}}), 1);
  EXPECT_EQ(relative_degree({{0.0, 0.0, 1.0}, {1.0, 1.0}}), 1);  // leading zeros ignored
  EXPECT_EQ(relative_degree(lv_prd_bench()), 5);
  EXPECT_EQ(relative_degree(lv_open_loop()), 3);
}

TEST(Lti, ImproperOrEmptyRejected) {
  EXPECT_THROW(relative_degree({{1.0, 0.0, 0.0}, {1.0, 1.0}}), Error);
  EXPECT_THROW(relative_degree({{}, {1.0}}), Error);
  EXPECT_THROW(relative_degree({{1.0}, {0.0}}), Error);
}

TEST(Lti, RealizationMatchesLongDivision) {
  const std::vector<TransferFunction> cases{
      {{1.0}, {1.0, 3.0, 2.0}},
      {{2.0, -1.0, 5.0}, {0.5, 2.0, 1.0, 3.0, 7.0}},
      {{3.0, 1.0, 2.0}, {2.0, 1.0, 4.0}},  // biproper: D != 0
      lv_prd_bench(),
  };
  for (const auto& tf : cases) {
    const auto ss = to_state_space(tf);
    const auto want = markov_by_division(tf.num, tf.den, 2 * ss.order());
    const auto got = ss.markov(2 * ss.order());
    for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(got[k], want[k], 1e-9 * (1.0 + std::abs(want[k])));
  }
  EXPECT_DOUBLE_EQ(to_state_space({{3.0, 1.0, 2.0}, {2.0, 1.0, 4.0}}).D, 1.5);
}

TEST(Lti, StepResponseMatchesAnalytic) {
  // 1/((s+1)(s+2)): y = 1/2 - e^-t + e^-2t / 2
  LtiPlant plant(TransferFunction{{1.0}, {1.0, 3.0, 2.0}});
  FunctionController one{[](double, const Vec&, double) { return Vec::Ones(1); }, {"u"}, {}};
  const auto tr = run_simulation(plant, one, Vec::Zero(2), SimConfig{0.0, 4.0, 1e-3, 100}, Method::RK4);
  for (std::size_t i = 0; i < tr.rows(); ++i) {
    const double t = tr.col("t")[i];
    Vec x(2);
    x << tr.col("x0")[i], tr.col("x1")[i];
    EXPECT_NEAR(plant.output(x, 1.0), 0.5 - std::exp(-t) + 0.5 * std::exp(-2.0 * t), 1e-10);
  }
}

TEST(Lti, HurwitzTest) {
  EXPECT_TRUE(is_hurwitz({1.0, 3.0, 2.0}));
  EXPECT_FALSE(is_hurwitz({1.0, 0.0, -1.0}));
  EXPECT_FALSE(is_hurwitz({1.0, 0.0, 1.0}));
  EXPECT_TRUE(is_hurwitz({1.0, 2.1, 3.4, 2.7, 1.0}));
}

TEST(Lti, SeriesAndParallelComposition) {
  const TransferFunction a{{1.0}, {1.0, 1.0}}, b{{2.0}, {1.0, 3.0}};
  const auto s = tf_series(a, b);
  EXPECT_EQ(s.num, (Poly{2.0}));
  EXPECT_EQ(s.den, (Poly{1.0, 4.0, 3.0}));
  const auto p = tf_parallel(a, b);
  EXPECT_EQ(p.num, (Poly{3.0, 5.0}));  // (s+3) + 2(s+1)
  EXPECT_EQ(p.den, (Poly{1.0, 4.0, 3.0}));
}

TEST(Lti, BenchmarkCoefficientsStored) {
  const auto tf = lv_prd_bench();
  EXPECT_EQ(tf.num, (Poly{-117.1, -13.55, -16870.0}));
  EXPECT_EQ(tf.den, (Poly{0.2, 3.425, 72.39, 679.0, 6364.0, 22230.0, -2557.0, -9000.0}));
}

TEST(Lti, NearCommonRootsReported) {
  const TransferFunction tf{{1.0, 2.0}, {1.0, 3.0, 2.0}};  // (s+2)/((s+1)(s+2))
  EXPECT_EQ(near_common_roots(tf).size(), 1u);
  EXPECT_TRUE(near_common_roots({{1.0}, {1.0, 3.0, 2.0}}).empty());
}

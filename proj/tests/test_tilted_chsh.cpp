#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qsep/tilted_chsh.hpp"

namespace qsep::tilted_chsh {
namespace {

TEST(Params, FromBetaExamples) {
  Params p = params_from_beta(0.0);
  EXPECT_NEAR(p.theta, M_PI / 4, 1e-12);
  EXPECT_NEAR(p.mu, M_PI / 4, 1e-12);
  EXPECT_NEAR(p.alpha, 1.0, 1e-12);

  p = params_from_beta(2.0);
  EXPECT_NEAR(p.theta, 0.0, 1e-12);
  EXPECT_NEAR(p.mu, 0.0, 1e-12);
  EXPECT_NEAR(p.alpha, 0.0, 1e-12);

  p = params_from_beta(1.0);
  EXPECT_NEAR(std::sin(2 * p.theta), std::sqrt(3.0 / 5.0), 1e-12);
  EXPECT_NEAR(std::sin(2 * p.theta), 0.7745967, 1e-7);
  // theta = asin(sqrt(3/5)) / 2, alpha = tan(theta), mu = atan(sqrt(3/5)).
  EXPECT_NEAR(p.theta, 0.4430386, 1e-7);
  EXPECT_NEAR(p.alpha, 0.4744979, 1e-7);
  EXPECT_NEAR(p.mu, 0.6590580, 1e-7);
}

TEST(Params, FromAlphaExamples) {
  EXPECT_NEAR(params_from_alpha(1.0).beta, 0.0, 1e-12);
  EXPECT_NEAR(params_from_alpha(0.0).beta, 2.0, 1e-12);
  EXPECT_NEAR(params_from_alpha(0.5).beta, 1.5 / std::sqrt(2.5625), 1e-12);
  EXPECT_NEAR(params_from_alpha(0.5).beta, 0.9370426, 1e-7);
}

TEST(Params, RoundTripOverGrid) {
  for (int i = 0; i <= 40; ++i) {
    const double beta = 0.05 * i;
    EXPECT_NEAR(params_from_alpha(params_from_beta(beta).alpha).beta, beta, 1e-9);
  }
}

TEST(Params, RejectsOutOfRange) {
  EXPECT_THROW(params_from_beta(-0.1), std::invalid_argument);
  EXPECT_THROW(params_from_beta(2.1), std::invalid_argument);
  EXPECT_THROW(params_from_alpha(1.5), std::invalid_argument);
}

TEST(IdealStrategy, StateCoefficients) {
  const Strategy s = ideal_strategy(params_from_alpha(0.5));
  EXPECT_NEAR(s.state(0).real(), 0.8944272, 1e-7);
  EXPECT_NEAR(s.state(3).real(), 0.4472136, 1e-7);
  EXPECT_NEAR(std::abs(s.state(1)) + std::abs(s.state(2)), 0.0, 1e-15);

  const Strategy epr = ideal_strategy(params_from_beta(0.0));
  EXPECT_NEAR(epr.state(0).real(), M_SQRT1_2, 1e-12);
  EXPECT_NEAR(epr.state(3).real(), M_SQRT1_2, 1e-12);

  const Strategy product = ideal_strategy(params_from_beta(2.0));
  EXPECT_NEAR(product.state(0).real(), 1.0, 1e-12);
  for (int y = 0; y < 2; ++y) EXPECT_LE((product.bob[y][0] - product.alice[0][0]).norm(), 1e-12);
}

TEST(IdealStrategy, BobProjectorsMatchRotatedEigenvectors) {
  const Params p = params_from_beta(1.0);
  const Strategy s = ideal_strategy(p);
  const oracle::Pair plus_mu = oracle::rotated(p.mu);
  const oracle::Pair minus_mu = oracle::rotated(-p.mu);
  const Eigen::Matrix2d b0 = plus_mu.plus * plus_mu.plus.transpose();
  const Eigen::Matrix2d b1 = minus_mu.plus * minus_mu.plus.transpose();
  EXPECT_LE((s.bob[0][0].real() - b0).norm(), 1e-12);
  EXPECT_LE((s.bob[1][0].real() - b1).norm(), 1e-12);
}

TEST(BellValue, ReachesQuantumBoundOnGrid) {
  for (int i = 0; i <= 20; ++i) {
    const double beta = 0.1 * i;
    EXPECT_NEAR(bell_value(ideal_strategy(params_from_beta(beta)), beta), std::sqrt(8 + 2 * beta * beta), 1e-9)
        << "beta " << beta;
  }
  EXPECT_NEAR(bell_value(ideal_strategy(params_from_beta(0.0)), 0.0), 2.8284271, 1e-7);
  EXPECT_NEAR(bell_value(ideal_strategy(params_from_beta(1.0)), 1.0), 3.1622777, 1e-7);
  EXPECT_NEAR(bell_value(ideal_strategy(params_from_beta(2.0)), 2.0), 4.0, 1e-12);
}

TEST(BellValue, BoundsAndRandomStrategies) {
  EXPECT_DOUBLE_EQ(quantum_bound(1.0), std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(product_bound(1.0), 3.0);
  Rng rng(12);
  std::uniform_real_distribution<double> beta_dist(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double beta = beta_dist(rng);
    const Strategy s = fixture::random_strategy(2, 2, 2, 2, 2, 2, rng);
    EXPECT_LE(bell_value(s, beta), quantum_bound(beta) + 1e-9);
  }
}

TEST(BellValue, ProductStatesStayBelowProductBound) {
  Rng rng(13);
  std::uniform_real_distribution<double> beta_dist(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double beta = beta_dist(rng);
    Strategy s = fixture::random_strategy(2, 2, 2, 2, 2, 2, rng);
    s.state = kron(haar_state(2, rng), haar_state(2, rng));
    EXPECT_LE(bell_value(s, beta), product_bound(beta) + 1e-9);
  }
}

TEST(Tables, OperatorRouteMatchesClosedForm) {
  for (double beta : {0.0, 0.4, 0.9370426, 1.6, 2.0}) {
    const Params p = params_from_beta(beta);
    const Strategy s = ideal_strategy(p);
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const CorrelationTable t = ideal_table(p, x, y);
        const Eigen::Matrix2d closed = closed_form_table(p, x, y);
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            EXPECT_NEAR(t.entries(a, b), closed(a, b), 1e-12);
            EXPECT_NEAR(t.entries(a, b), oracle::kron_expectation(s.state, s.alice[x][a], s.bob[y][b]), 1e-12);
          }
        }
      }
    }
  }
}

TEST(Tables, Examples) {
  const CorrelationTable t = ideal_table(params_from_beta(0.0), 0, 0);
  EXPECT_NEAR(t.entries(0, 0), 0.4267767, 1e-7);
  EXPECT_NEAR(t.entries(0, 1), 0.0732233, 1e-7);
  // At beta = 2 the state is |00>: question 0 is deterministic, question 1
  // measures X and splits evenly on Alice's side.
  for (int y = 0; y < 2; ++y) {
    EXPECT_NEAR(ideal_table(params_from_beta(2.0), 0, y).entries(0, 0), 1.0, 1e-12);
    const CorrelationTable d = ideal_table(params_from_beta(2.0), 1, y);
    EXPECT_NEAR(d.entries(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(d.entries(1, 0), 0.5, 1e-12);
  }
}

}  // namespace
}  // namespace qsep::tilted_chsh

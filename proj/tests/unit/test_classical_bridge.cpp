#include <cmath>

#include <gtest/gtest.h>

#include "instances.hpp"
#include "qtur/classical_bridge.hpp"
#include "qtur/error.hpp"
#include "qtur/finite_difference.hpp"

namespace qtur {
namespace {

using testing::Rng;

RateMatrix two_state() {
  Eigen::MatrixXd r(2, 2);
  r << -1.0, 2.0, 1.0, -2.0;
  return RateMatrix(r);
}

ProbabilityVector vec(std::initializer_list<double> v) {
  Eigen::VectorXd p(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p(i++) = x;
  return ProbabilityVector(p);
}

ClassicalObservable obs(std::initializer_list<double> v) {
  Eigen::VectorXd f(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) f(i++) = x;
  return ClassicalObservable(f);
}

// Schnakenberg form, independent of the quantum embedding.
double schnakenberg_epr(const Eigen::MatrixXd& r, const Eigen::VectorXd& p) {
  double sigma = 0.0;
  for (Index i = 0; i < r.rows(); ++i) {
    for (Index j = 0; j < r.cols(); ++j) {
      if (i == j) continue;
      const double forward = r(j, i) * p(i);
      const double backward = r(i, j) * p(j);
      sigma += 0.5 * (forward - backward) * std::log(forward / backward);
    }
  }
  return sigma;
}

TEST(ClassicalTypes, Validation) {
  Eigen::MatrixXd bad(2, 2);
  bad << -1.0, 2.0, 1.5, -2.0;
  EXPECT_THROW(RateMatrix{bad}, Error);
  bad << 1.0, 0.0, -1.0, 0.0;
  EXPECT_THROW(RateMatrix{bad}, Error);
  EXPECT_THROW(vec({0.5, 0.6}), Error);
  EXPECT_THROW(vec({1.2, -0.2}), Error);
  EXPECT_THROW(obs({1.0, std::nan("")}), Error);
}

TEST(ClassicalPropagate, RelaxesToStationaryState) {
  const ProbabilityVector p = classical_propagate(two_state(), vec({1.0, 0.0}), 50.0);
  EXPECT_NEAR(p.vector()(0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p.vector()(1), 1.0 / 3.0, 1e-12);
  const Eigen::MatrixXd t = classical_transition_matrix(two_state(), 0.0);
  EXPECT_LT((t - Eigen::MatrixXd::Identity(2, 2)).norm(), 1e-15);
}

TEST(ClassicalMoments, TwoStateValues) {
  const auto r = two_state();
  const auto p = vec({2.0 / 3.0, 1.0 / 3.0});
  const auto f = obs({0.0, 1.0});
  EXPECT_NEAR(classical_short_time_second_moment(r, p, f), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(classical_short_time_second_moment_operator_form(r, p, f), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(classical_current(r, p, f), 0.0, 1e-14);
  EXPECT_NEAR(classical_current(r, vec({1.0, 0.0}), f), 1.0, 1e-14);
  const double dt = 1e-4;
  EXPECT_NEAR(classical_joint_moment(r, p, f, 2, dt) / dt, 4.0 / 3.0, 1e-3);
  EXPECT_NEAR(std::abs(classical_generating_function(r, p, f, 0.0, 0.3) - 1.0), 0.0, 1e-14);
}

TEST(ClassicalMoments, GeneratingFunctionDerivatives) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const auto chain = testing::random_reversible_chain(3 + trial % 3, rng);
    const RateMatrix r(chain.rates);
    const ProbabilityVector p(chain.p);
    const ClassicalObservable f(chain.f);
    const double dt = 0.2;
    for (int n = 1; n <= 4; ++n) {
      const Complex d = central_derivative(
          [&](double l) { return classical_generating_function(r, p, f, l, dt); }, 0.0, n, 1e-2, 4);
      const Complex moment = d * std::pow(Complex(0.0, -1.0), n);
      const double exact = classical_joint_moment(r, p, f, n, dt);
      EXPECT_NEAR(moment.real(), exact, 1e-6 * std::max(1.0, std::abs(exact))) << n;
      EXPECT_NEAR(moment.imag(), 0.0, 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST(ClassicalMoments, SecondMomentFormsAgree) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto chain = testing::random_reversible_chain(2 + trial % 5, rng);
    const RateMatrix r(chain.rates);
    const ProbabilityVector p(chain.p);
    const ClassicalObservable f(chain.f);
    EXPECT_NEAR(classical_short_time_second_moment(r, p, f),
                classical_short_time_second_moment_operator_form(r, p, f), 1e-10);
    const Eigen::MatrixXd table = classical_joint_table(r, p, 0.1);
    EXPECT_NEAR(table.sum(), 1.0, 1e-12);
    EXPECT_GE(table.minCoeff(), 0.0);
  }
}

TEST(EmbedClassical, StructureOfTheEmbedding) {
  const auto e = embed_classical(two_state(), vec({0.25, 0.75}), obs({0.0, 1.0}));
  ASSERT_TRUE(e.model.has_value());
  EXPECT_TRUE(e.reversible());
  EXPECT_EQ(e.model->jump_pairs().size(), 1u);
  EXPECT_LT(e.model->hamiltonian().norm(), 1e-15);
  EXPECT_NEAR(e.rho.matrix()(1, 1).real(), 0.75, 1e-15);
  EXPECT_NEAR(std::abs(e.x(1, 1)), 1.0, 1e-15);
  EXPECT_LT(validate_local_detailed_balance(*e.model).max_residual(), 1e-14);
}

TEST(QuantizeAndCompare, TwoState) {
  const auto report = quantize_and_compare(two_state(), vec({2.0 / 3.0, 1.0 / 3.0}), obs({0.0, 1.0}));
  EXPECT_NEAR(report.m_quantum, 4.0 / 3.0, 1e-12);
  EXPECT_LE(report.max_residual(), 1e-10);
  EXPECT_GE(report.min_table_entry, -1e-12);
  ASSERT_TRUE(report.tur.has_value());
  EXPECT_NEAR(report.tur->epr, 0.0, 1e-12);
  EXPECT_EQ(report.lambda_grid.size(), 21u);
}

TEST(QuantizeAndCompare, RandomReversibleChains) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto chain = testing::random_reversible_chain(2 + trial % 4, rng);
    const RateMatrix r(chain.rates);
    const ProbabilityVector p(chain.p);
    const ClassicalObservable f(chain.f);
    const auto report = quantize_and_compare(r, p, f);
    EXPECT_LE(report.max_residual(), 1e-10);
    EXPECT_GE(report.min_table_entry, -1e-12);
    ASSERT_TRUE(report.tur.has_value());
    const double sigma = schnakenberg_epr(chain.rates, chain.p);
    EXPECT_NEAR(report.tur->epr, sigma, 1e-9 * std::max(1.0, sigma));
    EXPECT_NEAR(report.tur->fluctuation, report.m_classical, 1e-10 * std::max(1.0, report.m_classical));
    EXPECT_NEAR(report.tur->current, report.classical_current, 1e-10);
    EXPECT_TRUE(report.tur->satisfied());
  }
}

TEST(QuantizeAndCompare, DegenerateObservableValues) {
  Rng rng(4);
  auto chain = testing::random_reversible_chain(4, rng);
  chain.f << 1.0, 1.0, 2.0, 2.0;
  const auto report = quantize_and_compare(RateMatrix(chain.rates), ProbabilityVector(chain.p),
                                           ClassicalObservable(chain.f));
  EXPECT_LE(report.max_residual(), 1e-10);
}

TEST(QuantizeAndCompare, IrreversibleChain) {
  Eigen::MatrixXd r(3, 3);
  r << -1.0, 0.0, 0.5,
        1.0, -2.0, 0.0,
        0.0, 2.0, -0.5;
  const auto p = vec({0.2, 0.3, 0.5});
  const auto f = obs({0.0, 1.0, 3.0});
  const auto report = quantize_and_compare(RateMatrix(r), p, f);
  EXPECT_TRUE(report.irreversible);
  EXPECT_FALSE(report.tur.has_value());
  EXPECT_LE(report.max_residual(), 1e-10);
  EXPECT_EQ(embed_classical(RateMatrix(r), p, f).irreversible_edges.size(), 3u);

  QuantizationOptions strict;
  strict.require_reversible = true;
  try {
    quantize_and_compare(RateMatrix(r), p, f, strict);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIrreversibleRate);
  }
}

TEST(QuantizeAndCompare, DimensionMismatch) {
  EXPECT_THROW(quantize_and_compare(two_state(), vec({0.2, 0.3, 0.5}), obs({0.0, 1.0})), Error);
}

}  // namespace
}  // namespace qtur

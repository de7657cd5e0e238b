#include <cmath>

#include <gtest/gtest.h>

#include "instances.hpp"
#include "qtur/degeneracy.hpp"
#include "qtur/error.hpp"
#include "qtur/quasiprobability.hpp"

namespace qtur {
namespace {

using testing::rel_diff;
using testing::Rng;

CollectiveModelParams params_for(int n, double p_g = 0.5) {
  CollectiveModelParams p;
  p.n_levels = n;
  p.p_g = p_g;
  return p;
}

// Brute-force double sum over T_{s'j'sj} from the generic flux matrix.
Eigen::MatrixXd brute_force_integrated(const LindbladModel& model, const QuantumState& rho,
                                       const DegenerateBasis& basis, double* escape) {
  const FluxMatrix f = flux_matrix(model, rho, basis.resolved());
  const auto& group = basis.group_of_column();
  const Index n = static_cast<Index>(basis.groups().size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  *escape = 0.0;
  for (Index a = 0; a < f.values.rows(); ++a) {
    for (Index b = 0; b < f.values.cols(); ++b) {
      if (a == b) {
        *escape -= f.values(a, a);
        continue;
      }
      out(static_cast<Index>(group[a]), static_cast<Index>(group[b])) += f.values(a, b);
    }
  }
  return out;
}

TEST(BasisFluxMatrix, MatchesGenericFluxes) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 2 + trial % 5;
    const LindbladModel model = testing::random_model(d, 1 + trial % 3, rng);
    const QuantumState rho = testing::random_full_rank_state(d, rng);
    const Operator u = testing::random_unitary(d, rng);
    std::vector<double> labels;
    for (Index i = 0; i < d; ++i) labels.push_back(static_cast<double>(i));
    const FluxMatrix generic = flux_matrix(model, rho, ObservableDecomposition::from_basis(labels, u));
    EXPECT_LT((basis_flux_matrix(model, rho, u) - generic.values).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(IntegratedFluxes, PlusStateClosedFormAtFour) {
  const auto p = params_for(4);
  const auto model = build_collective_model(p);
  const auto rho = build_plus_minus_state(p, CollectiveState::kPlus);
  const auto basis = product_basis(p);
  const auto flux = integrated_fluxes(model, rho, basis, model.hamiltonian());
  EXPECT_NEAR(flux.values(1, 0), 8.0, 1e-12);
  double escape = 0.0;
  const Eigen::MatrixXd brute = brute_force_integrated(model, rho, basis, &escape);
  EXPECT_LT((brute - flux.values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(escape, flux.escape_rate, 1e-12);
}

TEST(IntegratedFluxes, MinusStateEvenNHasNoInterGroupFlux) {
  const auto p = params_for(6);
  const auto flux = integrated_fluxes(build_collective_model(p),
                                      build_plus_minus_state(p, CollectiveState::kMinus),
                                      product_basis(p));
  EXPECT_NEAR(flux.values(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(flux.values(0, 1), 0.0, 1e-12);
}

TEST(IntegratedFluxes, NoJumps) {
  Rng rng(2);
  const Operator x = testing::random_observable(4, rng, 2);
  const LindbladModel model(x, {});
  const auto flux = integrated_fluxes(model, testing::random_full_rank_state(4, rng),
                                      DegenerateBasis::from_observable(x));
  EXPECT_LT(flux.values.cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(flux.escape_rate, 0.0, 1e-13);
}

TEST(IntegratedFluxes, RejectsForeignBasis) {
  const auto p = params_for(3);
  const auto model = build_collective_model(p);
  Rng rng(3);
  try {
    integrated_fluxes(model, build_classical_state(p), product_basis(p),
                      testing::random_hermitian(6, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBasisMismatch);
  }
}

TEST(IntegratedFluxes, RandomDegenerateInvariants) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 3 + trial % 4;
    const LindbladModel model = testing::random_model(d, 1 + trial % 3, rng);
    const QuantumState rho = testing::random_full_rank_state(d, rng);
    const Operator x = testing::random_observable(d, rng, 2);
    const DegenerateBasis basis = DegenerateBasis::from_observable(x);
    const auto flux = integrated_fluxes(model, rho, basis, x);

    EXPECT_NEAR(flux.total(), flux.escape_rate, 1e-9 * std::max(1.0, flux.escape_rate));

    const double m = short_time_moment(flux_matrix(model, rho, ObservableDecomposition::from_operator(x)), 2).value;
    EXPECT_LE(rel_diff(flux.m_x(), m, 1e-12), 1e-9);

    const DegenerateBasis rotated = random_group_rotation(basis, rng);
    const auto other = integrated_fluxes(model, rho, rotated, x);
    for (Index a = 0; a < flux.values.rows(); ++a) {
      for (Index b = 0; b < flux.values.cols(); ++b) {
        if (a != b) EXPECT_NEAR(flux.values(a, b), other.values(a, b), 1e-9);
      }
    }
  }
}

TEST(Classicality, ProductBasisIsClassical) {
  const auto p = params_for(5);
  CollectiveModelParams q = p;
  q.gamma_plus = 2.0;
  const auto report = classify_basis_classicality(build_collective_model(q), product_basis(q), 2.0, 1);
  EXPECT_NEAR(report.max_magnitude, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(report.max_count, 1);
  EXPECT_TRUE(report.classical());
}

TEST(Classicality, CollectiveBasisIsNotClassical) {
  for (int n : {2, 4, 9}) {
    auto p = params_for(n);
    p.gamma_plus = 1.5;
    const auto report = classify_basis_classicality(build_collective_model(p), fourier_basis(p), 2.0, 1);
    double plus_element = 0.0;
    for (const auto& t : report.transitions) {
      if (t.from == 0 && t.to == n) plus_element = t.max_magnitude;  // |g,+> -> |e,+>
    }
    EXPECT_NEAR(plus_element, std::sqrt(1.5) * n, 1e-10);
    EXPECT_NEAR(report.max_magnitude, std::sqrt(1.5) * n, 1e-10);
    EXPECT_FALSE(report.classical());
  }
}

TEST(Classicality, NoJumpsIsClassical) {
  const LindbladModel model(Operator::Identity(3, 3), {});
  const auto report = classify_basis_classicality(
      model, DegenerateBasis({{1.0, Eigen::MatrixXcd::Identity(3, 3)}}), 0.0, 0);
  EXPECT_TRUE(report.classical());
  EXPECT_TRUE(report.transitions.empty());
}

TEST(L1Coherence, Values) {
  Rng rng(5);
  Operator diag = Operator::Zero(3, 3);
  diag(0, 0) = 0.2;
  diag(1, 1) = 0.3;
  diag(2, 2) = 0.5;
  EXPECT_NEAR(l1_coherence(diag, Operator::Identity(3, 3)), 0.0, 1e-15);
  for (int n : {1, 3, 8}) {
    const auto p = params_for(n, 0.3);
    const auto basis = product_basis(p).matrix();
    const double plus = l1_coherence(build_plus_minus_state(p, CollectiveState::kPlus).matrix(), basis);
    const double minus = l1_coherence(build_plus_minus_state(p, CollectiveState::kMinus).matrix(), basis);
    EXPECT_NEAR(plus, n - 1.0, 1e-12);
    EXPECT_NEAR(minus, plus, 1e-12);
  }
  EXPECT_GE(l1_coherence(testing::random_full_rank_state(4, rng).matrix(), testing::random_unitary(4, rng)), 0.0);
}

TEST(CollectiveModel, SingleLevelIsThermalQubit) {
  auto p = params_for(1);
  p.gamma_plus = 0.4;
  p.gamma_minus = 1.2;
  const auto model = build_collective_model(p);
  ASSERT_EQ(model.dim(), 2);
  EXPECT_NEAR(model.jump_pairs()[0].forward(1, 0).real(), std::sqrt(0.4), 1e-15);
  EXPECT_NEAR(model.jump_pairs()[0].backward(0, 1).real(), std::sqrt(1.2), 1e-15);
  const auto rho = build_plus_minus_state(p, CollectiveState::kMinus);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(rho.matrix()(0, 1)), 0.0, 1e-15);
}

TEST(CollectiveModel, DetailedBalanceAndSpectrum) {
  for (int n : {1, 3, 7}) {
    auto p = params_for(n);
    p.gamma_plus = 0.3;
    p.gamma_minus = 2.0;
    const auto model = build_collective_model(p);
    EXPECT_LT(validate_local_detailed_balance(model).max_residual(), 1e-14);
  }
  const auto spectrum = spectral_decompose(build_collective_model(params_for(3)).hamiltonian());
  ASSERT_EQ(spectrum.size(), 2u);
  EXPECT_EQ(spectrum.classes()[0].multiplicity(), 3);
  EXPECT_NEAR(spectrum.classes()[1].value, 1.0, 1e-15);
}

TEST(CollectiveModel, RejectsInvalidParameters) {
  auto p = params_for(0);
  EXPECT_THROW(p.validate(), Error);
  p = params_for(2, 1.5);
  EXPECT_THROW(p.validate(), Error);
  p = params_for(2);
  p.gamma_minus = 0.0;
  EXPECT_THROW(build_collective_model(p), Error);
}

TEST(PlusMinusStates, MatrixElements) {
  const int n = 5;
  const auto p = params_for(n, 0.3);
  const Operator plus = build_plus_minus_state(p, CollectiveState::kPlus).matrix();
  const Operator minus = build_plus_minus_state(p, CollectiveState::kMinus).matrix();
  for (int j = 1; j <= n; ++j) {
    for (int k = 1; k <= n; ++k) {
      const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
      EXPECT_NEAR(plus(j - 1, k - 1).real(), 0.3 / n, 1e-15);
      EXPECT_NEAR(plus(n + j - 1, n + k - 1).real(), 0.7 / n, 1e-15);
      EXPECT_NEAR(minus(j - 1, k - 1).real(), sign * 0.3 / n, 1e-15);
      EXPECT_NEAR(std::abs(plus(j - 1, n + k - 1)), 0.0, 1e-15);
    }
  }
  Eigen::SelfAdjointEigenSolver<Operator> es(plus);
  EXPECT_EQ((es.eigenvalues().array() > 1e-12).count(), 2);
}

TEST(ClosedForms, DocumentedValues) {
  const auto plus = closed_form_reference(params_for(4), CollectiveState::kPlus);
  EXPECT_DOUBLE_EQ(plus.m_h, 16.0);
  EXPECT_DOUBLE_EQ(plus.escape_rate, 10.0);
  EXPECT_DOUBLE_EQ(plus.t_eg, 8.0);
  const auto minus = closed_form_reference(params_for(4), CollectiveState::kMinus);
  EXPECT_DOUBLE_EQ(minus.m_h, 0.0);
  EXPECT_DOUBLE_EQ(minus.escape_rate, 2.0);
  EXPECT_DOUBLE_EQ(minus.t_eg, 0.0);
  const auto odd = closed_form_reference(params_for(5), CollectiveState::kMinus);
  EXPECT_DOUBLE_EQ(odd.m_h, 1.0);
  EXPECT_DOUBLE_EQ(odd.t_eg, 0.5);
  EXPECT_EQ(parity_remainder(7), 1);
  EXPECT_EQ(parity_remainder(8), 0);
  EXPECT_THROW(closed_form_reference(params_for(4), CollectiveState::kClassical), Error);
}

TEST(ClosedForms, MatchBruteForceForBothSigns) {
  for (int n = 1; n <= 16; ++n) {
    for (auto sign : {CollectiveState::kPlus, CollectiveState::kMinus}) {
      CollectiveModelParams p = params_for(n, 0.35);
      p.gamma_plus = 0.8;
      p.gamma_minus = 1.7;
      p.omega = 1.3;
      const auto model = build_collective_model(p);
      const auto rho = build_plus_minus_state(p, sign);
      double escape = 0.0;
      const Eigen::MatrixXd t = brute_force_integrated(model, rho, product_basis(p), &escape);
      const auto ref = closed_form_reference(p, sign);
      const double tol = 1e-10;
      EXPECT_LE(rel_diff(t(1, 0), ref.t_eg, 1e-12), tol) << n;
      EXPECT_LE(rel_diff(t(0, 1), ref.t_ge, 1e-12), tol) << n;
      EXPECT_LE(rel_diff(t(0, 0), ref.t_gg, 1e-12), tol) << n;
      EXPECT_LE(rel_diff(t(1, 1), ref.t_ee, 1e-12), tol) << n;
      EXPECT_LE(rel_diff(escape, ref.escape_rate, 1e-12), tol) << n;
      const double m = short_time_moment(
          flux_matrix(model, rho, ObservableDecomposition::from_operator(model.hamiltonian())), 2).value;
      EXPECT_LE(rel_diff(m, ref.m_h, 1e-12), tol) << n;
    }
  }
}

TEST(PowerLawFit, RecoversExponent) {
  std::vector<double> x{1, 2, 4, 8}, y;
  for (double v : x) y.push_back(3.0 * v * v);
  const auto fit = fit_power_law(x, y, 1e-12);
  EXPECT_NEAR(fit.exponent, 2.0, 1e-12);
  EXPECT_NEAR(fit.prefactor, 3.0, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  const auto flat = fit_power_law(x, {0.0, 0.0, 0.0, 0.0}, 1e-12);
  EXPECT_NEAR(flat.exponent, 0.0, 1e-12);
  EXPECT_THROW(fit_power_law({1.0}, {1.0}, 1e-12), Error);
}

SweepOptions sweep_options(CollectiveState state, std::vector<int> n) {
  SweepOptions o;
  o.state = state;
  o.n_values = std::move(n);
  return o;
}

TEST(ScalingSweep, PlusStateAnomalousScaling) {
  SweepOptions o = sweep_options(CollectiveState::kPlus, {4, 8, 16, 32, 64});
  o.bias = 1.0;
  const auto report = scaling_sweep(o);
  EXPECT_NEAR(report.m_x_fit.exponent, 2.0, 0.05);
  EXPECT_NEAR(report.current_fit.exponent, 1.0, 0.05);
  for (const auto& p : report.points) {
    EXPECT_NEAR(p.m_x, static_cast<double>(p.n) * p.n, 1e-8 * p.n * p.n);
    EXPECT_NEAR(std::abs(p.current), p.n, 1e-9 * p.n);
    EXPECT_NEAR(p.bound, 2.0, 1e-9);
    EXPECT_GE(p.epr, p.bound - 1e-9 * std::max(p.epr, 1.0));
  }
  const auto q = q1_q2_diagnostics(report);
  EXPECT_TRUE(q.q1.satisfied);
  EXPECT_TRUE(q.q2.satisfied);
}

TEST(ScalingSweep, FixedPopulationCurrentGrowsQuadratically) {
  SweepOptions o = sweep_options(CollectiveState::kPlus, {4, 8, 16, 32});
  o.params.p_g = 0.7;
  const auto report = scaling_sweep(o);
  EXPECT_NEAR(report.current_fit.exponent, 2.0, 1e-9);
  o.params.p_g = 0.5;
  for (const auto& p : scaling_sweep(o).points) EXPECT_NEAR(p.current, 0.0, 1e-10);
}

TEST(ScalingSweep, MinusStateEvenN) {
  const auto report = scaling_sweep(sweep_options(CollectiveState::kMinus, {4, 8, 16, 32, 64}));
  for (const auto& p : report.points) EXPECT_LE(std::abs(p.m_x), 1e-10);
  const auto q = q1_q2_diagnostics(report);
  EXPECT_TRUE(q.neither());
  EXPECT_LE(report.m_x_fit.exponent, 1.05);
}

TEST(ScalingSweep, ClassicalStateIsAtMostLinear) {
  const auto report = scaling_sweep(sweep_options(CollectiveState::kClassical, {4, 8, 16, 32, 64}));
  EXPECT_LE(report.m_x_fit.exponent, 1.05);
  for (const auto& p : report.points) EXPECT_NEAR(p.m_x, p.n, 1e-9 * p.n);
}

TEST(ScalingSweep, BasisChoiceKeepsInterGroupQuantities) {
  for (auto basis : {BasisKind::kFourier, BasisKind::kRandom}) {
    SweepOptions o = sweep_options(CollectiveState::kPlus, {2, 3, 5});
    o.basis = basis;
    const auto rotated = scaling_sweep(o);
    o.basis = BasisKind::kProduct;
    const auto product = scaling_sweep(o);
    for (std::size_t i = 0; i < rotated.points.size(); ++i) {
      EXPECT_NEAR(rotated.points[i].m_x, product.points[i].m_x, 1e-9);
      EXPECT_NEAR(rotated.points[i].total_integrated_flux, rotated.points[i].escape_rate, 1e-9);
    }
  }
}

TEST(ScalingSweep, DeterministicAcrossWorkerCounts) {
  SweepOptions o = sweep_options(CollectiveState::kPlus, {2, 3, 4, 5, 6});
  o.basis = BasisKind::kRandom;
  const auto one = scaling_sweep(o);
  o.workers = 3;
  const auto three = scaling_sweep(o);
  for (std::size_t i = 0; i < one.points.size(); ++i) {
    EXPECT_EQ(one.points[i].escape_rate, three.points[i].escape_rate);
    EXPECT_EQ(one.points[i].l1_coherence, three.points[i].l1_coherence);
  }
}

TEST(ScalingSweep, Errors) {
  try {
    scaling_sweep(sweep_options(CollectiveState::kPlus, {4}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientPoints);
  }
  EXPECT_THROW(scaling_sweep(sweep_options(CollectiveState::kPlus, {8, 4})), Error);
  const auto short_sweep = scaling_sweep(sweep_options(CollectiveState::kPlus, {2, 4, 8}));
  try {
    q1_q2_diagnostics(short_sweep);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientPoints);
  }
}

}  // namespace
}  // namespace qtur

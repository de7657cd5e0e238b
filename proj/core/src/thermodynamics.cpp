#include "qtur/thermodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qtur/error.hpp"
#include "qtur/quasiprobability.hpp"

namespace qtur {

namespace {

void require_dims(const LindbladModel& model, const QuantumState& rho, const Operator& x) {
  if (rho.dim() != model.dim() || x.rows() != model.dim() || x.cols() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model, state and observable dimensions differ");
  }
}

}  // namespace

CurrentDecomposition currents(const LindbladModel& model, const QuantumState& rho,
                              const Operator& x) {
  require_dims(model, rho, x);
  const Complex i(0.0, 1.0);
  const Complex hamiltonian = i * (commutator(model.hamiltonian(), x) * rho.matrix()).trace();
  const Complex dissipative = (x * apply_dissipator(model, rho.matrix())).trace();
  return {hamiltonian.real(), dissipative.real()};
}

RegularizedState regularize_state(const QuantumState& rho, const EntropyOptions& options) {
  Eigen::SelfAdjointEigenSolver<Operator> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  RegularizedState out;
  out.rho = rho.matrix();
  out.min_eigenvalue = solver.eigenvalues().minCoeff();
  const double floor = options.eigenvalue_floor;
  const bool below = options.flooring ? out.min_eigenvalue < floor : out.min_eigenvalue <= 0.0;
  if (!below) return out;
  if (!options.flooring || !(floor > 0.0)) {
    throw Error(ErrorCode::kSingularState,
                "state is rank deficient (min eigenvalue " + std::to_string(out.min_eigenvalue) +
                    ") and flooring is disabled");
  }
  const double d = static_cast<double>(rho.dim());
  if (d * floor >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "eigenvalue floor too large for the dimension");
  }
  out.rho = (1.0 - d * floor) * rho.matrix() + floor * Operator::Identity(rho.dim(), rho.dim());
  out.floored = true;
  out.floor = floor;
  return out;
}

namespace {

double epr_of_matrix(const LindbladModel& model, const Operator& rho) {
  const Operator log_rho = matrix_log_psd(rho);
  const Complex entropy_change = -(apply_liouvillian(model, rho) * log_rho).trace();
  double flow = 0.0;
  const auto& jumps = model.jumps();
  const auto& s = model.jump_entropy_currents();
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    flow += s[k] * (jumps[k].adjoint() * jumps[k] * rho).trace().real();
  }
  return entropy_change.real() + flow;
}

}  // namespace

double entropy_production_rate(const LindbladModel& model, const QuantumState& rho,
                               const EntropyOptions& options) {
  if (rho.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model and state dimensions differ");
  }
  return epr_of_matrix(model, regularize_state(rho, options).rho);
}

double quantum_diffusivity(const LindbladModel& model, const QuantumState& rho,
                           const Operator& x) {
  require_dims(model, rho, x);
  const Operator dx = apply_adjoint_dissipator(model, x);
  const Operator dx2 = apply_adjoint_dissipator(model, x * x);
  return 0.5 * ((dx2 - anticommutator(dx, x)) * rho.matrix()).trace().real();
}

bool TURReport::satisfied() const { return slack >= -1e-9 * std::max(epr, 1.0); }

TURReport tur_check(const LindbladModel& model, const QuantumState& rho, const Operator& x,
                    const EntropyOptions& options) {
  require_dims(model, rho, x);
  const RegularizedState regularized = regularize_state(rho, options);
  const QuantumState state(regularized.rho, 1e-8);

  TURReport report;
  report.floored = regularized.floored;
  report.eigenvalue_floor = regularized.floor;
  report.epr = epr_of_matrix(model, state.matrix());
  report.current = currents(model, state, x).dissipative_part;
  const auto observable = ObservableDecomposition::from_operator(x);
  report.fluctuation = short_time_moment(flux_matrix(model, state, observable), 2).value;
  report.diffusivity = quantum_diffusivity(model, state, x);

  const double j2 = report.current * report.current;
  if (report.fluctuation <= kZeroFluctuation) {
    if (std::abs(report.current) > 1e-10) {
      throw Error(ErrorCode::kZeroFluctuationWithCurrent,
                  "m_X vanishes while J^d = " + std::to_string(report.current));
    }
    report.bound = 0.0;
  } else {
    report.bound = 2.0 * j2 / report.fluctuation;
  }
  report.diffusivity_bound =
      report.diffusivity <= 0.5 * kZeroFluctuation ? 0.0 : j2 / report.diffusivity;
  report.slack = report.epr - report.bound;
  return report;
}

// ---------------------------------------------------------------------------
// Force/current geometry

namespace {

void put_block(Operator& target, Index d, Index row_slot, Index col_slot, const Operator& block) {
  target.block(row_slot * d, col_slot * d, d, d) = block;
}

}  // namespace

GeometricRepresentation geometric_representation(const LindbladModel& model,
                                                 const QuantumState& rho) {
  if (rho.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model and state dimensions differ");
  }
  Eigen::SelfAdjointEigenSolver<Operator> solver(rho.matrix(), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kSingularState, "geometric representation needs a full-rank state");
  }
  const Index d = model.dim();
  const std::size_t k_pairs = model.jump_pairs().size();
  const Index total = 2 * static_cast<Index>(k_pairs) * d;
  const Operator& r = rho.matrix();
  const Operator log_rho = matrix_log_psd(r);

  GeometricRepresentation g;
  g.dim = d;
  g.pairs = k_pairs;
  g.current_operator = Operator::Zero(total, total);
  g.force_operator = Operator::Zero(total, total);
  g.weight = Operator::Zero(total, total);
  g.structure_operator = Operator::Zero(total, total);

  for (std::size_t k = 0; k < k_pairs; ++k) {
    const auto& pair = model.jump_pairs()[k];
    const PairDecomposition split = decompose_pair(pair);
    const Operator& lt = split.normalized;
    const Operator lt_dag = lt.adjoint();
    const double gf = split.gamma_forward;
    const double gb = split.gamma_backward;
    const double s = pair.entropy_current;

    const Operator j_forward = 0.5 * (gf * lt * r - gb * r * lt);
    const Operator j_backward = 0.5 * (gb * lt_dag * r - gf * r * lt_dag);
    const Operator f_forward = s * lt + commutator(lt, log_rho);
    const Operator f_backward = -s * lt_dag + commutator(lt_dag, log_rho);

    const Index a = 2 * static_cast<Index>(k);
    const Index b = a + 1;
    put_block(g.current_operator, d, a, b, j_backward);
    put_block(g.current_operator, d, b, a, j_forward);
    put_block(g.force_operator, d, a, b, f_backward);
    put_block(g.force_operator, d, b, a, f_forward);
    put_block(g.structure_operator, d, a, b, lt_dag);
    put_block(g.structure_operator, d, b, a, lt);
    put_block(g.weight, d, a, a, 0.5 * gf * r);
    put_block(g.weight, d, b, b, 0.5 * gb * r);
    g.gamma_forward.push_back(gf);
    g.gamma_backward.push_back(gb);
  }
  return g;
}

Complex GeometricRepresentation::epr_inner_product() const {
  if (pairs == 0) return 0.0;
  return hs_inner_product(current_operator, force_operator);
}

Complex GeometricRepresentation::epr_weighted_norm() const {
  if (pairs == 0) return 0.0;
  return weighted_inner(force_operator, force_operator);
}

double GeometricRepresentation::onsager_residual() const {
  if (pairs == 0) return 0.0;
  return (kubo_integral(weight, force_operator) - current_operator).norm();
}

Operator GeometricRepresentation::gradient(const Operator& a) const {
  if (a.rows() != dim || a.cols() != dim) {
    throw Error(ErrorCode::kDimMismatch, "gradient operand has the wrong dimension");
  }
  const Index slots = 2 * static_cast<Index>(pairs);
  Operator lifted = Operator::Zero(slots * dim, slots * dim);
  for (Index slot = 0; slot < slots; ++slot) put_block(lifted, dim, slot, slot, a);
  return commutator(lifted, structure_operator);
}

Operator GeometricRepresentation::gradient_adjoint(const Operator& c) const {
  const Index slots = 2 * static_cast<Index>(pairs);
  if (c.rows() != slots * dim || c.cols() != slots * dim) {
    throw Error(ErrorCode::kDimMismatch, "gradient_adjoint operand has the wrong dimension");
  }
  // <grad A, C> = <I (x) A, [C, B^dagger]>, so the adjoint is the partial
  // trace of [C, B^dagger] over the slot space.
  const Operator bracket = commutator(c, structure_operator.adjoint());
  Operator out = Operator::Zero(dim, dim);
  for (Index slot = 0; slot < slots; ++slot) {
    out += bracket.block(slot * dim, slot * dim, dim, dim);
  }
  return out;
}

Complex GeometricRepresentation::weighted_inner(const Operator& a, const Operator& b) const {
  if (pairs == 0) return 0.0;
  return hs_inner_product(a, kubo_integral(weight, b));
}

}  // namespace qtur

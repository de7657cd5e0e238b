#include "qtur/lindblad_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qtur/error.hpp"

namespace qtur {

namespace {

void require_dim(const Operator& a, Index dim, const char* what) {
  if (a.rows() != dim || a.cols() != dim) {
    throw Error(ErrorCode::kDimMismatch, std::string(what) + " must be " + std::to_string(dim) +
                                             "x" + std::to_string(dim));
  }
}

}  // namespace

LindbladModel::LindbladModel(Operator hamiltonian, std::vector<JumpPair> jump_pairs)
    : hamiltonian_(std::move(hamiltonian)), jump_pairs_(std::move(jump_pairs)) {
  if (hamiltonian_.rows() < 1 || hamiltonian_.rows() != hamiltonian_.cols()) {
    throw Error(ErrorCode::kDimMismatch, "hamiltonian must be a non-empty square matrix");
  }
  if (!hamiltonian_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "hamiltonian has non-finite entries");
  }
  if (!is_hermitian(hamiltonian_)) {
    throw Error(ErrorCode::kNotHermitian, "hamiltonian is not Hermitian");
  }
  hamiltonian_ = hermitian_part(hamiltonian_);

  const Index d = dim();
  decay_ = Operator::Zero(d, d);
  jumps_.reserve(2 * jump_pairs_.size());
  entropy_currents_.reserve(2 * jump_pairs_.size());
  for (const auto& pair : jump_pairs_) {
    require_dim(pair.forward, d, "jump operator");
    require_dim(pair.backward, d, "jump operator");
    if (!pair.forward.allFinite() || !pair.backward.allFinite() ||
        !std::isfinite(pair.entropy_current)) {
      throw Error(ErrorCode::kInvalidArgument, "jump pair has non-finite data");
    }
    jumps_.push_back(pair.forward);
    jumps_.push_back(pair.backward);
    entropy_currents_.push_back(pair.entropy_current);
    entropy_currents_.push_back(-pair.entropy_current);
    decay_ += pair.forward.adjoint() * pair.forward + pair.backward.adjoint() * pair.backward;
  }
}

QuantumState::QuantumState(Operator rho, double tol) : rho_(std::move(rho)) {
  if (rho_.rows() < 1 || rho_.rows() != rho_.cols()) {
    throw Error(ErrorCode::kDimMismatch, "density matrix must be a non-empty square matrix");
  }
  if (!rho_.allFinite()) {
    throw Error(ErrorCode::kInvalidState, "density matrix has non-finite entries");
  }
  if (hermiticity_defect(rho_) > tol) {
    throw Error(ErrorCode::kInvalidState, "density matrix is not Hermitian");
  }
  rho_ = hermitian_part(rho_);
  const double trace = rho_.trace().real();
  if (std::abs(trace - 1.0) > tol) {
    throw Error(ErrorCode::kInvalidState, "density matrix trace is " + std::to_string(trace));
  }
  Eigen::SelfAdjointEigenSolver<Operator> solver(rho_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol) {
    throw Error(ErrorCode::kInvalidState, "density matrix has a negative eigenvalue " +
                                              std::to_string(solver.eigenvalues().minCoeff()));
  }
}

bool DetailedBalanceReport::passed() const {
  return std::all_of(residuals.begin(), residuals.end(),
                     [this](double r) { return r <= tolerance; });
}

double DetailedBalanceReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

DetailedBalanceReport validate_local_detailed_balance(const LindbladModel& model, double tol) {
  DetailedBalanceReport report;
  report.tolerance = tol;
  for (const auto& pair : model.jump_pairs()) {
    const Operator predicted = std::exp(0.5 * pair.entropy_current) * pair.backward.adjoint();
    report.residuals.push_back((pair.forward - predicted).norm());
  }
  return report;
}

PairDecomposition decompose_pair(const JumpPair& pair) {
  const double norm = pair.forward.norm();
  if (norm == 0.0) {
    throw Error(ErrorCode::kDegeneratePair, "forward jump operator vanishes");
  }
  const double residual =
      (pair.forward - std::exp(0.5 * pair.entropy_current) * pair.backward.adjoint()).norm();
  if (residual > 1e-8) {
    throw Error(ErrorCode::kDetailedBalanceViolated,
                "pair fails local detailed balance (residual " + std::to_string(residual) + ")");
  }
  PairDecomposition out;
  out.gamma_forward = norm * norm;
  out.gamma_backward = out.gamma_forward * std::exp(-pair.entropy_current);
  out.normalized = pair.forward / norm;
  return out;
}

Operator apply_dissipator(const LindbladModel& model, const Operator& rho) {
  require_dim(rho, model.dim(), "operand");
  Operator out = -0.5 * anticommutator(model.decay_operator(), rho);
  for (const auto& l : model.jumps()) {
    out.noalias() += l * rho * l.adjoint();
  }
  return out;
}

Operator apply_adjoint_dissipator(const LindbladModel& model, const Operator& a) {
  require_dim(a, model.dim(), "operand");
  Operator out = -0.5 * anticommutator(model.decay_operator(), a);
  for (const auto& l : model.jumps()) {
    out.noalias() += l.adjoint() * a * l;
  }
  return out;
}

Operator apply_liouvillian(const LindbladModel& model, const Operator& rho) {
  const Complex i(0.0, 1.0);
  return -i * commutator(model.hamiltonian(), rho) + apply_dissipator(model, rho);
}

Operator apply_adjoint_liouvillian(const LindbladModel& model, const Operator& a) {
  const Complex i(0.0, 1.0);
  return i * commutator(model.hamiltonian(), a) + apply_adjoint_dissipator(model, a);
}

Eigen::MatrixXcd liouvillian_superoperator(const LindbladModel& model) {
  // vec(A X B) = (B^T kron A) vec(X), column-major.
  const Index d = model.dim();
  const Index d2 = d * d;
  const Complex i(0.0, 1.0);
  const Operator id = Operator::Identity(d, d);
  auto kron = [d, d2](const Operator& left, const Operator& right) {
    Eigen::MatrixXcd out(d2, d2);
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) {
        out.block(r * d, c * d, d, d) = left(r, c) * right;
      }
    }
    return out;
  };
  const Operator& h = model.hamiltonian();
  const Operator& k = model.decay_operator();
  Eigen::MatrixXcd m = -i * kron(id, h) + i * kron(h.transpose(), id);
  m -= 0.5 * (kron(id, k) + kron(k.transpose(), id));
  for (const auto& l : model.jumps()) {
    m += kron(l.conjugate(), l);
  }
  return m;
}

}  // namespace qtur

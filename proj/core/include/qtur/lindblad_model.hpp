#pragma once

#include <memory>
#include <vector>

#include "qtur/operator_algebra.hpp"

namespace qtur {

/// A jump L_k together with its counterpart L_{-k}. The entropy current s_k
/// belongs to the forward member; the backward member carries -s_k.
struct JumpPair {
  Operator forward;
  Operator backward;
  double entropy_current = 0.0;
};

/// Hamiltonian plus paired jump operators defining
///   L(rho) = -i[H, rho] + sum_k L_k rho L_k^dagger - 1/2 {L_k^dagger L_k, rho}
/// where the sum runs over both members of every pair.
class LindbladModel {
 public:
  LindbladModel(Operator hamiltonian, std::vector<JumpPair> jump_pairs);

  Index dim() const { return hamiltonian_.rows(); }
  const Operator& hamiltonian() const { return hamiltonian_; }
  const std::vector<JumpPair>& jump_pairs() const { return jump_pairs_; }

  /// Flattened jump list: forward_0, backward_0, forward_1, backward_1, ...
  const std::vector<Operator>& jumps() const { return jumps_; }
  /// Entropy current of each entry of jumps(): s_0, -s_0, s_1, -s_1, ...
  const std::vector<double>& jump_entropy_currents() const { return entropy_currents_; }
  /// sum_k L_k^dagger L_k over all jumps.
  const Operator& decay_operator() const { return decay_; }

 private:
  Operator hamiltonian_;
  std::vector<JumpPair> jump_pairs_;
  std::vector<Operator> jumps_;
  std::vector<double> entropy_currents_;
  Operator decay_;
};

/// Density matrix validated on construction: Hermitian to 1e-10, trace one to
/// 1e-10, eigenvalues >= -1e-10. Stored Hermitian-symmetrized.
class QuantumState {
 public:
  explicit QuantumState(Operator rho, double tol = 1e-10);

  Index dim() const { return rho_.rows(); }
  const Operator& matrix() const { return rho_; }

 private:
  Operator rho_;
};

struct DetailedBalanceReport {
  std::vector<double> residuals;  // ||L_k - e^{s_k/2} L_{-k}^dagger||_HS per pair
  double tolerance = 0.0;

  bool passed() const;
  double max_residual() const;
};

DetailedBalanceReport validate_local_detailed_balance(const LindbladModel& model, double tol = 1e-8);

/// L_k = sqrt(gamma_forward) Ltilde, L_{-k} = sqrt(gamma_backward) Ltilde^dagger
/// with ||Ltilde||_HS = 1.
struct PairDecomposition {
  double gamma_forward = 0.0;
  double gamma_backward = 0.0;
  Operator normalized;
};

PairDecomposition decompose_pair(const JumpPair& pair);

Operator apply_dissipator(const LindbladModel& model, const Operator& rho);
Operator apply_adjoint_dissipator(const LindbladModel& model, const Operator& a);
Operator apply_liouvillian(const LindbladModel& model, const Operator& rho);
Operator apply_adjoint_liouvillian(const LindbladModel& model, const Operator& a);

/// Column-major vectorization of the generator: vec(L(rho)) = M vec(rho).
/// The adjoint generator is M^dagger.
Eigen::MatrixXcd liouvillian_superoperator(const LindbladModel& model);

enum class Picture { kSchrodinger, kHeisenberg };

struct PropagationOptions {
  /// Up to this dimension the vectorized generator is exponentiated exactly;
  /// above it an adaptive Dormand-Prince 5(4) integrator is used.
  Index exact_dim_limit = 24;
  double rtol = 1e-10;
  double atol = 1e-13;
  long max_steps = 1'000'000;
};

/// e^{L t} (Schrodinger) or e^{L^dagger t} (Heisenberg) for a fixed model and
/// time, reusable across many operands.
class Propagator {
 public:
  Propagator(const LindbladModel& model, double t, Picture picture,
             PropagationOptions options = {});

  Operator apply(const Operator& a) const;
  double time() const { return t_; }

 private:
  Operator integrate(const Operator& a) const;
  Operator generator(const Operator& a) const;

  LindbladModel model_;
  double t_;
  Picture picture_;
  PropagationOptions options_;
  std::shared_ptr<const Eigen::MatrixXcd> exact_;
};

/// e^{L t} rho0, re-symmetrized and trace-renormalized.
QuantumState propagate(const LindbladModel& model, const QuantumState& rho0, double t,
                       PropagationOptions options = {});

/// e^{L^dagger dt} X.
Operator heisenberg_propagate(const LindbladModel& model, const Operator& x, double dt,
                              PropagationOptions options = {});

}  // namespace qtur

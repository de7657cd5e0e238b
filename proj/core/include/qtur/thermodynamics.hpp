#pragma once

#include <vector>

#include "qtur/lindblad_model.hpp"
#include "qtur/operator_algebra.hpp"

namespace qtur {

struct CurrentDecomposition {
  double hamiltonian_part = 0.0;  // J^H = i tr([H, X] rho)
  double dissipative_part = 0.0;  // J^d = tr(X D(rho))

  double total() const { return hamiltonian_part + dissipative_part; }
};

CurrentDecomposition currents(const LindbladModel& model, const QuantumState& rho,
                              const Operator& x);

/// Rank-deficient states are regularized as rho <- (1 - d eps) rho + eps I
/// whenever their smallest eigenvalue falls below eps. With flooring disabled
/// such states raise kSingularState.
struct EntropyOptions {
  double eigenvalue_floor = 1e-12;
  bool flooring = true;
};

struct RegularizedState {
  Operator rho;
  bool floored = false;
  double floor = 0.0;
  double min_eigenvalue = 0.0;
};

RegularizedState regularize_state(const QuantumState& rho, const EntropyOptions& options);

/// sigma = -tr(L(rho) ln rho) + sum_k s_k tr(L_k^dagger L_k rho), summed over
/// both members of every pair.
double entropy_production_rate(const LindbladModel& model, const QuantumState& rho,
                               const EntropyOptions& options = {});

/// D_X = 1/2 tr(rho (D^dagger(X^2) - {D^dagger(X), X})).
double quantum_diffusivity(const LindbladModel& model, const QuantumState& rho,
                           const Operator& x);

struct TURReport {
  double epr = 0.0;
  double current = 0.0;      // J^d
  double fluctuation = 0.0;  // m_X
  double bound = 0.0;        // 2 |J^d|^2 / m_X
  double slack = 0.0;        // epr - bound
  double diffusivity = 0.0;  // D_X
  /// |tr(X D(rho))|^2 / D_X, computed independently of `bound`.
  double diffusivity_bound = 0.0;
  bool floored = false;
  double eigenvalue_floor = 0.0;

  /// slack >= -1e-9 max(epr, 1)
  bool satisfied() const;
};

/// Fluctuations at or below this value count as zero.
inline constexpr double kZeroFluctuation = 1e-14;

/// Evaluates sigma >= 2|J^d|^2 / m_X on the (possibly floored) state. All
/// quantities are computed on the same regularized state.
TURReport tur_check(const LindbladModel& model, const QuantumState& rho, const Operator& x,
                    const EntropyOptions& options = {});

/// Block operators on C^{2K} (x) H for K jump pairs. Pair k occupies the 2x2
/// block (2k, 2k+1); the first slot carries the forward weight gamma_k/2.
struct GeometricRepresentation {
  Index dim = 0;            // dimension of H
  std::size_t pairs = 0;    // K
  Operator current_operator;
  Operator force_operator;
  Operator weight;             // Gamma (x) rho
  Operator structure_operator;  // B
  std::vector<double> gamma_forward;
  std::vector<double> gamma_backward;

  /// <J, F>
  Complex epr_inner_product() const;
  /// <F, S_{Gamma (x) rho}(F)>
  Complex epr_weighted_norm() const;
  /// ||S_{Gamma (x) rho}(F) - J||_HS
  double onsager_residual() const;

  /// grad_B A = [I (x) A, B]
  Operator gradient(const Operator& a) const;
  /// Hilbert-Schmidt adjoint of the gradient.
  Operator gradient_adjoint(const Operator& c) const;
  /// <A, B>_G = <A, S_G(B)> with G = Gamma (x) rho.
  Complex weighted_inner(const Operator& a, const Operator& b) const;
};

/// Requires a full-rank state (kSingularState) and decomposable pairs.
GeometricRepresentation geometric_representation(const LindbladModel& model,
                                                 const QuantumState& rho);

}  // namespace qtur

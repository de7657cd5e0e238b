#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qtur/lindblad_model.hpp"
#include "qtur/operator_algebra.hpp"
#include "qtur/quasiprobability.hpp"
#include "qtur/thermodynamics.hpp"

namespace qtur {

/// One degenerate eigenvalue x_s with an orthonormal basis {|s,j>} of its
/// eigenspace (columns).
struct BasisGroup {
  double value = 0.0;
  Eigen::MatrixXcd vectors;
};

class DegenerateBasis {
 public:
  explicit DegenerateBasis(std::vector<BasisGroup> groups);

  /// Groups from the eigenvalue classes of X (numerical merging).
  static DegenerateBasis from_observable(const Operator& x,
                                         std::optional<double> degeneracy_tol = std::nullopt);

  Index dim() const { return dim_; }
  const std::vector<BasisGroup>& groups() const { return groups_; }
  /// All basis vectors as columns, group by group.
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  /// Group index of every column of matrix().
  const std::vector<std::size_t>& group_of_column() const { return group_of_; }
  std::vector<double> group_values() const;

  /// Throws kBasisMismatch unless X|s,j> = x_s|s,j> to `tol`.
  void validate_for(const Operator& x, double tol = 1e-9) const;

  /// Every basis vector as its own label; used with the quasiprobability module.
  ObservableDecomposition resolved() const;

 private:
  Index dim_ = 0;
  std::vector<BasisGroup> groups_;
  Eigen::MatrixXcd matrix_;
  std::vector<std::size_t> group_of_;
};

/// T_{ab} for every pair of basis vectors, rows = final vector a, columns =
/// initial vector b. Evaluated in O(K d^2) after transforming the model into
/// the basis.
Eigen::MatrixXd basis_flux_matrix(const LindbladModel& model, const QuantumState& rho,
                                  const Eigen::MatrixXcd& basis);

struct IntegratedFluxMatrix {
  std::vector<double> group_values;
  /// Integrated flux from group s (column) to group s' (row); the diagonal
  /// omits j = j'.
  Eigen::MatrixXd values;
  double escape_rate = 0.0;

  /// sum_{s,s'} (x_s - x_s')^2 T_{s's}
  double m_x() const;
  double min_value() const { return values.minCoeff(); }
  double total() const { return values.sum(); }
};

/// Throws kBasisMismatch when `x` is given and the basis is not its eigenbasis.
IntegratedFluxMatrix integrated_fluxes(const LindbladModel& model, const QuantumState& rho,
                                       const DegenerateBasis& basis,
                                       const std::optional<Operator>& x = std::nullopt);

struct TransitionClassicality {
  Index from = 0;  // column index in the basis
  Index to = 0;
  double max_magnitude = 0.0;
  int jump_count = 0;
};

struct ClassicalityReport {
  double magnitude_bound = 0.0;
  int count_bound = 0;
  double max_magnitude = 0.0;
  int max_count = 0;
  /// Only transitions with at least one nonzero matrix element.
  std::vector<TransitionClassicality> transitions;

  bool classical() const {
    return max_magnitude <= magnitude_bound && max_count <= count_bound;
  }
};

/// Matrix elements below this magnitude count as absent.
inline constexpr double kMatrixElementZero = 1e-12;

ClassicalityReport classify_basis_classicality(const LindbladModel& model,
                                               const DegenerateBasis& basis,
                                               double magnitude_bound, int count_bound);

/// sum over off-diagonal |<a|rho|b>| in the basis.
double l1_coherence(const Operator& rho, const Eigen::MatrixXcd& basis);

// ---------------------------------------------------------------------------
// Collective two-group model

struct CollectiveModelParams {
  int n_levels = 1;
  double omega = 1.0;
  double gamma_plus = 1.0;
  double gamma_minus = 1.0;
  double p_g = 0.5;

  /// Throws kInvalidArgument.
  void validate() const;
  double p_e() const { return 1.0 - p_g; }
};

enum class CollectiveState { kPlus, kMinus, kClassical };

std::string to_string(CollectiveState state);
CollectiveState parse_collective_state(const std::string& text);

/// Index of |g,j> is j-1 and of |e,j> is N+j-1 (j = 1..N).
LindbladModel build_collective_model(const CollectiveModelParams& params);
QuantumState build_plus_minus_state(const CollectiveModelParams& params, CollectiveState sign);
/// diag(p_g/N, ..., p_e/N, ...)
QuantumState build_classical_state(const CollectiveModelParams& params);
QuantumState build_collective_state(const CollectiveModelParams& params, CollectiveState kind);

/// {|g,j>}, {|e,j>} with x_g = 0, x_e = omega.
DegenerateBasis product_basis(const CollectiveModelParams& params);
/// N^{-1/2} sum_j e^{2 pi i j k / N} |s,j>; k = 0 gives |s,+>.
DegenerateBasis fourier_basis(const CollectiveModelParams& params);
/// Independent Haar-random unitary rotation inside every group.
DegenerateBasis random_group_rotation(const DegenerateBasis& basis, std::mt19937_64& rng);

int parity_remainder(int n);

struct ClosedFormFluxes {
  double t_eg = 0.0;
  double t_gg = 0.0;
  double t_ge = 0.0;
  double t_ee = 0.0;
  double escape_rate = 0.0;
  double m_h = 0.0;
};

/// Closed forms for rho^+ and rho^- in the product basis. kClassical is rejected.
ClosedFormFluxes closed_form_reference(const CollectiveModelParams& params,
                                       CollectiveState sign);

// ---------------------------------------------------------------------------
// Scaling sweeps

struct ExponentFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Least-squares fit of log max(y, floor) = a + b log x. Throws
/// kInsufficientPoints for fewer than two points.
ExponentFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          double floor);

enum class BasisKind { kProduct, kFourier, kRandom };

std::string to_string(BasisKind kind);

struct SweepPoint {
  int n = 0;
  double p_g = 0.0;
  double m_x = 0.0;
  double escape_rate = 0.0;
  double min_integrated_flux = 0.0;
  double current = 0.0;  // J^d of X = H
  double epr = 0.0;      // on the floored state
  double bound = 0.0;    // 2 |J^d|^2 / m_X
  double l1_coherence = 0.0;
  double total_integrated_flux = 0.0;
};

struct SweepOptions {
  CollectiveModelParams params;  // n_levels is overridden by n_values
  std::vector<int> n_values;
  CollectiveState state = CollectiveState::kPlus;
  BasisKind basis = BasisKind::kProduct;
  /// When set, p_g(N) = (gamma_minus + bias / N) / (gamma_plus + gamma_minus),
  /// which makes gamma_plus p_g - gamma_minus p_e = bias / N.
  std::optional<double> bias;
  double eigenvalue_floor = 1e-12;
  /// Positive-series floor for the log-log fits.
  double fit_floor = 1e-12;
  std::uint64_t seed = 20240601;
  unsigned workers = 1;
};

struct ScalingSweepReport {
  SweepOptions options;
  std::vector<SweepPoint> points;
  ExponentFit m_x_fit;
  ExponentFit escape_rate_fit;
  ExponentFit current_fit;  // |J^d|
  ExponentFit bound_fit;
  ExponentFit epr_fit;
};

/// Throws kInsufficientPoints for fewer than two N values or a non-ascending
/// list.
ScalingSweepReport scaling_sweep(const SweepOptions& options);

struct ConditionVerdict {
  ExponentFit fit;
  bool satisfied = false;
};

struct QDiagnostics {
  ConditionVerdict q1;  // slope of max(-min T, floor) / N
  ConditionVerdict q2;  // slope of escape_rate / N
  double slope_threshold = 0.5;
  double r_squared_threshold = 0.99;

  bool neither() const { return !q1.satisfied && !q2.satisfied; }
};

/// Requires at least four sweep points (kInsufficientPoints).
QDiagnostics q1_q2_diagnostics(const ScalingSweepReport& sweep);

}  // namespace qtur

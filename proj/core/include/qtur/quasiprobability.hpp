#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qtur/lindblad_model.hpp"
#include "qtur/operator_algebra.hpp"

namespace qtur {

/// An observable X = sum_x x Pi_x resolved into labelled projectors. Labels
/// are eigenvalue classes by default; `from_basis` resolves every basis vector
/// into its own label (used for degenerate-basis and classical-state tables).
class ObservableDecomposition {
 public:
  struct Label {
    double value = 0.0;
    Eigen::MatrixXcd vectors;  // orthonormal columns spanning the label's range
  };

  static ObservableDecomposition from_operator(const Operator& x,
                                               std::optional<double> degeneracy_tol = std::nullopt);
  /// Each column of `basis` (orthonormal, complete) becomes one label with
  /// the matching entry of `values`.
  static ObservableDecomposition from_basis(const std::vector<double>& values,
                                            const Eigen::MatrixXcd& basis);
  static ObservableDecomposition from_labels(std::vector<Label> labels);

  Index dim() const { return dim_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }
  const Operator& observable() const { return observable_; }
  const Operator& projector(std::size_t i) const { return projectors_[i]; }
  std::vector<double> values() const;

  /// sum_x f(x) Pi_x.
  Operator apply(const std::function<Complex(double)>& f) const;

 private:
  explicit ObservableDecomposition(std::vector<Label> labels);

  Index dim_ = 0;
  std::vector<Label> labels_;
  std::vector<Operator> projectors_;
  Operator observable_;
};

/// q(y, t+dt; x, t) with rows indexed by the final label y and columns by the
/// initial label x.
struct QuasiprobTable {
  std::vector<double> initial_values;
  std::vector<double> final_values;
  Eigen::MatrixXd values;
  double delta_t = 0.0;

  double min_entry() const { return values.minCoeff(); }
};

/// T_yx, rows = final label y, columns = initial label x.
struct FluxMatrix {
  std::vector<double> labels;
  Eigen::MatrixXd values;
};

enum class MomentMethod { kFluxSum, kOperatorExpression, kGeneratingFunctionFd };

std::string to_string(MomentMethod method);

struct MomentReport {
  int order = 0;
  double value = 0.0;
  MomentMethod method = MomentMethod::kFluxSum;
};

/// Largest imaginary part tolerated in q or T before raising kImaginaryResidue.
inline constexpr double kImaginaryResidueTolerance = 1e-10;

/// q(y;x) = 1/2 tr({e^{L^dagger dt} Pi_y, Pi_x} rho).
QuasiprobTable tmh_table(const LindbladModel& model, const QuantumState& rho,
                         const ObservableDecomposition& x, double delta_t,
                         PropagationOptions options = {});

/// sum_{x,y} (y - x)^n q(y;x).
double table_moment(const QuasiprobTable& table, int order);

/// G(lambda, dt) = 1/2 tr({e^{L^dagger dt} e^{i lambda X}, e^{-i lambda X}} rho).
Complex generating_function(const LindbladModel& model, const QuantumState& rho,
                            const ObservableDecomposition& x, double lambda, double delta_t,
                            PropagationOptions options = {});

/// (-i d/dlambda)^n G(lambda, dt) at lambda = 0 by a central finite difference.
MomentReport generating_function_moment(const LindbladModel& model, const QuantumState& rho,
                                        const ObservableDecomposition& x, int order,
                                        double delta_t, PropagationOptions options = {});

/// T_yx(rho) = 1/2 tr({L^dagger Pi_y, Pi_x} rho).
FluxMatrix flux_matrix(const LindbladModel& model, const QuantumState& rho,
                       const ObservableDecomposition& x);

/// m^(n) = sum_{x,y} (y - x)^n T_yx.
MomentReport short_time_moment(const FluxMatrix& flux, int order);

/// m_X = tr(L^dagger(X^2) rho) - tr({L^dagger(X), X} rho).
MomentReport short_time_fluctuation_operator_form(const LindbladModel& model,
                                                  const QuantumState& rho, const Operator& x);

/// Same expression with the adjoint dissipator in place of the adjoint generator.
double short_time_fluctuation_dissipative_form(const LindbladModel& model,
                                               const QuantumState& rho, const Operator& x);

/// lambda_bar = -sum_x T_xx.
double escape_rate(const FluxMatrix& flux);

}  // namespace qtur

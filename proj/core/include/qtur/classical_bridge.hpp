#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qtur/lindblad_model.hpp"
#include "qtur/operator_algebra.hpp"
#include "qtur/thermodynamics.hpp"

namespace qtur {

/// Transition-rate generator, R_ji = rate i -> j. Off-diagonal entries are
/// non-negative and every column sums to zero (1e-12 relative to max|R|).
class RateMatrix {
 public:
  explicit RateMatrix(Eigen::MatrixXd r);
  Index dim() const { return r_.rows(); }
  const Eigen::MatrixXd& matrix() const { return r_; }

 private:
  Eigen::MatrixXd r_;
};

/// Entries >= -1e-12, sum 1 to 1e-12.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Eigen::VectorXd p);
  Index dim() const { return p_.size(); }
  const Eigen::VectorXd& vector() const { return p_; }

 private:
  Eigen::VectorXd p_;
};

class ClassicalObservable {
 public:
  explicit ClassicalObservable(Eigen::VectorXd f);
  Index dim() const { return f_.size(); }
  const Eigen::VectorXd& vector() const { return f_; }

 private:
  Eigen::VectorXd f_;
};

/// e^{R t}.
Eigen::MatrixXd classical_transition_matrix(const RateMatrix& r, double t);

/// p(t) = e^{R t} p0, clipped at zero and renormalized against rounding.
ProbabilityVector classical_propagate(const RateMatrix& r, const ProbabilityVector& p0, double t);

/// [e^{R dt}]_ji p_i, rows = final state j, columns = initial state i.
Eigen::MatrixXd classical_joint_table(const RateMatrix& r, const ProbabilityVector& p, double dt);

/// sum_{i,j} (f_j - f_i)^n [e^{R dt}]_ji p_i
double classical_joint_moment(const RateMatrix& r, const ProbabilityVector& p,
                              const ClassicalObservable& f, int order, double dt);

/// <e^{L_cl^dagger dt}(e^{i lambda f}) e^{-i lambda f}> with L_cl^dagger(f) = R^T f;
/// exponentials and products are entrywise.
Complex classical_generating_function(const RateMatrix& r, const ProbabilityVector& p,
                                      const ClassicalObservable& f, double lambda, double dt);

/// sum_{i,j} (f_j - f_i)^2 R_ji p_i
double classical_short_time_second_moment(const RateMatrix& r, const ProbabilityVector& p,
                                          const ClassicalObservable& f);

/// <L_cl^dagger(f^2) - 2 L_cl^dagger(f) f>
double classical_short_time_second_moment_operator_form(const RateMatrix& r,
                                                        const ProbabilityVector& p,
                                                        const ClassicalObservable& f);

/// <f, R p>
double classical_current(const RateMatrix& r, const ProbabilityVector& p,
                         const ClassicalObservable& f);

struct ClassicalEmbedding {
  std::optional<LindbladModel> model;
  QuantumState rho;
  Operator x;
  /// Directed edges without a reverse rate; they enter with a zero partner
  /// jump and zero entropy current.
  std::vector<std::pair<Index, Index>> irreversible_edges;

  bool reversible() const { return irreversible_edges.empty(); }
};

/// H = 0, one jump sqrt(R_ji) |j><i| per directed edge paired with its
/// reverse (s = ln(R_ji / R_ij)), rho = diag(p), X = diag(f).
ClassicalEmbedding embed_classical(const RateMatrix& r, const ProbabilityVector& p,
                                   const ClassicalObservable& f);

struct QuantizationOptions {
  std::vector<double> table_steps = {0.01, 0.1};
  /// Empty selects 21 points in [-pi / spread, pi / spread].
  std::vector<double> lambda_grid;
  double generating_dt = 0.1;
  /// Raise kIrreversibleRate instead of flagging irreversible edges.
  bool require_reversible = false;
  EntropyOptions entropy;
};

struct QuantizationReport {
  double m_quantum = 0.0;
  double m_classical = 0.0;
  double m_residual = 0.0;
  std::vector<double> table_steps;
  std::vector<double> table_residuals;  // max entrywise |q - classical joint|
  double min_table_entry = 0.0;
  std::vector<double> lambda_grid;
  double generating_residual = 0.0;  // max |G_t - G^cl| over the grid
  bool irreversible = false;
  /// Classical TUR quantities; absent for irreversible chains.
  std::optional<TURReport> tur;
  double classical_current = 0.0;

  double max_residual() const;
};

QuantizationReport quantize_and_compare(const RateMatrix& r, const ProbabilityVector& p,
                                        const ClassicalObservable& f,
                                        const QuantizationOptions& options = {});

}  // namespace qtur

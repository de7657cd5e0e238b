#include "qtur/classical_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "qtur/error.hpp"
#include "qtur/quasiprobability.hpp"

namespace qtur {

RateMatrix::RateMatrix(Eigen::MatrixXd r) : r_(std::move(r)) {
  if (r_.rows() != r_.cols() || r_.rows() < 1) {
    throw Error(ErrorCode::kDimMismatch, "rate matrix must be square and non-empty");
  }
  if (!r_.allFinite()) throw Error(ErrorCode::kInvalidArgument, "rate matrix must be finite");
  const double scale = std::max(1.0, r_.cwiseAbs().maxCoeff());
  for (Index j = 0; j < r_.cols(); ++j) {
    for (Index i = 0; i < r_.rows(); ++i) {
      if (i != j && r_(i, j) < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "off-diagonal rates must be non-negative");
      }
    }
    if (std::abs(r_.col(j).sum()) > 1e-12 * scale) {
      throw Error(ErrorCode::kInvalidArgument, "rate matrix columns must sum to zero");
    }
  }
}

ProbabilityVector::ProbabilityVector(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() < 1 || !p_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "probability vector must be finite and non-empty");
  }
  if (p_.minCoeff() < -1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "probabilities must be non-negative");
  }
  if (std::abs(p_.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "probabilities must sum to one");
  }
}

ClassicalObservable::ClassicalObservable(Eigen::VectorXd f) : f_(std::move(f)) {
  if (f_.size() < 1 || !f_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "classical observable must be finite and non-empty");
  }
}

namespace {

void require_dims(const RateMatrix& r, const ProbabilityVector& p) {
  if (r.dim() != p.dim()) throw Error(ErrorCode::kDimMismatch, "rate matrix and p differ in size");
}

void require_dims(const RateMatrix& r, const ProbabilityVector& p, const ClassicalObservable& f) {
  require_dims(r, p);
  if (f.dim() != r.dim()) throw Error(ErrorCode::kDimMismatch, "observable has the wrong size");
}

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "time must be finite and >= 0");
  }
}

}  // namespace

Eigen::MatrixXd classical_transition_matrix(const RateMatrix& r, double t) {
  require_time(t);
  if (t == 0.0) return Eigen::MatrixXd::Identity(r.dim(), r.dim());
  const Eigen::MatrixXd scaled = r.matrix() * t;
  return scaled.exp();
}

ProbabilityVector classical_propagate(const RateMatrix& r, const ProbabilityVector& p0, double t) {
  require_dims(r, p0);
  if (t == 0.0) return p0;
  Eigen::VectorXd p = classical_transition_matrix(r, t) * p0.vector();
  p = p.cwiseMax(0.0);
  p /= p.sum();
  return ProbabilityVector(std::move(p));
}

Eigen::MatrixXd classical_joint_table(const RateMatrix& r, const ProbabilityVector& p, double dt) {
  require_dims(r, p);
  return classical_transition_matrix(r, dt) * p.vector().asDiagonal();
}

double classical_joint_moment(const RateMatrix& r, const ProbabilityVector& p,
                              const ClassicalObservable& f, int order, double dt) {
  require_dims(r, p, f);
  if (order < 0) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 0");
  const Eigen::MatrixXd joint = classical_joint_table(r, p, dt);
  const Eigen::VectorXd& fv = f.vector();
  double sum = 0.0;
  for (Index i = 0; i < joint.cols(); ++i) {
    for (Index j = 0; j < joint.rows(); ++j) sum += std::pow(fv(j) - fv(i), order) * joint(j, i);
  }
  return sum;
}

Complex classical_generating_function(const RateMatrix& r, const ProbabilityVector& p,
                                      const ClassicalObservable& f, double lambda, double dt) {
  require_dims(r, p, f);
  const Complex i(0.0, 1.0);
  const Eigen::VectorXcd forward = (i * lambda * f.vector().cast<Complex>()).array().exp();
  const Eigen::VectorXcd evolved =
      classical_transition_matrix(r, dt).transpose().cast<Complex>() * forward;
  Complex sum = 0.0;
  for (Index k = 0; k < p.dim(); ++k) sum += p.vector()(k) * evolved(k) * std::conj(forward(k));
  return sum;
}

double classical_short_time_second_moment(const RateMatrix& r, const ProbabilityVector& p,
                                          const ClassicalObservable& f) {
  require_dims(r, p, f);
  const Eigen::MatrixXd& rm = r.matrix();
  const Eigen::VectorXd& fv = f.vector();
  double sum = 0.0;
  for (Index i = 0; i < rm.cols(); ++i) {
    for (Index j = 0; j < rm.rows(); ++j) {
      if (i == j) continue;
      const double gap = fv(j) - fv(i);
      sum += gap * gap * rm(j, i) * p.vector()(i);
    }
  }
  return sum;
}

double classical_short_time_second_moment_operator_form(const RateMatrix& r,
                                                        const ProbabilityVector& p,
                                                        const ClassicalObservable& f) {
  require_dims(r, p, f);
  const Eigen::MatrixXd rt = r.matrix().transpose();
  const Eigen::VectorXd& fv = f.vector();
  const Eigen::VectorXd f2 = fv.cwiseProduct(fv);
  const Eigen::VectorXd integrand = rt * f2 - 2.0 * (rt * fv).cwiseProduct(fv);
  return p.vector().dot(integrand);
}

double classical_current(const RateMatrix& r, const ProbabilityVector& p,
                         const ClassicalObservable& f) {
  require_dims(r, p, f);
  return f.vector().dot(r.matrix() * p.vector());
}

ClassicalEmbedding embed_classical(const RateMatrix& r, const ProbabilityVector& p,
                                   const ClassicalObservable& f) {
  require_dims(r, p, f);
  const Index n = r.dim();
  const Eigen::MatrixXd& rm = r.matrix();
  std::vector<JumpPair> pairs;
  std::vector<std::pair<Index, Index>> irreversible;
  auto ket_bra = [n](Index to, Index from, double amplitude) {
    Operator op = Operator::Zero(n, n);
    op(to, from) = amplitude;
    return op;
  };
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double forward = rm(j, i);   // i -> j
      const double backward = rm(i, j);  // j -> i
      if (forward <= 0.0 && backward <= 0.0) continue;
      if (forward > 0.0 && backward > 0.0) {
        pairs.push_back({ket_bra(j, i, std::sqrt(forward)), ket_bra(i, j, std::sqrt(backward)),
                         std::log(forward / backward)});
      } else if (forward > 0.0) {
        irreversible.emplace_back(i, j);
        pairs.push_back({ket_bra(j, i, std::sqrt(forward)), Operator::Zero(n, n), 0.0});
      } else {
        irreversible.emplace_back(j, i);
        pairs.push_back({ket_bra(i, j, std::sqrt(backward)), Operator::Zero(n, n), 0.0});
      }
    }
  }
  Operator rho = p.vector().cast<Complex>().asDiagonal();
  Operator x = f.vector().cast<Complex>().asDiagonal();
  return {LindbladModel(Operator::Zero(n, n), std::move(pairs)), QuantumState(std::move(rho)),
          std::move(x), std::move(irreversible)};
}

double QuantizationReport::max_residual() const {
  double out = std::max(m_residual, generating_residual);
  for (double t : table_residuals) out = std::max(out, t);
  return out;
}

QuantizationReport quantize_and_compare(const RateMatrix& r, const ProbabilityVector& p,
                                        const ClassicalObservable& f,
                                        const QuantizationOptions& options) {
  const ClassicalEmbedding embedding = embed_classical(r, p, f);
  if (options.require_reversible && !embedding.reversible()) {
    const auto [from, to] = embedding.irreversible_edges.front();
    throw Error(ErrorCode::kIrreversibleRate, "edge " + std::to_string(from) + " -> " +
                                                  std::to_string(to) + " has no reverse rate");
  }
  const LindbladModel& model = *embedding.model;
  const Index n = r.dim();
  std::vector<double> values(f.vector().data(), f.vector().data() + n);
  // Labels are states, so degenerate f values stay resolved.
  const auto labels = ObservableDecomposition::from_basis(values, Eigen::MatrixXcd::Identity(n, n));

  QuantizationReport report;
  report.irreversible = !embedding.reversible();
  report.m_quantum = short_time_moment(flux_matrix(model, embedding.rho, labels), 2).value;
  report.m_classical = classical_short_time_second_moment(r, p, f);
  report.m_residual = std::abs(report.m_quantum - report.m_classical);

  report.table_steps = options.table_steps;
  report.min_table_entry = std::numeric_limits<double>::infinity();
  for (double dt : options.table_steps) {
    const QuasiprobTable table = tmh_table(model, embedding.rho, labels, dt);
    const Eigen::MatrixXd joint = classical_joint_table(r, p, dt);
    report.table_residuals.push_back((table.values - joint).cwiseAbs().maxCoeff());
    report.min_table_entry = std::min(report.min_table_entry, table.min_entry());
  }
  if (options.table_steps.empty()) report.min_table_entry = 0.0;

  report.lambda_grid = options.lambda_grid;
  if (report.lambda_grid.empty()) {
    const double spread = f.vector().maxCoeff() - f.vector().minCoeff();
    const double reach = std::numbers::pi / (spread > 0.0 ? spread : 1.0);
    for (int k = 0; k < 21; ++k) report.lambda_grid.push_back(-reach + reach * k / 10.0);
  }
  for (double lambda : report.lambda_grid) {
    const Complex quantum =
        generating_function(model, embedding.rho, labels, lambda, options.generating_dt);
    const Complex classical = classical_generating_function(r, p, f, lambda, options.generating_dt);
    report.generating_residual = std::max(report.generating_residual, std::abs(quantum - classical));
  }

  report.classical_current = classical_current(r, p, f);
  if (embedding.reversible()) report.tur = tur_check(model, embedding.rho, embedding.x, options.entropy);
  return report;
}

}  // namespace qtur

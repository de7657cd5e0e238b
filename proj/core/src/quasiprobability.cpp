#include "qtur/quasiprobability.hpp"

#include <algorithm>
#include <cmath>

#include "qtur/error.hpp"
#include "qtur/finite_difference.hpp"

namespace qtur {

namespace {

void require_compatible(const LindbladModel& model, const QuantumState& rho,
                        const ObservableDecomposition& x) {
  if (rho.dim() != model.dim() || x.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model, state and observable dimensions differ");
  }
}

double checked_real(Complex z, const char* what) {
  if (std::abs(z.imag()) > kImaginaryResidueTolerance) {
    throw Error(ErrorCode::kImaginaryResidue,
                std::string(what) + " has imaginary residue " + std::to_string(z.imag()));
  }
  return z.real();
}

// 1/2 tr({A, B} rho) = 1/2 (tr(A B rho) + tr(B A rho)).
Complex half_anticommutator_trace(const Operator& a, const Operator& b, const Operator& rho) {
  const Operator b_rho = b * rho;
  const Operator a_rho = a * rho;
  return 0.5 * ((a.transpose().cwiseProduct(b_rho)).sum() +
                (b.transpose().cwiseProduct(a_rho)).sum());
}

double power(double base, int n) {
  double out = 1.0;
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

}  // namespace

ObservableDecomposition::ObservableDecomposition(std::vector<Label> labels)
    : labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "observable decomposition needs at least one label");
  }
  dim_ = labels_.front().vectors.rows();
  Eigen::MatrixXcd all(dim_, 0);
  Index cols = 0;
  for (const auto& label : labels_) {
    if (label.vectors.rows() != dim_ || label.vectors.cols() < 1) {
      throw Error(ErrorCode::kDimMismatch, "observable label has inconsistent vectors");
    }
    cols += label.vectors.cols();
  }
  if (cols != dim_) {
    throw Error(ErrorCode::kBasisMismatch, "observable labels do not span the space");
  }
  all.resize(dim_, dim_);
  Index offset = 0;
  for (const auto& label : labels_) {
    all.middleCols(offset, label.vectors.cols()) = label.vectors;
    offset += label.vectors.cols();
  }
  const double defect = (all.adjoint() * all - Operator::Identity(dim_, dim_)).norm();
  if (defect > 1e-9) {
    throw Error(ErrorCode::kBasisMismatch, "observable label vectors are not orthonormal");
  }
  observable_ = Operator::Zero(dim_, dim_);
  projectors_.reserve(labels_.size());
  for (const auto& label : labels_) {
    projectors_.push_back(label.vectors * label.vectors.adjoint());
    observable_ += label.value * projectors_.back();
  }
}

ObservableDecomposition ObservableDecomposition::from_operator(const Operator& x,
                                                               std::optional<double> tol) {
  const auto spectrum = spectral_decompose(x, tol);
  std::vector<Label> labels;
  for (const auto& c : spectrum.classes()) labels.push_back({c.value, c.vectors});
  return ObservableDecomposition(std::move(labels));
}

ObservableDecomposition ObservableDecomposition::from_basis(const std::vector<double>& values,
                                                            const Eigen::MatrixXcd& basis) {
  if (static_cast<Index>(values.size()) != basis.cols()) {
    throw Error(ErrorCode::kDimMismatch, "one value per basis vector is required");
  }
  std::vector<Label> labels;
  for (Index j = 0; j < basis.cols(); ++j) labels.push_back({values[j], basis.col(j)});
  return ObservableDecomposition(std::move(labels));
}

ObservableDecomposition ObservableDecomposition::from_labels(std::vector<Label> labels) {
  return ObservableDecomposition(std::move(labels));
}

std::vector<double> ObservableDecomposition::values() const {
  std::vector<double> out;
  for (const auto& label : labels_) out.push_back(label.value);
  return out;
}

Operator ObservableDecomposition::apply(const std::function<Complex(double)>& f) const {
  Operator out = Operator::Zero(dim_, dim_);
  for (std::size_t i = 0; i < labels_.size(); ++i) out += f(labels_[i].value) * projectors_[i];
  return out;
}

std::string to_string(MomentMethod method) {
  switch (method) {
    case MomentMethod::kFluxSum: return "flux_sum";
    case MomentMethod::kOperatorExpression: return "operator_expression";
    case MomentMethod::kGeneratingFunctionFd: return "generating_function_fd";
  }
  return "unknown";
}

QuasiprobTable tmh_table(const LindbladModel& model, const QuantumState& rho,
                         const ObservableDecomposition& x, double delta_t,
                         PropagationOptions options) {
  require_compatible(model, rho, x);
  if (!(delta_t >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta_t must be >= 0");
  const Propagator heisenberg(model, delta_t, Picture::kHeisenberg, options);
  const std::size_t n = x.size();

  QuasiprobTable table;
  table.initial_values = x.values();
  table.final_values = table.initial_values;
  table.delta_t = delta_t;
  table.values.resize(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t y = 0; y < n; ++y) {
    const Operator evolved = heisenberg.apply(x.projector(y));
    for (std::size_t xi = 0; xi < n; ++xi) {
      table.values(static_cast<Index>(y), static_cast<Index>(xi)) = checked_real(
          half_anticommutator_trace(evolved, x.projector(xi), rho.matrix()), "quasiprobability");
    }
  }
  return table;
}

double table_moment(const QuasiprobTable& table, int order) {
  double sum = 0.0;
  for (Index y = 0; y < table.values.rows(); ++y) {
    for (Index x = 0; x < table.values.cols(); ++x) {
      sum += power(table.final_values[y] - table.initial_values[x], order) * table.values(y, x);
    }
  }
  return sum;
}

namespace {

Complex generating_function_with(const Propagator& heisenberg, const QuantumState& rho,
                                 const ObservableDecomposition& x, double lambda) {
  const Complex i(0.0, 1.0);
  const Operator forward = x.apply([&](double v) { return std::exp(i * lambda * v); });
  const Operator backward = forward.adjoint();
  return half_anticommutator_trace(heisenberg.apply(forward), backward, rho.matrix());
}

}  // namespace

Complex generating_function(const LindbladModel& model, const QuantumState& rho,
                            const ObservableDecomposition& x, double lambda, double delta_t,
                            PropagationOptions options) {
  require_compatible(model, rho, x);
  const Propagator heisenberg(model, delta_t, Picture::kHeisenberg, options);
  return generating_function_with(heisenberg, rho, x, lambda);
}

MomentReport generating_function_moment(const LindbladModel& model, const QuantumState& rho,
                                        const ObservableDecomposition& x, int order,
                                        double delta_t, PropagationOptions options) {
  require_compatible(model, rho, x);
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 1");
  const Propagator heisenberg(model, delta_t, Picture::kHeisenberg, options);
  const auto values = x.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double spread = std::max(*hi - *lo, 1e-12);
  // With half_width >= order/2 + 3 the truncation error at h * spread = 0.1
  // stays near 1e-8 relative while rounding is amplified only by 1/h^n.
  const double h = 0.1 / spread;
  const Complex d = central_derivative(
      [&](double lambda) { return generating_function_with(heisenberg, rho, x, lambda); }, 0.0,
      order, h, order / 2 + 3);
  // (-i)^n d^n G / d lambda^n
  Complex factor = 1.0;
  for (int k = 0; k < order; ++k) factor *= Complex(0.0, -1.0);
  return {order, (factor * d).real(), MomentMethod::kGeneratingFunctionFd};
}

FluxMatrix flux_matrix(const LindbladModel& model, const QuantumState& rho,
                       const ObservableDecomposition& x) {
  require_compatible(model, rho, x);
  const std::size_t n = x.size();
  FluxMatrix flux;
  flux.labels = x.values();
  flux.values.resize(static_cast<Index>(n), static_cast<Index>(n));
  // T_yx = tr(Pi_x M_y) with M_y = {L^dagger(Pi_y), rho} / 2, read off from
  // the eigenvectors of class x.
  for (std::size_t y = 0; y < n; ++y) {
    const Operator generated = apply_adjoint_liouvillian(model, x.projector(y));
    const Operator m = 0.5 * (generated * rho.matrix() + rho.matrix() * generated);
    for (std::size_t xi = 0; xi < n; ++xi) {
      const Eigen::MatrixXcd& v = x.labels()[xi].vectors;
      flux.values(static_cast<Index>(y), static_cast<Index>(xi)) =
          checked_real((v.adjoint() * m * v).trace(), "flux");
    }
  }
  return flux;
}

MomentReport short_time_moment(const FluxMatrix& flux, int order) {
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 1");
  double sum = 0.0;
  for (Index y = 0; y < flux.values.rows(); ++y) {
    for (Index x = 0; x < flux.values.cols(); ++x) {
      sum += power(flux.labels[y] - flux.labels[x], order) * flux.values(y, x);
    }
  }
  return {order, sum, MomentMethod::kFluxSum};
}

namespace {

double fluctuation_expression(const Operator& generated_square, const Operator& generated,
                              const Operator& x, const Operator& rho) {
  const Complex first = (generated_square * rho).trace();
  const Complex second = (anticommutator(generated, x) * rho).trace();
  return checked_real(first - second, "short-time fluctuation");
}

}  // namespace

MomentReport short_time_fluctuation_operator_form(const LindbladModel& model,
                                                  const QuantumState& rho, const Operator& x) {
  if (x.rows() != model.dim() || rho.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model, state and observable dimensions differ");
  }
  const Operator x2 = x * x;
  const double value =
      fluctuation_expression(apply_adjoint_liouvillian(model, x2),
                             apply_adjoint_liouvillian(model, x), x, rho.matrix());
  return {2, value, MomentMethod::kOperatorExpression};
}

double short_time_fluctuation_dissipative_form(const LindbladModel& model,
                                               const QuantumState& rho, const Operator& x) {
  if (x.rows() != model.dim() || rho.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model, state and observable dimensions differ");
  }
  const Operator x2 = x * x;
  return fluctuation_expression(apply_adjoint_dissipator(model, x2),
                                apply_adjoint_dissipator(model, x), x, rho.matrix());
}

double escape_rate(const FluxMatrix& flux) { return -flux.values.diagonal().sum(); }

}  // namespace qtur

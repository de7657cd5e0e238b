#include "qtur/fcs_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtur/error.hpp"
#include "qtur/finite_difference.hpp"
#include "qtur/parallel.hpp"

namespace qtur {

void CurrentObservableSpec::validate_for(const LindbladModel& model) const {
  if (weights.size() != model.jumps().size()) {
    throw Error(ErrorCode::kDimMismatch, "one weight per jump operator is required");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "weights must be finite");
  }
}

CommutationResult commutation_check(const LindbladModel& model, const Operator& x, double tol) {
  if (x.rows() != model.dim() || x.cols() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "observable and model dimensions differ");
  }
  CommutationResult out;
  out.tolerance = tol;
  const auto& jumps = model.jumps();
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const Operator& l = jumps[k];
    const double norm2 = l.squaredNorm();
    const Operator c = commutator(x, l);
    const double w = norm2 == 0.0 ? 0.0 : hs_inner_product(l, c).real() / norm2;
    const double residual = (c - w * l).norm();
    out.weights.push_back(w);
    out.residuals.push_back(residual);
    if (residual > tol && !out.first_violation) out.first_violation = k;
  }
  return out;
}

Complex fcs_generating_rate(const LindbladModel& model, const QuantumState& rho,
                            const CurrentObservableSpec& spec, double lambda) {
  if (rho.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "state and model dimensions differ");
  }
  spec.validate_for(model);
  const Complex i(0.0, 1.0);
  Complex sum = 0.0;
  const auto& jumps = model.jumps();
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (spec.weights[k] == 0.0) continue;
    const double rate = (jumps[k].adjoint() * jumps[k] * rho.matrix()).trace().real();
    sum += (std::exp(i * lambda * spec.weights[k]) - 1.0) * rate;
  }
  return sum;
}

Complex tmh_generating_rate(const LindbladModel& model, const QuantumState& rho,
                            const ObservableDecomposition& x, double lambda) {
  if (rho.dim() != model.dim() || x.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model, state and observable dimensions differ");
  }
  const Complex i(0.0, 1.0);
  const Operator forward = x.apply([&](double v) { return std::exp(i * lambda * v); });
  const Operator generated = apply_adjoint_liouvillian(model, forward);
  const Operator backward = forward.adjoint();
  return 0.5 * ((generated * backward + backward * generated) * rho.matrix()).trace();
}

double fcs_short_time_moment(const LindbladModel& model, const QuantumState& rho,
                             const CurrentObservableSpec& spec, int order) {
  if (order < 1) throw Error(ErrorCode::kInvalidArgument, "moment order must be >= 1");
  spec.validate_for(model);
  double sum = 0.0;
  const auto& jumps = model.jumps();
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const double rate = (jumps[k].adjoint() * jumps[k] * rho.matrix()).trace().real();
    sum += std::pow(spec.weights[k], order) * rate;
  }
  return sum;
}

namespace {

struct EigenFrame {
  std::vector<double> values;  // one per basis vector
  Eigen::MatrixXcd basis;
};

EigenFrame eigen_frame(const ObservableDecomposition& x) {
  EigenFrame f;
  f.basis.resize(x.dim(), x.dim());
  Index col = 0;
  for (const auto& label : x.labels()) {
    for (Index j = 0; j < label.vectors.cols(); ++j) {
      f.basis.col(col++) = label.vectors.col(j);
      f.values.push_back(label.value);
    }
  }
  return f;
}

Complex predicted_in_frame(const Operator& h, const Operator& r, const std::vector<double>& v,
                           double lambda) {
  Complex sum = 0.0;
  for (Index y = 0; y < h.rows(); ++y) {
    for (Index x = 0; x < h.cols(); ++x) {
      const double gap = v[x] - v[y];
      if (gap == 0.0) continue;
      sum += h(y, x) * r(x, y) * std::sin(lambda * gap);
    }
  }
  return sum;
}

double spread_of(const ObservableDecomposition& x) {
  const auto values = x.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double spread = *hi - *lo;
  return spread > 0.0 ? spread : 1.0;
}

}  // namespace

Complex predicted_rate_difference(const LindbladModel& model, const QuantumState& rho,
                                const ObservableDecomposition& x, double lambda) {
  if (rho.dim() != model.dim() || x.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "model, state and observable dimensions differ");
  }
  const EigenFrame f = eigen_frame(x);
  const Operator h = f.basis.adjoint() * model.hamiltonian() * f.basis;
  const Operator r = f.basis.adjoint() * rho.matrix() * f.basis;
  return predicted_in_frame(h, r, f.values, lambda);
}

std::vector<double> default_lambda_grid(const ObservableDecomposition& x, int points) {
  if (points < 2) throw Error(ErrorCode::kInvalidArgument, "lambda grid needs >= 2 points");
  const double reach = std::numbers::pi / spread_of(x);
  std::vector<double> grid;
  for (int i = 0; i < points; ++i) {
    grid.push_back(-reach + 2.0 * reach * static_cast<double>(i) / (points - 1));
  }
  return grid;
}

GeneratingRateComparison compare_rates(const LindbladModel& model, const QuantumState& rho,
                                       const Operator& x, std::vector<double> lambda_grid,
                                       double commutation_tol, unsigned workers) {
  const CommutationResult commutation = commutation_check(model, x, commutation_tol);
  if (!commutation.holds()) {
    throw Error(ErrorCode::kCommutationViolated,
                "[X, L_k] = w_k L_k fails for jump " +
                    std::to_string(*commutation.first_violation) + " (residual " +
                    std::to_string(commutation.residuals[*commutation.first_violation]) + ")");
  }
  const auto decomposition = ObservableDecomposition::from_operator(x);
  if (lambda_grid.empty()) lambda_grid = default_lambda_grid(decomposition);
  const CurrentObservableSpec spec = commutation.spec();

  const EigenFrame frame = eigen_frame(decomposition);
  const Operator h = frame.basis.adjoint() * model.hamiltonian() * frame.basis;
  const Operator r = frame.basis.adjoint() * rho.matrix() * frame.basis;

  struct Row {
    Complex tmh, fcs, predicted;
  };
  const auto rows = parallel_map(lambda_grid.size(), workers, [&](std::size_t i) {
    const double lambda = lambda_grid[i];
    return Row{tmh_generating_rate(model, rho, decomposition, lambda),
               fcs_generating_rate(model, rho, spec, lambda),
               predicted_in_frame(h, r, frame.values, lambda)};
  });

  GeneratingRateComparison out;
  out.lambda_grid = lambda_grid;
  out.weights = commutation.weights;
  for (const auto& row : rows) {
    out.tmh_rate.push_back(row.tmh);
    out.fcs_rate.push_back(row.fcs);
    out.predicted_difference.push_back(row.predicted);
    out.residual = std::max(out.residual, std::abs((row.fcs - row.tmh) - row.predicted));
    out.scale = std::max({out.scale, std::abs(row.tmh), std::abs(row.fcs)});
  }

  const double h_step = 0.05 / spread_of(decomposition);
  for (int order : {2, 4}) {
    const Complex d = central_derivative(
        [&](double lambda) { return tmh_generating_rate(model, rho, decomposition, lambda); },
        0.0, order, h_step, order / 2 + 3);
    Complex factor = 1.0;
    for (int k = 0; k < order; ++k) factor *= Complex(0.0, -1.0);
    out.even_moments.push_back(
        {order, (factor * d).real(), fcs_short_time_moment(model, rho, spec, order)});
  }
  return out;
}

}  // namespace qtur

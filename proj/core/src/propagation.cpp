#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qtur/error.hpp"
#include "qtur/lindblad_model.hpp"

namespace qtur {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights.
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

Operator vec_to_matrix(const Eigen::VectorXcd& v, Index d) {
  return Eigen::Map<const Operator>(v.data(), d, d);
}

}  // namespace

Propagator::Propagator(const LindbladModel& model, double t, Picture picture,
                       PropagationOptions options)
    : model_(model), t_(t), picture_(picture), options_(options) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "propagation time must be finite and >= 0");
  }
  if (t > 0.0 && model.dim() <= options_.exact_dim_limit) {
    Eigen::MatrixXcd m = liouvillian_superoperator(model);
    if (picture_ == Picture::kHeisenberg) m.adjointInPlace();
    m *= t;
    exact_ = std::make_shared<const Eigen::MatrixXcd>(m.exp());
  }
}

Operator Propagator::generator(const Operator& a) const {
  return picture_ == Picture::kSchrodinger ? apply_liouvillian(model_, a)
                                           : apply_adjoint_liouvillian(model_, a);
}

Operator Propagator::apply(const Operator& a) const {
  const Index d = model_.dim();
  if (a.rows() != d || a.cols() != d) {
    throw Error(ErrorCode::kDimMismatch, "propagated operand has the wrong dimension");
  }
  if (t_ == 0.0) return a;
  if (exact_) {
    const Eigen::Map<const Eigen::VectorXcd> v(a.data(), d * d);
    const Eigen::VectorXcd out = (*exact_) * v;
    return vec_to_matrix(out, d);
  }
  return integrate(a);
}

Operator Propagator::integrate(const Operator& a) const {
  const double scale =
      model_.hamiltonian().norm() + model_.decay_operator().norm() + 1e-300;
  double h = std::min(t_, 0.05 / scale);
  double t = 0.0;
  Operator y = a;
  Operator k1 = generator(y);
  long steps = 0;
  while (t < t_) {
    if (++steps > options_.max_steps) {
      throw Error(ErrorCode::kNonConvergence, "adaptive integrator exceeded step budget");
    }
    h = std::min(h, t_ - t);
    const Operator k2 = generator(y + h * (kA21 * k1));
    const Operator k3 = generator(y + h * (kA31 * k1 + kA32 * k2));
    const Operator k4 = generator(y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Operator k5 = generator(y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Operator k6 =
        generator(y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const Operator y_new =
        y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const Operator k7 = generator(y_new);
    const Operator err =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

    double err_norm = 0.0;
    for (Index j = 0; j < err.cols(); ++j) {
      for (Index i = 0; i < err.rows(); ++i) {
        const double sc =
            options_.atol + options_.rtol * std::max(std::abs(y(i, j)), std::abs(y_new(i, j)));
        err_norm = std::max(err_norm, std::abs(err(i, j)) / sc);
      }
    }
    if (!std::isfinite(err_norm)) {
      throw Error(ErrorCode::kNonConvergence, "adaptive integrator produced non-finite values");
    }
    if (err_norm <= 1.0) {
      t += h;
      y = y_new;
      k1 = k7;
    }
    const double factor =
        err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * std::max(t_, 1e-300)) {
      throw Error(ErrorCode::kNonConvergence, "adaptive integrator step size underflow");
    }
  }
  return y;
}

QuantumState propagate(const LindbladModel& model, const QuantumState& rho0, double t,
                       PropagationOptions options) {
  if (rho0.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "state and model dimensions differ");
  }
  if (t == 0.0) return rho0;
  Propagator propagator(model, t, Picture::kSchrodinger, options);
  Operator rho = hermitian_part(propagator.apply(rho0.matrix()));
  rho /= rho.trace().real();
  return QuantumState(std::move(rho), 1e-8);
}

Operator heisenberg_propagate(const LindbladModel& model, const Operator& x, double dt,
                              PropagationOptions options) {
  return Propagator(model, dt, Picture::kHeisenberg, options).apply(x);
}

}  // namespace qtur

#include "qtur/degeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "qtur/error.hpp"
#include "qtur/parallel.hpp"

namespace qtur {

DegenerateBasis::DegenerateBasis(std::vector<BasisGroup> groups) : groups_(std::move(groups)) {
  if (groups_.empty()) {
    throw Error(ErrorCode::kBasisMismatch, "degenerate basis needs at least one group");
  }
  dim_ = groups_.front().vectors.rows();
  Index cols = 0;
  for (const auto& g : groups_) {
    if (g.vectors.rows() != dim_ || g.vectors.cols() < 1 || !std::isfinite(g.value)) {
      throw Error(ErrorCode::kBasisMismatch, "basis group has inconsistent vectors");
    }
    cols += g.vectors.cols();
  }
  if (cols != dim_) throw Error(ErrorCode::kBasisMismatch, "basis is not complete");
  matrix_.resize(dim_, dim_);
  Index offset = 0;
  for (std::size_t s = 0; s < groups_.size(); ++s) {
    matrix_.middleCols(offset, groups_[s].vectors.cols()) = groups_[s].vectors;
    offset += groups_[s].vectors.cols();
    group_of_.insert(group_of_.end(), static_cast<std::size_t>(groups_[s].vectors.cols()), s);
  }
  const double defect = (matrix_.adjoint() * matrix_ - Operator::Identity(dim_, dim_)).norm();
  if (defect > 1e-9) throw Error(ErrorCode::kBasisMismatch, "basis is not orthonormal");
}

DegenerateBasis DegenerateBasis::from_observable(const Operator& x,
                                                 std::optional<double> degeneracy_tol) {
  const auto spectrum = spectral_decompose(x, degeneracy_tol);
  std::vector<BasisGroup> groups;
  for (const auto& c : spectrum.classes()) groups.push_back({c.value, c.vectors});
  return DegenerateBasis(std::move(groups));
}

std::vector<double> DegenerateBasis::group_values() const {
  std::vector<double> out;
  for (const auto& g : groups_) out.push_back(g.value);
  return out;
}

void DegenerateBasis::validate_for(const Operator& x, double tol) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw Error(ErrorCode::kBasisMismatch, "basis and observable dimensions differ");
  }
  for (const auto& g : groups_) {
    const double residual = (x * g.vectors - g.value * g.vectors).norm();
    if (residual > tol) {
      throw Error(ErrorCode::kBasisMismatch,
                  "basis vectors are not eigenvectors (residual " + std::to_string(residual) +
                      ")");
    }
  }
}

ObservableDecomposition DegenerateBasis::resolved() const {
  std::vector<double> values;
  for (std::size_t s : group_of_) values.push_back(groups_[s].value);
  return ObservableDecomposition::from_basis(values, matrix_);
}

Eigen::MatrixXd basis_flux_matrix(const LindbladModel& model, const QuantumState& rho,
                                  const Eigen::MatrixXcd& basis) {
  const Index d = model.dim();
  if (rho.dim() != d || basis.rows() != d || basis.cols() != d) {
    throw Error(ErrorCode::kDimMismatch, "model, state and basis dimensions differ");
  }
  const Eigen::MatrixXcd u_dag = basis.adjoint();
  const Operator h = u_dag * model.hamiltonian() * basis;
  const Operator k = u_dag * model.decay_operator() * basis;
  const Operator r = u_dag * rho.matrix() * basis;
  const Operator h_r = h * r;
  const Operator k_r = k * r;
  const Complex i(0.0, 1.0);

  // T_ab = Re[ i H_ba r_ab - i delta_ab (H r)_aa + sum_k conj(L_ab) (L r)_ab
  //            - 1/2 K_ba r_ab - 1/2 delta_ab (K r)_aa ]
  Eigen::MatrixXcd acc = (i * h.transpose().array() * r.array()).matrix();
  acc -= (0.5 * k.transpose().array() * r.array()).matrix();
  for (const auto& jump : model.jumps()) {
    const Operator l = u_dag * jump * basis;
    const Operator l_r = l * r;
    acc += (l.conjugate().array() * l_r.array()).matrix();
  }
  for (Index a = 0; a < d; ++a) acc(a, a) -= i * h_r(a, a) + 0.5 * k_r(a, a);
  return acc.real();
}

double IntegratedFluxMatrix::m_x() const {
  double sum = 0.0;
  for (Index sp = 0; sp < values.rows(); ++sp) {
    for (Index s = 0; s < values.cols(); ++s) {
      const double gap = group_values[sp] - group_values[s];
      sum += gap * gap * values(sp, s);
    }
  }
  return sum;
}

IntegratedFluxMatrix integrated_fluxes(const LindbladModel& model, const QuantumState& rho,
                                       const DegenerateBasis& basis,
                                       const std::optional<Operator>& x) {
  if (basis.dim() != model.dim()) {
    throw Error(ErrorCode::kBasisMismatch, "basis and model dimensions differ");
  }
  if (x) basis.validate_for(*x);
  const Eigen::MatrixXd t = basis_flux_matrix(model, rho, basis.matrix());
  const auto& group = basis.group_of_column();
  const std::size_t n = basis.groups().size();

  IntegratedFluxMatrix out;
  out.group_values = basis.group_values();
  out.values = Eigen::MatrixXd::Zero(static_cast<Index>(n), static_cast<Index>(n));
  for (Index a = 0; a < t.rows(); ++a) {
    for (Index b = 0; b < t.cols(); ++b) {
      if (a == b) continue;
      out.values(static_cast<Index>(group[a]), static_cast<Index>(group[b])) += t(a, b);
    }
  }
  out.escape_rate = -t.diagonal().sum();
  return out;
}

ClassicalityReport classify_basis_classicality(const LindbladModel& model,
                                               const DegenerateBasis& basis,
                                               double magnitude_bound, int count_bound) {
  if (basis.dim() != model.dim()) {
    throw Error(ErrorCode::kDimMismatch, "basis and model dimensions differ");
  }
  const Index d = model.dim();
  const Eigen::MatrixXcd& u = basis.matrix();
  Eigen::MatrixXd max_mag = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(d, d);
  for (const auto& jump : model.jumps()) {
    const Eigen::MatrixXd mag = (u.adjoint() * jump * u).cwiseAbs();
    max_mag = max_mag.cwiseMax(mag);
    counts += (mag.array() > kMatrixElementZero).cast<int>().matrix();
  }

  ClassicalityReport report;
  report.magnitude_bound = magnitude_bound;
  report.count_bound = count_bound;
  for (Index from = 0; from < d; ++from) {
    for (Index to = 0; to < d; ++to) {
      if (counts(to, from) == 0) continue;
      report.transitions.push_back({from, to, max_mag(to, from), counts(to, from)});
      report.max_magnitude = std::max(report.max_magnitude, max_mag(to, from));
      report.max_count = std::max(report.max_count, counts(to, from));
    }
  }
  return report;
}

double l1_coherence(const Operator& rho, const Eigen::MatrixXcd& basis) {
  if (rho.rows() != basis.rows() || basis.rows() != basis.cols()) {
    throw Error(ErrorCode::kDimMismatch, "state and basis dimensions differ");
  }
  const Eigen::MatrixXd mag = (basis.adjoint() * rho * basis).cwiseAbs();
  return mag.sum() - mag.diagonal().sum();
}

// ---------------------------------------------------------------------------

void CollectiveModelParams::validate() const {
  if (n_levels < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorCode::kInvalidArgument, "omega must be positive");
  }
  if (!(gamma_plus > 0.0) || !(gamma_minus > 0.0) || !std::isfinite(gamma_plus) ||
      !std::isfinite(gamma_minus)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma_plus and gamma_minus must be positive");
  }
  if (!(p_g >= 0.0 && p_g <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "p_g must lie in [0, 1]");
  }
}

std::string to_string(CollectiveState state) {
  switch (state) {
    case CollectiveState::kPlus: return "+";
    case CollectiveState::kMinus: return "-";
    case CollectiveState::kClassical: return "classical";
  }
  return "?";
}

CollectiveState parse_collective_state(const std::string& text) {
  if (text == "+" || text == "plus") return CollectiveState::kPlus;
  if (text == "-" || text == "minus") return CollectiveState::kMinus;
  if (text == "classical" || text == "c") return CollectiveState::kClassical;
  throw Error(ErrorCode::kInvalidArgument, "unknown state kind '" + text + "'");
}

LindbladModel build_collective_model(const CollectiveModelParams& params) {
  params.validate();
  const Index n = params.n_levels;
  Operator h = Operator::Zero(2 * n, 2 * n);
  Operator up = Operator::Zero(2 * n, 2 * n);
  Operator down = Operator::Zero(2 * n, 2 * n);
  for (Index j = 0; j < n; ++j) {
    h(n + j, n + j) = params.omega;
    for (Index jp = 0; jp < n; ++jp) {
      up(n + j, jp) = std::sqrt(params.gamma_plus);
      down(j, n + jp) = std::sqrt(params.gamma_minus);
    }
  }
  const double s = std::log(params.gamma_plus / params.gamma_minus);
  return LindbladModel(std::move(h), {JumpPair{std::move(up), std::move(down), s}});
}

namespace {

Eigen::VectorXcd collective_vector(Index n, Index offset, Index size, double sign) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index j = 1; j <= n; ++j) v(offset + j - 1) = (j % 2 == 1 ? sign : 1.0) * norm;
  return v;
}

}  // namespace

QuantumState build_plus_minus_state(const CollectiveModelParams& params, CollectiveState sign) {
  params.validate();
  if (sign == CollectiveState::kClassical) return build_classical_state(params);
  const Index n = params.n_levels;
  const double s = sign == CollectiveState::kPlus ? 1.0 : -1.0;
  const Eigen::VectorXcd g = collective_vector(n, 0, 2 * n, s);
  const Eigen::VectorXcd e = collective_vector(n, n, 2 * n, s);
  Operator rho = params.p_g * g * g.adjoint() + params.p_e() * e * e.adjoint();
  return QuantumState(std::move(rho));
}

QuantumState build_classical_state(const CollectiveModelParams& params) {
  params.validate();
  const Index n = params.n_levels;
  Operator rho = Operator::Zero(2 * n, 2 * n);
  for (Index j = 0; j < n; ++j) {
    rho(j, j) = params.p_g / static_cast<double>(n);
    rho(n + j, n + j) = params.p_e() / static_cast<double>(n);
  }
  return QuantumState(std::move(rho));
}

QuantumState build_collective_state(const CollectiveModelParams& params, CollectiveState kind) {
  return kind == CollectiveState::kClassical ? build_classical_state(params)
                                             : build_plus_minus_state(params, kind);
}

DegenerateBasis product_basis(const CollectiveModelParams& params) {
  params.validate();
  const Index n = params.n_levels;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2 * n, 2 * n);
  return DegenerateBasis({{0.0, id.leftCols(n)}, {params.omega, id.rightCols(n)}});
}

DegenerateBasis fourier_basis(const CollectiveModelParams& params) {
  params.validate();
  const Index n = params.n_levels;
  Eigen::MatrixXcd f(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index j = 1; j <= n; ++j) {
    for (Index k = 0; k < n; ++k) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(j * k) /
                           static_cast<double>(n);
      f(j - 1, k) = std::polar(norm, phase);
    }
  }
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(2 * n, n);
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(2 * n, n);
  g.topRows(n) = f;
  e.bottomRows(n) = f;
  return DegenerateBasis({{0.0, g}, {params.omega, e}});
}

DegenerateBasis random_group_rotation(const DegenerateBasis& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<BasisGroup> groups;
  for (const auto& g : basis.groups()) {
    const Index m = g.vectors.cols();
    Eigen::MatrixXcd z(m, m);
    for (Index c = 0; c < m; ++c) {
      for (Index r = 0; r < m; ++r) z(r, c) = Complex(normal(rng), normal(rng));
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(m, m);
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index c = 0; c < m; ++c) {
      const double mag = std::abs(r(c, c));
      if (mag > 0.0) q.col(c) *= r(c, c) / mag;
    }
    groups.push_back({g.value, g.vectors * q});
  }
  return DegenerateBasis(std::move(groups));
}

int parity_remainder(int n) { return ((n % 2) + 2) % 2; }

ClosedFormFluxes closed_form_reference(const CollectiveModelParams& params,
                                       CollectiveState sign) {
  params.validate();
  if (sign == CollectiveState::kClassical) {
    throw Error(ErrorCode::kInvalidArgument, "closed forms exist for rho^+ and rho^- only");
  }
  const double n = params.n_levels;
  const double a = params.gamma_plus * params.p_g;
  const double b = params.gamma_minus * params.p_e();
  const double w2 = params.omega * params.omega;
  ClosedFormFluxes out;
  if (sign == CollectiveState::kPlus) {
    out.t_eg = a * n * n;
    out.t_ge = b * n * n;
    out.t_gg = -0.5 * a * n * (n - 1.0);
    out.t_ee = -0.5 * b * n * (n - 1.0);
    out.escape_rate = 0.5 * (a + b) * n * (n + 1.0);
    out.m_h = w2 * (a + b) * n * n;
  } else {
    const double chi = parity_remainder(params.n_levels);
    out.t_eg = a * chi;
    out.t_ge = b * chi;
    out.t_gg = 0.5 * a * (n - chi);
    out.t_ee = 0.5 * b * (n - chi);
    out.escape_rate = 0.5 * (a + b) * (n + chi);
    out.m_h = w2 * (a + b) * chi;
  }
  return out;
}

// ---------------------------------------------------------------------------

ExponentFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                          double floor) {
  if (x.size() != y.size()) throw Error(ErrorCode::kDimMismatch, "fit series lengths differ");
  if (x.size() < 2) {
    throw Error(ErrorCode::kInsufficientPoints, "power-law fit needs at least two points");
  }
  const std::size_t n = x.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0)) throw Error(ErrorCode::kInvalidArgument, "fit abscissae must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::max(y[i], floor));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) {
    throw Error(ErrorCode::kInsufficientPoints, "power-law fit needs distinct abscissae");
  }
  ExponentFit fit;
  fit.points = n;
  fit.exponent = sxy / sxx;
  fit.prefactor = std::exp(my - fit.exponent * mx);
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (my + fit.exponent * (lx[i] - mx));
    ss_res += r * r;
  }
  // A constant series is fitted exactly.
  fit.r_squared = syy <= 1e-300 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::kProduct: return "product";
    case BasisKind::kFourier: return "fourier";
    case BasisKind::kRandom: return "random";
  }
  return "?";
}

namespace {

SweepPoint sweep_point(const SweepOptions& options, std::size_t index) {
  CollectiveModelParams params = options.params;
  params.n_levels = options.n_values[index];
  if (options.bias) {
    params.p_g = (params.gamma_minus + *options.bias / params.n_levels) /
                 (params.gamma_plus + params.gamma_minus);
  }
  params.validate();
  const LindbladModel model = build_collective_model(params);
  const QuantumState rho = build_collective_state(params, options.state);

  DegenerateBasis basis = product_basis(params);
  if (options.basis == BasisKind::kFourier) {
    basis = fourier_basis(params);
  } else if (options.basis == BasisKind::kRandom) {
    std::mt19937_64 rng(options.seed + 0x9e3779b97f4a7c15ULL * (index + 1));
    basis = random_group_rotation(basis, rng);
  }
  const IntegratedFluxMatrix flux = integrated_fluxes(model, rho, basis);

  SweepPoint p;
  p.n = params.n_levels;
  p.p_g = params.p_g;
  p.m_x = flux.m_x();
  p.escape_rate = flux.escape_rate;
  p.min_integrated_flux = flux.min_value();
  p.total_integrated_flux = flux.total();
  p.current = currents(model, rho, model.hamiltonian()).dissipative_part;
  p.epr = entropy_production_rate(model, rho, {options.eigenvalue_floor, true});
  p.bound = p.m_x > kZeroFluctuation ? 2.0 * p.current * p.current / p.m_x : 0.0;
  p.l1_coherence = l1_coherence(rho.matrix(), basis.matrix());
  return p;
}

}  // namespace

ScalingSweepReport scaling_sweep(const SweepOptions& options) {
  if (options.n_values.size() < 2) {
    throw Error(ErrorCode::kInsufficientPoints, "a sweep needs at least two N values");
  }
  for (std::size_t i = 1; i < options.n_values.size(); ++i) {
    if (options.n_values[i] <= options.n_values[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument, "N values must be strictly ascending");
    }
  }
  ScalingSweepReport report;
  report.options = options;
  report.points = parallel_map(options.n_values.size(), options.workers,
                               [&](std::size_t i) { return sweep_point(options, i); });

  std::vector<double> n, m, esc, cur, bnd, epr;
  for (const auto& p : report.points) {
    n.push_back(p.n);
    m.push_back(p.m_x);
    esc.push_back(p.escape_rate);
    cur.push_back(std::abs(p.current));
    bnd.push_back(p.bound);
    epr.push_back(p.epr);
  }
  report.m_x_fit = fit_power_law(n, m, options.fit_floor);
  report.escape_rate_fit = fit_power_law(n, esc, options.fit_floor);
  report.current_fit = fit_power_law(n, cur, options.fit_floor);
  report.bound_fit = fit_power_law(n, bnd, options.fit_floor);
  report.epr_fit = fit_power_law(n, epr, options.fit_floor);
  return report;
}

QDiagnostics q1_q2_diagnostics(const ScalingSweepReport& sweep) {
  if (sweep.points.size() < 4) {
    throw Error(ErrorCode::kInsufficientPoints, "diagnostics need at least four sweep points");
  }
  std::vector<double> n, q1, q2;
  for (const auto& p : sweep.points) {
    const double nn = p.n;
    n.push_back(nn);
    q1.push_back(std::max(-p.min_integrated_flux, sweep.options.fit_floor) / nn);
    q2.push_back(p.escape_rate / nn);
  }
  QDiagnostics out;
  const double floor = sweep.options.fit_floor;
  out.q1.fit = fit_power_law(n, q1, floor);
  out.q2.fit = fit_power_law(n, q2, floor);
  auto judge = [&](ConditionVerdict& v) {
    v.satisfied = v.fit.exponent > out.slope_threshold && v.fit.r_squared >= out.r_squared_threshold;
  };
  judge(out.q1);
  judge(out.q2);
  return out;
}

}  // namespace qtur

#include "qtur/operator_algebra.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qtur/error.hpp"

namespace qtur {

namespace {

void require_square(const Operator& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error(ErrorCode::kDimMismatch, std::string(what) + " must be a non-empty square matrix");
  }
}

void require_hermitian(const Operator& a, const char* what) {
  require_square(a, what);
  if (!a.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " has non-finite entries");
  }
  if (!is_hermitian(a)) {
    throw Error(ErrorCode::kNotHermitian,
                std::string(what) + " is not Hermitian (defect " +
                    std::to_string(hermiticity_defect(a)) + ")");
  }
}

Eigen::SelfAdjointEigenSolver<Operator> positive_definite_eigensolver(const Operator& g,
                                                                      const char* what) {
  require_hermitian(g, what);
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(g));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonConvergence, std::string(what) + ": eigensolver failed");
  }
  if (solver.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kSingularOperator,
                std::string(what) + " is not positive definite (min eigenvalue " +
                    std::to_string(solver.eigenvalues().minCoeff()) + ")");
  }
  return solver;
}

}  // namespace

SpectralDecomposition::SpectralDecomposition(Index dim, std::vector<EigenClass> classes)
    : dim_(dim), classes_(std::move(classes)) {}

std::vector<double> SpectralDecomposition::eigenvalues() const {
  std::vector<double> values;
  values.reserve(classes_.size());
  for (const auto& c : classes_) values.push_back(c.value);
  return values;
}

std::vector<Operator> SpectralDecomposition::projectors() const {
  std::vector<Operator> out;
  out.reserve(classes_.size());
  for (const auto& c : classes_) out.push_back(c.projector());
  return out;
}

Operator SpectralDecomposition::apply(const std::function<Complex(double)>& f) const {
  Operator out = Operator::Zero(dim_, dim_);
  for (const auto& c : classes_) {
    out += f(c.value) * c.projector();
  }
  return out;
}

Operator SpectralDecomposition::reconstruct() const {
  return apply([](double x) { return Complex(x, 0.0); });
}

double hs_norm(const Operator& a) { return a.norm(); }

double hermiticity_defect(const Operator& a) { return (a - a.adjoint()).norm(); }

bool is_hermitian(const Operator& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  return hermiticity_defect(a) <= rel_tol * a.norm();
}

Operator hermitian_part(const Operator& a) { return 0.5 * (a + a.adjoint()); }

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

Complex hs_inner_product(const Operator& a, const Operator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimMismatch, "hs_inner_product: operand shapes differ");
  }
  // tr(A^dagger B) = sum_ij conj(A_ij) B_ij
  return (a.conjugate().cwiseProduct(b)).sum();
}

double default_degeneracy_tol(const Operator& a) { return 1e-9 * a.norm(); }

SpectralDecomposition spectral_decompose(const Operator& a, std::optional<double> degeneracy_tol) {
  require_hermitian(a, "spectral_decompose input");
  const double tol = degeneracy_tol.value_or(default_degeneracy_tol(a));
  if (tol < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "degeneracy tolerance must be non-negative");
  }

  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(a));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonConvergence, "spectral_decompose: eigensolver failed");
  }
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Operator& evecs = solver.eigenvectors();
  const Index n = a.rows();

  std::vector<EigenClass> classes;
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && evals(stop) - evals(stop - 1) <= tol) ++stop;
    EigenClass c;
    c.value = evals.segment(start, stop - start).mean();
    c.vectors = evecs.middleCols(start, stop - start);
    classes.push_back(std::move(c));
    start = stop;
  }
  return SpectralDecomposition(n, std::move(classes));
}

double min_eigenvalue(const Operator& a) {
  require_hermitian(a, "min_eigenvalue input");
  Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Operator matrix_log_psd(const Operator& g) {
  auto solver = positive_definite_eigensolver(g, "matrix_log_psd input");
  const Eigen::VectorXd logs = solver.eigenvalues().array().log();
  const Operator& v = solver.eigenvectors();
  return v * logs.cast<Complex>().asDiagonal() * v.adjoint();
}

Operator matrix_power_psd(const Operator& g, double s) {
  auto solver = positive_definite_eigensolver(g, "matrix_power_psd input");
  const Eigen::VectorXd powers = solver.eigenvalues().array().pow(s);
  const Operator& v = solver.eigenvectors();
  return v * powers.cast<Complex>().asDiagonal() * v.adjoint();
}

Operator matrix_exp(const Operator& a) {
  require_square(a, "matrix_exp input");
  return a.exp();
}

Operator kubo_integral(const Operator& g, const Operator& a) {
  auto solver = positive_definite_eigensolver(g, "kubo_integral weight");
  if (a.rows() != g.rows() || a.cols() != g.cols()) {
    throw Error(ErrorCode::kDimMismatch, "kubo_integral: operand and weight shapes differ");
  }
  const Eigen::VectorXd& evals = solver.eigenvalues();
  const Operator& v = solver.eigenvectors();
  const Eigen::VectorXd logs = evals.array().log();

  Operator in_basis = v.adjoint() * a * v;
  const Index n = g.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double delta = logs(i) - logs(j);
      // Logarithmic mean (g_i - g_j)/(ln g_i - ln g_j), written through expm1
      // so nearly equal eigenvalues do not cancel.
      const double weight =
          std::abs(delta) < 1e-12 ? evals(i) : evals(j) * std::expm1(delta) / delta;
      in_basis(i, j) *= weight;
    }
  }
  return v * in_basis * v.adjoint();
}

}  // namespace qtur

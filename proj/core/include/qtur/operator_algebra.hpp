#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace qtur {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline constexpr double kHermitianTolerance = 1e-10;

/// One eigenvalue class of a Hermitian operator: the (merged) eigenvalue and
/// an orthonormal basis of its eigenspace stored as columns.
struct EigenClass {
  double value = 0.0;
  Eigen::MatrixXcd vectors;

  Index multiplicity() const { return vectors.cols(); }
  Operator projector() const { return vectors * vectors.adjoint(); }
};

class SpectralDecomposition {
 public:
  SpectralDecomposition(Index dim, std::vector<EigenClass> classes);

  Index dim() const { return dim_; }
  const std::vector<EigenClass>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }

  /// Class values, ascending.
  std::vector<double> eigenvalues() const;
  std::vector<Operator> projectors() const;

  /// Sum_x f(x) Pi_x.
  Operator apply(const std::function<Complex(double)>& f) const;
  Operator reconstruct() const;

 private:
  Index dim_;
  std::vector<EigenClass> classes_;
};

double hs_norm(const Operator& a);
/// ||A - A^dagger||_HS.
double hermiticity_defect(const Operator& a);
bool is_hermitian(const Operator& a, double rel_tol = kHermitianTolerance);
Operator hermitian_part(const Operator& a);

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

/// <A, B> = tr(A^dagger B).
Complex hs_inner_product(const Operator& a, const Operator& b);

/// Absolute merging threshold used when none is given: 1e-9 * ||A||_HS.
double default_degeneracy_tol(const Operator& a);

/// Eigendecomposition of a Hermitian operator. Eigenvalues whose gap to the
/// previous (ascending) eigenvalue is within `degeneracy_tol` are merged into
/// one class; the class value is the mean of its members.
/// Throws kNotHermitian when ||A - A^dagger|| > 1e-10 ||A||.
SpectralDecomposition spectral_decompose(const Operator& a,
                                         std::optional<double> degeneracy_tol = std::nullopt);

/// Smallest eigenvalue of a Hermitian operator.
double min_eigenvalue(const Operator& a);

/// ln G for positive-definite G; throws kSingularOperator otherwise.
Operator matrix_log_psd(const Operator& g);

/// G^s for positive-definite G and real s.
Operator matrix_power_psd(const Operator& g, double s);

/// General matrix exponential (scaling and squaring with Pade approximants).
Operator matrix_exp(const Operator& a);

/// Kubo-type integral S_G(A) = int_0^1 G^s A G^{1-s} ds, evaluated in the
/// eigenbasis of G through the logarithmic mean of eigenvalue pairs.
Operator kubo_integral(const Operator& g, const Operator& a);

}  // namespace qtur

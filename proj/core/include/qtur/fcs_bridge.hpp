#pragma once

#include <optional>
#include <vector>

#include "qtur/lindblad_model.hpp"
#include "qtur/operator_algebra.hpp"
#include "qtur/quasiprobability.hpp"

namespace qtur {

/// One weight w_k per entry of LindbladModel::jumps().
struct CurrentObservableSpec {
  std::vector<double> weights;

  /// Throws kDimMismatch on a length mismatch, kInvalidArgument on non-finite weights.
  void validate_for(const LindbladModel& model) const;
};

struct CommutationResult {
  std::vector<double> weights;    // w_k = Re tr(L_k^dagger [X, L_k]) / tr(L_k^dagger L_k)
  std::vector<double> residuals;  // ||[X, L_k] - w_k L_k||_HS
  std::optional<std::size_t> first_violation;
  double tolerance = 0.0;

  bool holds() const { return !first_violation.has_value(); }
  CurrentObservableSpec spec() const { return {weights}; }
};

/// Tests [X, L_k] = w_k L_k for every jump. Zero jumps get w_k = 0.
CommutationResult commutation_check(const LindbladModel& model, const Operator& x,
                                    double tol = 1e-9);

/// g^fcs(lambda) = sum_k (e^{i lambda w_k} - 1) tr(L_k^dagger L_k rho).
Complex fcs_generating_rate(const LindbladModel& model, const QuantumState& rho,
                            const CurrentObservableSpec& spec, double lambda);

/// g(lambda) = 1/2 tr({L^dagger(e^{i lambda X}), e^{-i lambda X}} rho).
Complex tmh_generating_rate(const LindbladModel& model, const QuantumState& rho,
                            const ObservableDecomposition& x, double lambda);

/// sum_k w_k^n tr(L_k^dagger L_k rho).
double fcs_short_time_moment(const LindbladModel& model, const QuantumState& rho,
                             const CurrentObservableSpec& spec, int order);

/// g^fcs - g = sum_{x,y} H_yx rho_xy sin(lambda (x - y)) in the eigenbasis of X,
/// i.e. minus the coherent part of g. Purely imaginary: terms (x, y) and (y, x) are complex conjugates with
/// opposite sine.
Complex predicted_rate_difference(const LindbladModel& model, const QuantumState& rho,
                                  const ObservableDecomposition& x, double lambda);

/// 41 uniform points in [-pi / spread, pi / spread], spread = x_max - x_min
/// (unit spread for a constant spectrum).
std::vector<double> default_lambda_grid(const ObservableDecomposition& x, int points = 41);

struct EvenMomentCheck {
  int order = 0;
  double tmh = 0.0;  // (-i d/dlambda)^n g at 0, finite difference
  double fcs = 0.0;  // sum_k w_k^n tr(L_k^dagger L_k rho)
  double difference() const { return tmh - fcs; }
};

struct GeneratingRateComparison {
  std::vector<double> lambda_grid;
  std::vector<Complex> tmh_rate;
  std::vector<Complex> fcs_rate;
  std::vector<Complex> predicted_difference;
  double residual = 0.0;  // max |(g^fcs - g) - predicted|
  double scale = 1.0;     // max(1, max |g|, max |g^fcs|)
  std::vector<double> weights;
  std::vector<EvenMomentCheck> even_moments;  // orders 2 and 4
};

/// Throws kCommutationViolated when X admits no weights.
GeneratingRateComparison compare_rates(const LindbladModel& model, const QuantumState& rho,
                                       const Operator& x, std::vector<double> lambda_grid = {},
                                       double commutation_tol = 1e-9, unsigned workers = 1);

}  // namespace qtur

#include "instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace qtur::testing {

Operator random_matrix(Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Operator m(d, d);
  for (Index c = 0; c < d; ++c) {
    for (Index r = 0; r < d; ++r) m(r, c) = Complex(normal(rng), normal(rng));
  }
  return m;
}

Operator random_hermitian(Index d, Rng& rng, double scale) {
  const Operator m = random_matrix(d, rng);
  return scale * 0.5 * (m + m.adjoint());
}

Operator random_unitary(Index d, Rng& rng) {
  const Operator z = random_matrix(d, rng);
  Eigen::HouseholderQR<Operator> qr(z);
  Operator q = qr.householderQ() * Operator::Identity(d, d);
  for (Index c = 0; c < d; ++c) {
    const Complex r = qr.matrixQR()(c, c);
    if (std::abs(r) > 0.0) q.col(c) *= r / std::abs(r);
  }
  return q;
}

LindbladModel random_model(Index d, int pairs, Rng& rng) {
  std::uniform_real_distribution<double> rate(0.2, 2.0);
  std::uniform_real_distribution<double> entropy(-2.0, 2.0);
  std::vector<JumpPair> jumps;
  for (int k = 0; k < pairs; ++k) {
    Operator lt = random_matrix(d, rng);
    lt /= lt.norm();
    const double g = rate(rng);
    const double s = entropy(rng);
    jumps.push_back({std::sqrt(g) * lt, std::sqrt(g * std::exp(-s)) * lt.adjoint(), s});
  }
  return LindbladModel(random_hermitian(d, rng), std::move(jumps));
}

CommutingInstance random_commuting_model(Index d, int pairs, Rng& rng) {
  std::uniform_int_distribution<int> level(0, 3);
  std::uniform_int_distribution<Index> index(0, d - 1);
  std::uniform_real_distribution<double> rate(0.2, 2.0);
  std::uniform_real_distribution<double> entropy(-2.0, 2.0);
  const Operator u = random_unitary(d, rng);
  Eigen::VectorXcd spectrum(d);
  for (Index i = 0; i < d; ++i) spectrum(i) = static_cast<double>(level(rng));
  std::vector<JumpPair> jumps;
  for (int k = 0; k < pairs; ++k) {
    const Index a = index(rng);
    Index b = index(rng);
    while (b == a) b = index(rng);
    const Operator lt = u.col(a) * u.col(b).adjoint();
    const double g = rate(rng);
    const double s = entropy(rng);
    jumps.push_back({std::sqrt(g) * lt, std::sqrt(g * std::exp(-s)) * Operator(lt.adjoint()), s});
  }
  return {LindbladModel(random_hermitian(d, rng), std::move(jumps)),
          hermitian_part(u * spectrum.asDiagonal() * u.adjoint())};
}

QuantumState random_full_rank_state(Index d, Rng& rng) {
  const Operator g = random_matrix(d, rng);
  Operator rho = g * g.adjoint() + 0.05 * Operator::Identity(d, d);
  rho /= rho.trace().real();
  return QuantumState(hermitian_part(rho));
}

Operator random_observable(Index d, Rng& rng, int distinct) {
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::vector<double> pool;
  const int n = distinct > 0 ? distinct : static_cast<int>(d);
  for (int i = 0; i < n; ++i) pool.push_back(value(rng));
  std::uniform_int_distribution<int> pick(0, n - 1);
  Eigen::VectorXcd spectrum(d);
  for (Index i = 0; i < d; ++i) {
    spectrum(i) = distinct > 0 ? pool[static_cast<std::size_t>(pick(rng))] : pool[static_cast<std::size_t>(i)];
  }
  const Operator u = random_unitary(d, rng);
  return hermitian_part(u * spectrum.asDiagonal() * u.adjoint());
}

RandomChain random_reversible_chain(Index n, Rng& rng) {
  std::uniform_real_distribution<double> rate(0.1, 2.0);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  RandomChain c;
  c.rates = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i != j) c.rates(j, i) = rate(rng);
    }
  }
  for (Index i = 0; i < n; ++i) c.rates(i, i) = -(c.rates.col(i).sum() - c.rates(i, i));
  c.p.resize(n);
  c.f.resize(n);
  for (Index i = 0; i < n; ++i) {
    c.p(i) = unit(rng);
    c.f(i) = value(rng);
  }
  c.p /= c.p.sum();
  return c;
}

Operator sigma_x() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = m(1, 0) = 1.0;
  return m;
}

Operator sigma_y() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

Operator sigma_z() {
  Operator m = Operator::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Operator sigma_minus() {
  Operator m = Operator::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

Operator sigma_plus() { return sigma_minus().adjoint(); }

namespace {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1] by Newton
// iteration on the Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

Operator kubo_quadrature(const Operator& g, const Operator& a) {
  std::vector<double> x, w;
  gauss_legendre(64, x, w);
  Operator out = Operator::Zero(a.rows(), a.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = 0.5 * (x[i] + 1.0);
    out += 0.5 * w[i] * matrix_power_psd(g, s) * a * matrix_power_psd(g, 1.0 - s);
  }
  return out;
}

double rel_diff(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace qtur::testing

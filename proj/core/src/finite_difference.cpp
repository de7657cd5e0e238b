#include "qtur/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtur/error.hpp"

namespace qtur {

std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int order) {
  const int n = static_cast<int>(nodes.size());
  if (order < 0 || n <= order) {
    throw Error(ErrorCode::kInvalidArgument,
                "need more than " + std::to_string(order) + " nodes for this derivative");
  }
  // c[j][k]: weight of node j for the k-th derivative.
  std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = c[j][order];
  return out;
}

std::complex<double> central_derivative(const std::function<std::complex<double>(double)>& f,
                                        double x0, int order, double h, int half_width) {
  if (!(h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "finite-difference step must be > 0");
  std::vector<double> offsets;
  for (int k = -half_width; k <= half_width; ++k) offsets.push_back(k);
  const auto weights = fornberg_weights(0.0, offsets, order);
  std::complex<double> sum = 0.0;
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    if (weights[j] == 0.0) continue;
    sum += weights[j] * f(x0 + offsets[j] * h);
  }
  return sum / std::pow(h, order);
}

}  // namespace qtur

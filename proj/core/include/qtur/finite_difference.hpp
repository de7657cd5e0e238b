#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace qtur {

/// Finite-difference weights for the `order`-th derivative at `x0` from
/// arbitrary distinct nodes (Fornberg's recursion).
std::vector<double> fornberg_weights(double x0, std::span<const double> nodes, int order);

/// Estimate of f^{(order)}(x0) on the uniform stencil x0 + h*{-half_width..half_width}.
/// The stencil is accurate to O(h^{2 half_width + 1 - order}) for odd/even orders alike.
std::complex<double> central_derivative(const std::function<std::complex<double>(double)>& f,
                                        double x0, int order, double h, int half_width);

}  // namespace qtur

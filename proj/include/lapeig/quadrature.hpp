#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lapeig {

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on [a, b]. Smooth or piecewise-smooth integrands.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-13);

/// Tanh-sinh on [a, b]; tolerates integrable endpoint singularities such as
/// square-root behaviour.
double integrate_endpoint_singular(const ScalarFn& f, double a, double b, double tol = 1e-12);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` nodes (Newton iteration on P_n).
const GaussRule& gauss_legendre(std::size_t n);

}  // namespace lapeig

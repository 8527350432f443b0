#ifndef TRANSLEV_HERMITE_HPP
#define TRANSLEV_HERMITE_HPP

#include <span>
#include <vector>

#include "translev/multi_index.hpp"

namespace translev {

/// Values h_0(t), ..., h_N(t) of the L^2-orthonormal Hermite functions,
/// computed by the normalized three-term recurrence
///   h_{n+1}(t) = sqrt(2/(n+1)) t h_n(t) - sqrt(n/(n+1)) h_{n-1}(t),
/// h_0(t) = pi^{-1/4} exp(-t^2/2). Stable for N <= 200, |t| <= 20.
std::vector<double> hermite_values(int max_order, double t);

/// Values of h_n(t) exp(t^2/2): the polynomials orthonormal for the
/// weight exp(-t^2). Same recurrence, Gaussian factor removed; these are
/// what quadrature integrands use.
std::vector<double> hermite_values_scaled(int max_order, double t);

/// d-dimensional Hermite function h_n(x) = h_{n_1}(x_1) ... h_{n_d}(x_d).
double eval_hd(const MultiIndex& n, std::span<const double> x);

/// Gauss rule: nodes/weights integrating polynomials exactly against the
/// rule's weight function up to degree 2Q-1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order() const { return static_cast<int>(nodes.size()); }
};

/// Gauss-Hermite rule for the weight exp(-t^2) on R. Supported up to
/// order 200 (Newton iteration on the normalized recurrence).
QuadratureRule gauss_hermite_rule(int order);

/// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre_rule(int order);

}  // namespace translev

#endif

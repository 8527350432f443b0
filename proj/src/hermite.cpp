#include "translev/hermite.hpp"

#include <cmath>
#include <mutex>

#include <Eigen/Dense>
#include <unordered_map>

#include "translev/errors.hpp"

namespace translev {

namespace {

constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^{-1/4}

std::vector<double> hermite_recurrence(int max_order, double t, double first) {
  std::vector<double> v(static_cast<std::size_t>(max_order) + 1);
  v[0] = first;
  if (max_order >= 1) v[1] = std::sqrt(2.0) * t * v[0];
  for (int n = 1; n < max_order; ++n) {
    v[n + 1] = std::sqrt(2.0 / (n + 1)) * t * v[n] - std::sqrt(double(n) / (n + 1)) * v[n - 1];
  }
  return v;
}

}  // namespace

std::vector<double> hermite_values(int max_order, double t) {
  if (max_order < 0) throw_invalid("hermite_values: max_order must be >= 0");
  if (!std::isfinite(t)) throw_invalid("hermite_values: t must be finite");
  return hermite_recurrence(max_order, t, kPiQuarterInv * std::exp(-t * t / 2.0));
}

std::vector<double> hermite_values_scaled(int max_order, double t) {
  if (max_order < 0) throw_invalid("hermite_values_scaled: max_order must be >= 0");
  if (!std::isfinite(t)) throw_invalid("hermite_values_scaled: t must be finite");
  return hermite_recurrence(max_order, t, kPiQuarterInv);
}

double eval_hd(const MultiIndex& n, std::span<const double> x) {
  if (n.dim() != static_cast<int>(x.size())) throw_invalid("eval_hd: dimension mismatch");
  double prod = 1.0;
  for (int i = 0; i < n.dim(); ++i) {
    prod *= hermite_values(n.entries[i], x[i])[static_cast<std::size_t>(n.entries[i])];
  }
  return prod;
}

QuadratureRule gauss_hermite_rule(int order) {
  if (order < 1) throw_invalid("gauss_hermite_rule: order must be >= 1");
  if (order > 200) throw_unsupported("gauss_hermite_rule: order > 200 exceeds the stability ceiling");

  static std::mutex mtx;
  static std::unordered_map<int, QuadratureRule> cache;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
  }

  // Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal
  // Jacobi matrix with off-diagonals sqrt(k/2); a Newton polish on the
  // orthonormal recurrence then restores full accuracy, and the Christoffel
  // sum gives the weights.
  const int n = order;
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = std::sqrt(k / 2.0);
    jacobi(k - 1, k) = beta;
    jacobi(k, k - 1) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);

  for (int i = 0; i < n; ++i) {
    double z = es.eigenvalues()[i];
    for (int iter = 0; iter < 8; ++iter) {
      const std::vector<double> p = hermite_values_scaled(n, z);
      const double deriv = std::sqrt(2.0 * n) * p[static_cast<std::size_t>(n) - 1];
      if (deriv == 0.0) break;
      const double step = p[static_cast<std::size_t>(n)] / deriv;
      z -= step;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z))) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = z;
    const std::vector<double> p = hermite_values_scaled(n - 1, z);
    double s = 0.0;
    for (double v : p) s += v * v;
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / s;
  }
  // Exact odd symmetry: zero the middle node of odd orders.
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;

  std::lock_guard<std::mutex> lock(mtx);
  auto [it, inserted] = cache.emplace(order, rule);
  return it->second;
}

QuadratureRule gauss_legendre_rule(int order) {
  if (order < 1) throw_invalid("gauss_legendre_rule: order must be >= 1");
  const int n = order;
  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / pp;
      z -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = -z;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = rule.weights[static_cast<std::size_t>(i)];
  }
  return rule;
}

}  // namespace translev
